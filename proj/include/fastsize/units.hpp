#pragma once

#include <string>
#include <string_view>

#include "fastsize/document.hpp"

namespace fastsize {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

enum class Dimension {
  dimensionless,
  mass,
  length,
  speed,
  time,
  pressure,  // wing loading
  force,
  power,
  power_to_weight,
  specific_energy,
  specific_power,
  angle,
};

std::string_view dimension_name(Dimension d);

// SI unit a bare number is interpreted in, and the token used when writing.
std::string_view si_unit(Dimension d);

// Scale factor to SI for a unit token, e.g. ("km", length) -> 1000.
// Throws UnitError naming `key` when the token is unknown for the dimension.
double unit_scale(std::string_view unit, Dimension d, std::string_view key);

// Parses "1000 km", "250 Wh/kg", or a bare number (already SI).
double parse_quantity(std::string_view text, Dimension d, std::string_view key);

// Reads a quantity-valued key from a table: number (SI) or "<number> <unit>".
double read_quantity(TableReader& reader, std::string_view key, Dimension d);

}  // namespace fastsize

#include "fastsize/units.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

namespace fastsize {

namespace {

struct UnitEntry {
  std::string_view token;
  Dimension dimension;
  double scale;
};

constexpr double kLbm = 0.45359237;
constexpr double kFt = 0.3048;
constexpr double kNmi = 1852.0;
constexpr double kLbf = kLbm * kStandardGravity;
constexpr double kHp = 745.69987158227022;
constexpr double kWh = 3600.0;

constexpr std::array kUnits = {
    UnitEntry{"kg", Dimension::mass, 1.0},
    UnitEntry{"g", Dimension::mass, 1e-3},
    UnitEntry{"t", Dimension::mass, 1e3},
    UnitEntry{"lbm", Dimension::mass, kLbm},
    UnitEntry{"lb", Dimension::mass, kLbm},

    UnitEntry{"m", Dimension::length, 1.0},
    UnitEntry{"km", Dimension::length, 1e3},
    UnitEntry{"ft", Dimension::length, kFt},
    UnitEntry{"nmi", Dimension::length, kNmi},
    UnitEntry{"mi", Dimension::length, 1609.344},

    UnitEntry{"m/s", Dimension::speed, 1.0},
    UnitEntry{"km/h", Dimension::speed, 1.0 / 3.6},
    UnitEntry{"kt", Dimension::speed, kNmi / 3600.0},
    UnitEntry{"kts", Dimension::speed, kNmi / 3600.0},
    UnitEntry{"ft/s", Dimension::speed, kFt},
    UnitEntry{"ft/min", Dimension::speed, kFt / 60.0},

    UnitEntry{"s", Dimension::time, 1.0},
    UnitEntry{"min", Dimension::time, 60.0},
    UnitEntry{"h", Dimension::time, 3600.0},

    UnitEntry{"N/m2", Dimension::pressure, 1.0},
    UnitEntry{"N/m²", Dimension::pressure, 1.0},
    UnitEntry{"N/m^2", Dimension::pressure, 1.0},
    UnitEntry{"Pa", Dimension::pressure, 1.0},
    UnitEntry{"kPa", Dimension::pressure, 1e3},
    UnitEntry{"lbf/ft2", Dimension::pressure, kLbf / (kFt * kFt)},
    UnitEntry{"lbf/ft²", Dimension::pressure, kLbf / (kFt * kFt)},
    UnitEntry{"lbf/ft^2", Dimension::pressure, kLbf / (kFt * kFt)},

    UnitEntry{"N", Dimension::force, 1.0},
    UnitEntry{"kN", Dimension::force, 1e3},
    UnitEntry{"lbf", Dimension::force, kLbf},

    UnitEntry{"W", Dimension::power, 1.0},
    UnitEntry{"kW", Dimension::power, 1e3},
    UnitEntry{"MW", Dimension::power, 1e6},
    UnitEntry{"hp", Dimension::power, kHp},
    UnitEntry{"shp", Dimension::power, kHp},

    UnitEntry{"W/N", Dimension::power_to_weight, 1.0},
    UnitEntry{"kW/N", Dimension::power_to_weight, 1e3},
    UnitEntry{"hp/lbf", Dimension::power_to_weight, kHp / kLbf},

    UnitEntry{"J/kg", Dimension::specific_energy, 1.0},
    UnitEntry{"kJ/kg", Dimension::specific_energy, 1e3},
    UnitEntry{"MJ/kg", Dimension::specific_energy, 1e6},
    UnitEntry{"Wh/kg", Dimension::specific_energy, kWh},
    UnitEntry{"kWh/kg", Dimension::specific_energy, kWh * 1e3},

    UnitEntry{"W/kg", Dimension::specific_power, 1.0},
    UnitEntry{"kW/kg", Dimension::specific_power, 1e3},

    UnitEntry{"rad", Dimension::angle, 1.0},
    UnitEntry{"deg", Dimension::angle, std::numbers::pi / 180.0},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::mass: return "mass";
    case Dimension::length: return "length";
    case Dimension::speed: return "speed";
    case Dimension::time: return "time";
    case Dimension::pressure: return "pressure";
    case Dimension::force: return "force";
    case Dimension::power: return "power";
    case Dimension::power_to_weight: return "power-to-weight";
    case Dimension::specific_energy: return "specific energy";
    case Dimension::specific_power: return "specific power";
    case Dimension::angle: return "angle";
  }
  return "?";
}

std::string_view si_unit(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "";
    case Dimension::mass: return "kg";
    case Dimension::length: return "m";
    case Dimension::speed: return "m/s";
    case Dimension::time: return "s";
    case Dimension::pressure: return "N/m2";
    case Dimension::force: return "N";
    case Dimension::power: return "W";
    case Dimension::power_to_weight: return "W/N";
    case Dimension::specific_energy: return "J/kg";
    case Dimension::specific_power: return "W/kg";
    case Dimension::angle: return "rad";
  }
  return "";
}

double unit_scale(std::string_view unit, Dimension d, std::string_view key) {
  for (const auto& u : kUnits) {
    if (u.token == unit && u.dimension == d) return u.scale;
  }
  throw UnitError("key '" + std::string(key) + "': unit '" + std::string(unit) + "' is not a " +
                  std::string(dimension_name(d)) + " unit");
}

double parse_quantity(std::string_view text, Dimension d, std::string_view key) {
  text = trim(text);
  std::string buffer(text);
  char* end = nullptr;
  double number = std::strtod(buffer.c_str(), &end);
  if (end == buffer.c_str() || !std::isfinite(number)) {
    throw ParseError("key '" + std::string(key) + "': expected '<number> <unit>', got '" + buffer + "'");
  }
  std::string_view unit = trim(std::string_view(end));
  if (unit.empty()) return number;
  if (d == Dimension::dimensionless) {
    throw UnitError("key '" + std::string(key) + "': dimensionless value takes no unit, got '" +
                    std::string(unit) + "'");
  }
  return number * unit_scale(unit, d, key);
}

double read_quantity(TableReader& reader, std::string_view key, Dimension d) {
  const Value& v = reader.require(key);
  if (v.is_number()) return std::get<double>(v.data);
  if (!v.is_string()) reader.fail(key, "expected a number or a quantity string");
  try {
    return parse_quantity(std::get<std::string>(v.data), d, key);
  } catch (const UnitError& e) {
    throw UnitError(reader.context() + " (line " + std::to_string(v.line) + "): " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(reader.context() + " (line " + std::to_string(v.line) + "): " + e.what());
  }
}

}  // namespace fastsize

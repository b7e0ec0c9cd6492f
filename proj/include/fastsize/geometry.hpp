#pragma once
// Parametric wireframe of a sized aircraft for visualization only; nothing
// here feeds back into sizing.
//
// Body axes: x aft from the nose, y to starboard, z up. Lengths in metres.
//
// Fuselage length follows the transport-class power law
//   L_ft = a * W_lb^b,  a = 0.37, b = 0.51
// on MTOW (template-overridable); the diameter is L / fineness. The body is
// a cylinder with a nose cone over the first 15% and a tail cone over the last
// 25%. Tails are sized with volume coefficients on an arm of 0.45 L:
//   S_ht = c_ht * S * mac / l,   S_vt = c_vt * S * b / l.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fastsize/powertrain.hpp"
#include "fastsize/sizing.hpp"

namespace fastsize {

enum class EnginePlacement { wing_podded, aft_fuselage };

struct GeometryTemplate {
  std::string name = "template";
  double fuselage_fineness = 9.0;
  double wing_taper = 0.5;
  double wing_sweep_deg = 0.0;  // quarter-chord
  double tail_volume_horizontal = 0.9;
  double tail_volume_vertical = 0.08;
  EnginePlacement engine_placement = EnginePlacement::wing_podded;
  std::vector<double> podded_stations{0.3, 0.55, 0.75};  // semi-span fractions, one per pair
  bool centerline_propulsor = false;  // lets an odd count put one on the centerline
  double fuselage_length_coefficient = 0.37;
  double fuselage_length_exponent = 0.51;

  void validate() const;  // ValidationError
};

GeometryTemplate parse_template(std::string_view document);
GeometryTemplate read_template_file(const std::string& path);

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

using Polyline = std::vector<Point3>;

struct WireframePart {
  std::string name;
  std::vector<Polyline> lines;
};

struct Wireframe {
  std::vector<WireframePart> parts;
  double span = 0.0;
  double wing_area = 0.0;
  double aspect_ratio = 0.0;
  double fuselage_length = 0.0;
  double fuselage_diameter = 0.0;
  double root_chord = 0.0;
  double tip_chord = 0.0;
  double horizontal_tail_area = 0.0;
  double vertical_tail_area = 0.0;

  const WireframePart* find(std::string_view name) const;
  // Parts whose name starts with `prefix`.
  std::vector<const WireframePart*> parts_with_prefix(std::string_view prefix) const;
};

struct GeometryInputs {
  double wing_area = 0.0;     // m^2
  double aspect_ratio = 0.0;
  double mtow = 0.0;          // kg
  std::vector<std::string> propulsor_ids;
};

GeometryInputs geometry_inputs(const SizedAircraft& sized);
// From a sized report read back as a spec with [weights].
GeometryInputs geometry_inputs(const AircraftSpec& sized_spec);

// Part names: fuselage, wing, horizontal_tail, vertical_tail and one
// propulsor:<id> per propulsor. Throws ValidationError when the placement rule
// cannot take the propulsor count.
Wireframe generate_geometry(const GeometryInputs& inputs, const GeometryTemplate& tmpl);
Wireframe generate_geometry(const SizedAircraft& sized, const GeometryTemplate& tmpl);

// Planform area of the wing outline (shoelace on its x-y projection).
double wing_outline_area(const Wireframe& wf);
// Tip-to-tip distance of the wing outline.
double wing_outline_span(const Wireframe& wf);

enum class WireframeFormat { svg_three_view, obj };

// Accepts svg_three_view (or svg) and obj; ValidationError otherwise.
WireframeFormat wireframe_format_from(std::string_view token);

// Top, side and front orthographic views at one shared scale, with span,
// length and height annotations. Deterministic output.
std::string export_svg_three_view(const Wireframe& wf);
// `o` per part, `v` per point, `l` per polyline.
std::string export_obj(const Wireframe& wf);
std::string export_wireframe(const Wireframe& wf, WireframeFormat format);

}  // namespace fastsize

#include "fastsize/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "fastsize/error.hpp"

namespace fastsize {

namespace {

constexpr double kPoundsPerKg = 2.2046226218487757;
constexpr double kMetresPerFoot = 0.3048;
constexpr double kNoseFraction = 0.15;
constexpr double kTailConeFraction = 0.25;
constexpr double kTailArmFraction = 0.45;
constexpr double kWingQuarterChordStation = 0.4;  // fraction of fuselage length
constexpr double kPropulsorRadiusPerSpan = 0.07;

double deg(double d) { return d * std::numbers::pi / 180.0; }

// Trapezoidal lifting surface, planform in the x-y plane.
struct Planform {
  double span;  // tip to tip
  double root_chord;
  double tip_chord;
  double sweep_quarter_chord;  // rad
  double root_quarter_chord_x;

  double leading_edge_x(double semi_span_position) const {
    double chord = chord_at(semi_span_position);
    return root_quarter_chord_x + semi_span_position * std::tan(sweep_quarter_chord) - 0.25 * chord;
  }
  double chord_at(double y) const { return root_chord + (tip_chord - root_chord) * (y / (0.5 * span)); }
  double mean_aerodynamic_chord() const {
    double taper = tip_chord / root_chord;
    return 2.0 / 3.0 * root_chord * (1.0 + taper + taper * taper) / (1.0 + taper);
  }
};

Planform planform(double area, double aspect_ratio, double taper, double sweep, double root_qc_x) {
  Planform p;
  p.span = std::sqrt(aspect_ratio * area);
  p.root_chord = 2.0 * area / (p.span * (1.0 + taper));
  p.tip_chord = taper * p.root_chord;
  p.sweep_quarter_chord = sweep;
  p.root_quarter_chord_x = root_qc_x;
  return p;
}

// Closed outline of a symmetric horizontal surface at height z.
Polyline horizontal_outline(const Planform& p, double z) {
  const double h = 0.5 * p.span;
  const double le_tip = p.leading_edge_x(h);
  const double le_root = p.leading_edge_x(0.0);
  return {{le_tip, -h, z},
          {le_root, 0.0, z},
          {le_tip, h, z},
          {le_tip + p.tip_chord, h, z},
          {le_root + p.root_chord, 0.0, z},
          {le_tip + p.tip_chord, -h, z},
          {le_tip, -h, z}};
}

WireframePart fuselage(double length, double radius) {
  WireframePart part{"fuselage", {}};
  const double x_nose = kNoseFraction * length;
  const double x_tail = (1.0 - kTailConeFraction) * length;
  constexpr int kStringers = 8;
  for (int k = 0; k < kStringers; ++k) {
    double a = 2.0 * std::numbers::pi * k / kStringers;
    double c = std::cos(a), s = std::sin(a);
    part.lines.push_back({{0.0, 0.0, 0.0}, {x_nose, radius * s, radius * c}, {x_tail, radius * s, radius * c},
                          {length, 0.0, 0.0}});
  }
  constexpr int kRing = 24;
  for (double x : {x_nose, 0.5 * length, x_tail}) {
    Polyline ring;
    for (int k = 0; k <= kRing; ++k) {
      double a = 2.0 * std::numbers::pi * (k % kRing) / kRing;
      ring.push_back({x, radius * std::sin(a), radius * std::cos(a)});
    }
    part.lines.push_back(std::move(ring));
  }
  return part;
}

// Disk facing forward at (x, y, z).
WireframePart propulsor(const std::string& id, double x, double y, double z, double radius) {
  constexpr int kPoints = 16;
  Polyline disk;
  for (int k = 0; k <= kPoints; ++k) {
    double a = 2.0 * std::numbers::pi * (k % kPoints) / kPoints;
    disk.push_back({x, y + radius * std::sin(a), z + radius * std::cos(a)});
  }
  return {"propulsor:" + id, {std::move(disk), {{x, y, z}, {x + radius, y, z}}}};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void GeometryTemplate::validate() const {
  if (!(fuselage_fineness > 1.0)) throw ValidationError("template: fuselage_fineness must be > 1");
  if (!(wing_taper > 0.0 && wing_taper <= 1.0)) throw ValidationError("template: wing_taper must be in (0, 1]");
  if (!(std::abs(wing_sweep_deg) < 70.0)) throw ValidationError("template: wing_sweep must be within +-70 deg");
  if (!(tail_volume_horizontal > 0.0) || !(tail_volume_vertical > 0.0)) {
    throw ValidationError("template: tail volume coefficients must be > 0");
  }
  for (double s : podded_stations) {
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("template: podded stations must be in (0, 1)");
  }
  if (!(fuselage_length_coefficient > 0.0) || !(fuselage_length_exponent > 0.0)) {
    throw ValidationError("template: fuselage length coefficients must be > 0");
  }
}

GeometryTemplate parse_template(std::string_view document) {
  Table root = parse_document(document);
  TableReader r(root, "template");
  check_schema_version(r);
  GeometryTemplate t;
  t.name = r.string_or("name", t.name);
  if (r.has("fuselage_fineness")) t.fuselage_fineness = read_quantity(r, "fuselage_fineness", Dimension::dimensionless);
  if (r.has("wing_taper")) t.wing_taper = read_quantity(r, "wing_taper", Dimension::dimensionless);
  if (r.has("wing_sweep")) t.wing_sweep_deg = read_quantity(r, "wing_sweep", Dimension::angle) * 180.0 / std::numbers::pi;
  if (r.has("tail_volume_horizontal")) {
    t.tail_volume_horizontal = read_quantity(r, "tail_volume_horizontal", Dimension::dimensionless);
  }
  if (r.has("tail_volume_vertical")) {
    t.tail_volume_vertical = read_quantity(r, "tail_volume_vertical", Dimension::dimensionless);
  }
  if (r.has("engine_placement")) {
    std::string p = r.require_string("engine_placement");
    if (p == "wing_podded") {
      t.engine_placement = EnginePlacement::wing_podded;
    } else if (p == "aft_fuselage") {
      t.engine_placement = EnginePlacement::aft_fuselage;
    } else {
      r.fail("engine_placement", "expected wing_podded or aft_fuselage, got '" + p + "'");
    }
  }
  if (const Value* v = r.get("podded_stations")) {
    const auto* arr = std::get_if<Array>(&v->data);
    if (!arr) r.fail("podded_stations", "expected an array of semi-span fractions");
    t.podded_stations.clear();
    for (const auto& e : *arr) {
      if (!e.is_number()) r.fail("podded_stations", "expected numbers");
      t.podded_stations.push_back(std::get<double>(e.data));
    }
  }
  t.centerline_propulsor = r.bool_or("centerline_propulsor", t.centerline_propulsor);
  if (r.has("fuselage_length_coefficient")) t.fuselage_length_coefficient = r.require_number("fuselage_length_coefficient");
  if (r.has("fuselage_length_exponent")) t.fuselage_length_exponent = r.require_number("fuselage_length_exponent");
  r.finish();
  t.validate();
  return t;
}

GeometryTemplate read_template_file(const std::string& path) {
  try {
    return parse_template(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

const WireframePart* Wireframe::find(std::string_view name) const {
  for (const auto& p : parts) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::vector<const WireframePart*> Wireframe::parts_with_prefix(std::string_view prefix) const {
  std::vector<const WireframePart*> out;
  for (const auto& p : parts) {
    if (std::string_view(p.name).substr(0, prefix.size()) == prefix) out.push_back(&p);
  }
  return out;
}

GeometryInputs geometry_inputs(const SizedAircraft& sized) {
  GeometryInputs in;
  in.wing_area = sized.wing_area;
  in.aspect_ratio = sized.spec.aspect_ratio.value_or(0.0);
  in.mtow = sized.mtow;
  for (std::size_t s : sized.arch.sinks()) in.propulsor_ids.push_back(sized.arch.component(s).id);
  return in;
}

GeometryInputs geometry_inputs(const AircraftSpec& spec) {
  if (!spec.weights) throw ValidationError("sized aircraft file has no [weights] section");
  if (!spec.aspect_ratio) throw ValidationError("sized aircraft file has no aspect_ratio");
  GeometryInputs in;
  in.mtow = spec.weights->mtow;
  in.wing_area = spec.weights->wing_area.value_or(spec.weights->mtow * kStandardGravity / spec.wing_loading);
  in.aspect_ratio = *spec.aspect_ratio;
  in.propulsor_ids = spec.weights->propulsors;
  return in;
}

Wireframe generate_geometry(const GeometryInputs& in, const GeometryTemplate& t) {
  t.validate();
  if (!(in.wing_area > 0.0) || !(in.aspect_ratio > 0.0) || !(in.mtow > 0.0)) {
    throw ValidationError("geometry needs positive wing area, aspect ratio and MTOW");
  }
  Wireframe wf;
  wf.wing_area = in.wing_area;
  wf.aspect_ratio = in.aspect_ratio;
  wf.fuselage_length =
      t.fuselage_length_coefficient * std::pow(in.mtow * kPoundsPerKg, t.fuselage_length_exponent) * kMetresPerFoot;
  wf.fuselage_diameter = wf.fuselage_length / t.fuselage_fineness;
  const double length = wf.fuselage_length;
  const double radius = 0.5 * wf.fuselage_diameter;

  const double wing_qc_x = kWingQuarterChordStation * length;
  Planform wing = planform(in.wing_area, in.aspect_ratio, t.wing_taper, deg(t.wing_sweep_deg), wing_qc_x);
  wf.span = wing.span;
  wf.root_chord = wing.root_chord;
  wf.tip_chord = wing.tip_chord;

  const double arm = kTailArmFraction * length;
  const double tail_qc_x = wing_qc_x + arm;
  wf.horizontal_tail_area = t.tail_volume_horizontal * in.wing_area * wing.mean_aerodynamic_chord() / arm;
  wf.vertical_tail_area = t.tail_volume_vertical * in.wing_area * wing.span / arm;
  Planform htail = planform(wf.horizontal_tail_area, 4.5, 0.5, deg(20.0), tail_qc_x);

  wf.parts.push_back(fuselage(length, radius));
  wf.parts.push_back({"wing", {horizontal_outline(wing, 0.0)}});
  const double check = wf.span * wf.span / wing_outline_area(wf);
  if (std::abs(check - in.aspect_ratio) > 1e-9 * in.aspect_ratio) {
    throw Error("internal: wing outline aspect ratio " + std::to_string(check) + " differs from " +
                std::to_string(in.aspect_ratio));
  }
  wf.parts.push_back({"horizontal_tail", {horizontal_outline(htail, 0.3 * radius)}});
  {
    // Fin: root on the fuselage top, height from aspect ratio 1.5.
    const double height = std::sqrt(1.5 * wf.vertical_tail_area);
    const double root = 2.0 * wf.vertical_tail_area / (height * 1.5);
    const double tip = 0.5 * root;
    const double sweep = std::tan(deg(35.0));
    const double le_root = tail_qc_x - 0.25 * root;
    const double le_tip = tail_qc_x + height * sweep - 0.25 * tip;
    wf.parts.push_back({"vertical_tail",
                        {{{le_root, 0.0, radius},
                          {le_tip, 0.0, radius + height},
                          {le_tip + tip, 0.0, radius + height},
                          {le_root + root, 0.0, radius},
                          {le_root, 0.0, radius}}}});
  }

  const std::size_t n = in.propulsor_ids.size();
  const double prop_radius = kPropulsorRadiusPerSpan * wing.span;
  std::size_t next = 0;
  if (n == 1) {
    wf.parts.push_back(propulsor(in.propulsor_ids[0], -0.02 * length, 0.0, 0.0, prop_radius));
    return wf;
  }
  if (n % 2 == 1) {
    if (!t.centerline_propulsor) {
      throw ValidationError("template '" + t.name + "' cannot place " + std::to_string(n) +
                            " propulsors: an odd count needs centerline_propulsor = true");
    }
    const double x = t.engine_placement == EnginePlacement::wing_podded ? -0.02 * length : 1.02 * length;
    wf.parts.push_back(propulsor(in.propulsor_ids[next++], x, 0.0, 0.0, prop_radius));
  }
  const std::size_t pairs = (n - next) / 2;
  if (t.engine_placement == EnginePlacement::wing_podded) {
    if (pairs > t.podded_stations.size()) {
      throw ValidationError("template '" + t.name + "' has " + std::to_string(t.podded_stations.size()) +
                            " podded stations for " + std::to_string(pairs) + " propulsor pairs");
    }
    for (std::size_t k = 0; k < pairs; ++k) {
      const double y = t.podded_stations[k] * 0.5 * wing.span;
      const double x = wing.leading_edge_x(y) - 0.3 * wing.chord_at(y);
      wf.parts.push_back(propulsor(in.propulsor_ids[next++], x, -y, 0.0, prop_radius));
      wf.parts.push_back(propulsor(in.propulsor_ids[next++], x, y, 0.0, prop_radius));
    }
  } else {
    const double aft_radius = std::min(prop_radius, 0.6 * radius);
    const double y = radius + 1.2 * aft_radius;
    for (std::size_t k = 0; k < pairs; ++k) {
      const double x = 0.7 * length - 2.5 * aft_radius * static_cast<double>(k);
      wf.parts.push_back(propulsor(in.propulsor_ids[next++], x, -y, 0.5 * radius, aft_radius));
      wf.parts.push_back(propulsor(in.propulsor_ids[next++], x, y, 0.5 * radius, aft_radius));
    }
  }

  return wf;
}

Wireframe generate_geometry(const SizedAircraft& sized, const GeometryTemplate& tmpl) {
  return generate_geometry(geometry_inputs(sized), tmpl);
}

double wing_outline_area(const Wireframe& wf) {
  const WireframePart* wing = wf.find("wing");
  if (!wing || wing->lines.empty()) return 0.0;
  const Polyline& p = wing->lines.front();
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) twice += p[i].x * p[i + 1].y - p[i + 1].x * p[i].y;
  return std::abs(0.5 * twice);
}

double wing_outline_span(const Wireframe& wf) {
  const WireframePart* wing = wf.find("wing");
  if (!wing) return 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& line : wing->lines) {
    for (const auto& q : line) {
      lo = std::min(lo, q.y);
      hi = std::max(hi, q.y);
    }
  }
  return hi - lo;
}

WireframeFormat wireframe_format_from(std::string_view token) {
  if (token == "svg_three_view" || token == "svg") return WireframeFormat::svg_three_view;
  if (token == "obj") return WireframeFormat::obj;
  throw ValidationError("unsupported wireframe format '" + std::string(token) + "' (expected svg_three_view or obj)");
}

std::string export_svg_three_view(const Wireframe& wf) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymax = 0.0, zmin = xmin, zmax = -xmin;
  for (const auto& part : wf.parts) {
    for (const auto& line : part.lines) {
      for (const auto& q : line) {
        xmin = std::min(xmin, q.x);
        xmax = std::max(xmax, q.x);
        ymax = std::max(ymax, std::abs(q.y));
        zmin = std::min(zmin, q.z);
        zmax = std::max(zmax, q.z);
      }
    }
  }
  const double lx = xmax - xmin, ly = 2.0 * ymax, lz = zmax - zmin;
  const double scale = 420.0 / std::max({lx, ly, lz, 1e-9});  // px per metre, shared by all views
  constexpr double kMargin = 50.0;
  constexpr double kGap = 70.0;

  // View origins (top-left of each view's box, in px).
  const double top_x = kMargin, top_y = kMargin;
  const double side_x = kMargin, side_y = top_y + scale * ly + kGap;
  const double front_x = top_x + scale * lx + kGap, front_y = kMargin;
  const double front_cx = front_x + scale * ymax;
  const double width = front_x + scale * ly + kMargin;
  const double height = std::max(side_y + scale * lz, front_y + scale * lz) + kMargin;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.0f", width) << "\" height=\""
      << fmt("%.0f", height) << "\" viewBox=\"0 0 " << fmt("%.0f", width) << ' ' << fmt("%.0f", height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  enum class View { top, side, front };
  auto project = [&](View v, const Point3& q) -> std::pair<double, double> {
    switch (v) {
      case View::top: return {top_x + scale * (q.x - xmin), top_y + scale * (q.y + ymax)};
      case View::side: return {side_x + scale * (q.x - xmin), side_y + scale * (zmax - q.z)};
      case View::front: return {front_cx + scale * q.y, front_y + scale * (zmax - q.z)};
    }
    return {0.0, 0.0};
  };
  auto emit_view = [&](View v, const char* id, const char* title, double tx, double ty) {
    out << "<g id=\"" << id << "\" fill=\"none\" stroke=\"#1f3a5f\" stroke-width=\"1\">\n";
    out << "<text x=\"" << fmt("%.3f", tx) << "\" y=\"" << fmt("%.3f", ty - 12.0)
        << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"black\" stroke=\"none\">" << title << "</text>\n";
    for (const auto& part : wf.parts) {
      out << "<g data-part=\"" << xml_escape(part.name) << "\">\n";
      for (const auto& line : part.lines) {
        out << "<polyline points=\"";
        for (std::size_t i = 0; i < line.size(); ++i) {
          auto [px, py] = project(v, line[i]);
          out << (i ? " " : "") << fmt("%.3f", px) << ',' << fmt("%.3f", py);
        }
        out << "\"/>\n";
      }
      out << "</g>\n";
    }
    out << "</g>\n";
  };
  emit_view(View::top, "top-view", "top", top_x, top_y);
  emit_view(View::side, "side-view", "side", side_x, side_y);
  emit_view(View::front, "front-view", "front", front_x, front_y);

  // Dimension annotations.
  auto dimension = [&](double x1, double y1, double x2, double y2, double lx_, double ly_, const std::string& label) {
    out << "<line x1=\"" << fmt("%.3f", x1) << "\" y1=\"" << fmt("%.3f", y1) << "\" x2=\"" << fmt("%.3f", x2)
        << "\" y2=\"" << fmt("%.3f", y2) << "\" stroke=\"#b03030\" stroke-width=\"0.8\"/>\n";
    out << "<text x=\"" << fmt("%.3f", lx_) << "\" y=\"" << fmt("%.3f", ly_)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#b03030\">" << xml_escape(label) << "</text>\n";
  };
  out << "<g id=\"dimensions\">\n";
  {
    const double x = top_x + scale * lx + 12.0;
    dimension(x, top_y + scale * (ymax - 0.5 * wf.span), x, top_y + scale * (ymax + 0.5 * wf.span), x + 4.0,
              top_y + scale * ymax, "span " + fmt("%.2f", wf.span) + " m");
  }
  {
    const double y = side_y + scale * lz + 16.0;
    dimension(side_x, y, side_x + scale * lx, y, side_x, y + 14.0, "length " + fmt("%.2f", lx) + " m");
  }
  {
    const double x = front_cx + scale * ymax + 12.0;
    dimension(x, front_y, x, front_y + scale * lz, x + 4.0, front_y + 0.5 * scale * lz,
              "height " + fmt("%.2f", lz) + " m");
  }
  out << "<text x=\"" << fmt("%.3f", kMargin) << "\" y=\"" << fmt("%.3f", height - 16.0)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">wing area " << fmt("%.2f", wf.wing_area)
      << " m2, aspect ratio " << fmt("%.2f", wf.aspect_ratio) << ", scale " << fmt("%.3f", scale)
      << " px/m</text>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string export_obj(const Wireframe& wf) {
  std::ostringstream out;
  out << "# wireframe, metres; x aft, y starboard, z up\n";
  std::size_t index = 1;
  for (const auto& part : wf.parts) {
    out << "o " << part.name << '\n';
    for (const auto& line : part.lines) {
      const std::size_t first = index;
      for (const auto& q : line) {
        out << "v " << fmt("%.10g", q.x) << ' ' << fmt("%.10g", q.y) << ' ' << fmt("%.10g", q.z) << '\n';
        ++index;
      }
      out << 'l';
      for (std::size_t i = first; i < index; ++i) out << ' ' << i;
      out << '\n';
    }
  }
  return out.str();
}

std::string export_wireframe(const Wireframe& wf, WireframeFormat format) {
  return format == WireframeFormat::obj ? export_obj(wf) : export_svg_three_view(wf);
}

}  // namespace fastsize

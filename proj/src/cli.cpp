#include "fastsize/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fastsize/database.hpp"
#include "fastsize/error.hpp"
#include "fastsize/geometry.hpp"
#include "fastsize/mission.hpp"
#include "fastsize/model.hpp"
#include "fastsize/plot.hpp"
#include "fastsize/powertrain.hpp"
#include "fastsize/regression.hpp"
#include "fastsize/report.hpp"
#include "fastsize/sizing.hpp"

namespace fastsize {

namespace {

namespace fs = std::filesystem;

struct SizeArgs {
  std::string aircraft, mission, arch, out_dir = ".", format = "text", db;
  double tolerance = 1e-6;
  int max_iter = 100;
  double dt_max = 10.0;
  double relaxation = 1.0;
  std::optional<double> initial_mtow;
};

struct FlyArgs {
  std::string aircraft, mission, arch, out_dir = ".";
  double dt_max = 10.0;
};

struct PredictArgs {
  std::string db, inputs, output, mode = "gaussian_process", type;
};

struct PlotArgs {
  std::string history, out, title = "mission history";
};

struct VizArgs {
  std::string sized, tmpl, out, format;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.12g", v); }

MissionProfile load_mission(const std::string& path) {
  MissionProfile profile = read_mission_file(path);
  auto violations = validate_mission(profile);
  if (!violations.empty()) {
    std::string msg = path + ": invalid mission";
    for (const auto& v : violations) msg += "\n  segment " + std::to_string(v.segment_index) + ": " + v.message;
    throw ValidationError(msg);
  }
  return profile;
}

HistoricalDatabase load_db(const std::string& flag) {
  return load_database(flag.empty() ? default_database_directory() : flag);
}

bool needs_database(const AircraftSpec& spec, const PropArchitecture& arch) {
  if (!spec.missing_fields().empty()) return true;
  for (const auto& c : arch.components()) {
    if (c.kind == ComponentKind::gas_turbine && !c.specific_power) return true;
  }
  return false;
}

std::string join(const fs::path& dir, const char* name) { return (dir / name).string(); }

int cmd_size(const SizeArgs& a, std::ostream& out, std::ostream& err) {
  AircraftSpec spec = read_spec_file(a.aircraft);
  MissionProfile profile = load_mission(a.mission);
  PropArchitecture arch = read_architecture_file(a.arch);
  spec.weights.reset();

  SizingOptions options;
  options.tolerance = a.tolerance;
  options.max_iterations = a.max_iter;
  options.relaxation = a.relaxation;
  options.initial_mtow_guess = a.initial_mtow;
  options.mission.dt_max = a.dt_max;
  options.validate();

  std::optional<HistoricalDatabase> db;
  if (needs_database(spec, arch)) db = load_db(a.db);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  SizedAircraft sized;
  try {
    sized = size_aircraft(spec, profile, arch, db ? &*db : nullptr, options);
  } catch (const SizingError& e) {
    write_file(join(dir, "iterations.csv"), iterations_csv(e.log()));
    throw;
  }
  for (const auto& w : sized.warnings) err << "warning: " << w << "\n";

  const std::string text = sized_report_text(sized);
  const std::string structured = sized_report_structured(sized);
  RunManifest manifest;
  manifest.tool_version = std::string(kToolVersion);
  manifest.command = "size";
  manifest.timestamp = utc_timestamp();
  manifest.options = {{"tolerance", num(a.tolerance)},
                      {"max_iterations", std::to_string(a.max_iter)},
                      {"dt_max", num(a.dt_max)},
                      {"relaxation", num(a.relaxation)},
                      {"format", a.format}};
  if (a.initial_mtow) manifest.options.emplace_back("initial_mtow", num(*a.initial_mtow));
  manifest.add_input(a.aircraft);
  manifest.add_input(a.mission);
  manifest.add_input(a.arch);
  if (db) {
    const std::string dbdir = a.db.empty() ? default_database_directory() : a.db;
    manifest.add_input(join(fs::path(dbdir), "aircraft.csv"));
    manifest.add_input(join(fs::path(dbdir), "engines.csv"));
  }
  for (auto [name, bytes] : std::vector<std::pair<const char*, std::string>>{
           {"sized.txt", text},
           {"sized.toml", structured},
           {"history.csv", history_csv(sized.mission.history)},
           {"iterations.csv", iterations_csv(sized.iteration_log)}}) {
    write_file(join(dir, name), bytes);
    manifest.add_output(join(dir, name));
  }
  write_file(join(dir, "manifest.toml"), write_manifest(manifest));

  out << (a.format == "structured" ? structured : text);
  return kExitOk;
}

int cmd_fly(const FlyArgs& a, std::ostream& out, std::ostream&) {
  AircraftSpec spec = read_spec_file(a.aircraft);
  MissionProfile profile = load_mission(a.mission);
  PropArchitecture arch = read_architecture_file(a.arch);
  if (!spec.weights) {
    throw ValidationError(a.aircraft + ": fly needs a [weights] section with mtow and loaded fuel/battery masses");
  }
  check_sources_declared(arch, spec);
  MissionAircraft aircraft = mission_aircraft(spec, spec.weights->mtow);
  aircraft.fuel_loaded = spec.weights->fuel;
  aircraft.battery_mass = spec.weights->battery;
  MissionOptions options;
  options.dt_max = a.dt_max;
  if (!(options.dt_max > 0.0)) throw ValidationError("dt_max must be > 0");

  MissionResult result = fly_mission(aircraft, profile, arch, options);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_file(join(dir, "history.csv"), history_csv(result.history));
  RunManifest manifest;
  manifest.tool_version = std::string(kToolVersion);
  manifest.command = "fly";
  manifest.timestamp = utc_timestamp();
  manifest.options = {{"dt_max", num(a.dt_max)}};
  manifest.add_input(a.aircraft);
  manifest.add_input(a.mission);
  manifest.add_input(a.arch);
  manifest.add_output(join(dir, "history.csv"));
  write_file(join(dir, "manifest.toml"), write_manifest(manifest));

  out << "flew " << spec.name << " at " << fmt("%.3f", spec.weights->mtow) << " kg\n";
  out << "  design distance " << fmt("%.3f", result.design_distance / 1e3) << " km, reserve distance "
      << fmt("%.3f", result.reserve_distance / 1e3) << " km\n";
  for (const auto& [id, kg] : result.fuel_per_source) {
    out << "  fuel " << id << ": " << fmt("%.6f", kg) << " kg burned of "
        << fmt("%.6f", spec.weights->fuel.count(id) ? spec.weights->fuel.at(id) : 0.0) << " kg\n";
  }
  for (const auto& [id, j] : result.energy_per_source) {
    out << "  energy " << id << ": " << fmt("%.6e", j) << " J\n";
  }
  out << "  landing mass " << fmt("%.3f", result.end.mass) << " kg\n";
  return kExitOk;
}

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream&) {
  DataTable table = load_table(a.db);
  if (!a.type.empty()) table = table.filtered_by_type(a.type);
  auto mode = regression_mode_from(a.mode);
  if (!mode) throw ValidationError("unknown regression mode '" + a.mode + "' (expected power_law or gp)");

  std::vector<std::string> columns;
  std::vector<double> values;
  std::string_view rest = a.inputs;
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ValidationError("--input expects col=value[,col=value...]");
    columns.emplace_back(item.substr(0, eq));
    std::string value(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      values.push_back(std::stod(value, &used));
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ValidationError("--input: '" + value + "' is not a number");
    }
  }
  if (columns.empty()) throw ValidationError("--input expects at least one col=value");
  RegressionModel model = fit(table, columns, a.output, *mode);
  Prediction p = model.predict(values);
  out << a.output << " = " << fmt("%.6g", p.mean) << " ± " << fmt("%.6g", p.std) << "  ("
      << to_string(model.mode()) << ", " << model.rows_used() << " rows)\n";
  return kExitOk;
}

int cmd_plot(const PlotArgs& a, std::ostream& out, std::ostream&) {
  HistoryTable table = parse_history_csv(read_text_file(a.history));
  write_file(a.out, plot_history_svg(table, a.title));
  RunManifest manifest;
  manifest.tool_version = std::string(kToolVersion);
  manifest.command = "plot";
  manifest.timestamp = utc_timestamp();
  manifest.options = {{"title", a.title}};
  manifest.add_input(a.history);
  manifest.add_output(a.out);
  write_file(a.out + ".manifest.toml", write_manifest(manifest));
  out << "wrote " << a.out << " (" << table.rows.size() << " samples)\n";
  return kExitOk;
}

int cmd_viz(const VizArgs& a, std::ostream& out, std::ostream&) {
  std::string token = a.format;
  if (token.empty()) {
    const std::string ext = fs::path(a.out).extension().string();
    token = ext == ".obj" ? "obj" : ext == ".svg" ? "svg_three_view" : ext;
  }
  const WireframeFormat format = wireframe_format_from(token);
  AircraftSpec sized = read_spec_file(a.sized);
  GeometryTemplate tmpl = read_template_file(a.tmpl);
  Wireframe wf = generate_geometry(geometry_inputs(sized), tmpl);
  write_file(a.out, export_wireframe(wf, format));
  RunManifest manifest;
  manifest.tool_version = std::string(kToolVersion);
  manifest.command = "viz";
  manifest.timestamp = utc_timestamp();
  manifest.options = {{"format", format == WireframeFormat::obj ? "obj" : "svg_three_view"}};
  manifest.add_input(a.sized);
  manifest.add_input(a.tmpl);
  manifest.add_output(a.out);
  write_file(a.out + ".manifest.toml", write_manifest(manifest));
  out << "wrote " << a.out << ": span " << fmt("%.2f", wf.span) << " m, length " << fmt("%.2f", wf.fuselage_length)
      << " m, " << wf.parts_with_prefix("propulsor:").size() << " propulsors\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Aircraft sizing engine: regressions, powertrain graphs, mission analysis, fixed-point sizing",
               "fastsize"};
  app.set_version_flag("--version", "fastsize " + std::string(kToolVersion));
  app.require_subcommand(1);

  SizeArgs size_args;
  auto* size = app.add_subcommand("size", "Size an aircraft on a design mission");
  size->add_option("--aircraft", size_args.aircraft, "Aircraft spec file")->required()->check(CLI::ExistingFile);
  size->add_option("--mission", size_args.mission, "Mission profile file")->required()->check(CLI::ExistingFile);
  size->add_option("--arch", size_args.arch, "Propulsion architecture file")->required()->check(CLI::ExistingFile);
  size->add_option("--out-dir", size_args.out_dir, "Output directory")->capture_default_str();
  size->add_option("--tolerance", size_args.tolerance, "Relative MTOW convergence tolerance")->capture_default_str();
  size->add_option("--max-iter", size_args.max_iter, "Maximum fixed-point iterations")->capture_default_str();
  size->add_option("--dt-max", size_args.dt_max, "Maximum integration step [s]")->capture_default_str();
  size->add_option("--relaxation", size_args.relaxation, "Relaxation factor in (0, 1]")->capture_default_str();
  size->add_option("--initial-mtow", size_args.initial_mtow, "Initial MTOW guess [kg]");
  size->add_option("--format", size_args.format, "Report printed on stdout")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  size->add_option("--db", size_args.db, "Historical database directory (default: bundled or $FASTSIZE_DB)");

  FlyArgs fly_args;
  auto* fly = app.add_subcommand("fly", "Fly a fixed aircraft (spec with [weights]) on a mission");
  fly->add_option("--aircraft", fly_args.aircraft, "Aircraft spec with [weights]")->required()->check(CLI::ExistingFile);
  fly->add_option("--mission", fly_args.mission, "Mission profile file")->required()->check(CLI::ExistingFile);
  fly->add_option("--arch", fly_args.arch, "Propulsion architecture file")->required()->check(CLI::ExistingFile);
  fly->add_option("--out-dir", fly_args.out_dir, "Output directory")->capture_default_str();
  fly->add_option("--dt-max", fly_args.dt_max, "Maximum integration step [s]")->capture_default_str();

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "Fit a regression on a database table and predict one point");
  predict->add_option("--db", predict_args.db, "Database CSV file")->required()->check(CLI::ExistingFile);
  predict->add_option("--input", predict_args.inputs, "Inputs as col=value[,col=value...]")->required();
  predict->add_option("--output", predict_args.output, "Output column")->required();
  predict->add_option("--mode", predict_args.mode, "power_law or gaussian_process (gp)")->capture_default_str();
  predict->add_option("--type", predict_args.type, "Only rows whose type column matches");

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "Plot a mission history CSV as a five-panel SVG");
  plot->add_option("--history", plot_args.history, "history.csv")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_args.out, "Output SVG")->required();
  plot->add_option("--title", plot_args.title, "Plot title")->capture_default_str();

  VizArgs viz_args;
  auto* viz = app.add_subcommand("viz", "Export a wireframe of a sized aircraft (SVG three-view or OBJ)");
  viz->add_option("--sized", viz_args.sized, "sized.toml from `size`")->required()->check(CLI::ExistingFile);
  viz->add_option("--template", viz_args.tmpl, "Geometry template file")->required()->check(CLI::ExistingFile);
  viz->add_option("--out", viz_args.out, "Output file (.svg or .obj)")->required();
  viz->add_option("--format", viz_args.format, "svg_three_view or obj (default: from the extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*size) return cmd_size(size_args, out, err);
    if (*fly) return cmd_fly(fly_args, out, err);
    if (*predict) return cmd_predict(predict_args, out, err);
    if (*plot) return cmd_plot(plot_args, out, err);
    if (*viz) return cmd_viz(viz_args, out, err);
  } catch (const SizingError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSizing;
  } catch (const MissionError& e) {
    err << "error: mission infeasible: " << e.what() << "\n";
    return kExitMission;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: unexpected failure: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace fastsize

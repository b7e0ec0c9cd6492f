#include "fastsize/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "fastsize/error.hpp"

namespace fastsize {

namespace {

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string line(const std::string& label, const std::string& value) {
  std::string out = "  " + label;
  out.append(out.size() < 32 ? 32 - out.size() : 1, ' ');
  return out + value + "\n";
}

}  // namespace

std::string sized_report_text(const SizedAircraft& s) {
  std::ostringstream out;
  out << "sized aircraft: " << s.spec.name << "\n";
  out << "architecture:   " << s.arch.name() << "\n\n";

  out << "mass breakdown\n";
  out << line("MTOW", fmt("%.3f kg", s.mtow));
  out << line("payload + crew", fmt("%.3f kg", s.payload_and_crew));
  out << line("airframe", fmt("%.3f kg", s.airframe_mass));
  for (const auto& [id, kg] : s.propulsion_masses) out << line("propulsion " + id, fmt("%.3f kg", kg));
  for (const auto& [id, kg] : s.fuel_mass) out << line("fuel " + id, fmt("%.3f kg", kg));
  for (const auto& [id, kg] : s.battery_mass) out << line("battery " + id, fmt("%.3f kg", kg));
  out << line("empty weight fraction", fmt("%.6f", *s.spec.empty_weight_fraction));
  out << line("mass closure error", fmt("%.3e", s.closure_error()));
  out << "\n";

  out << "geometry and rating\n";
  out << line("wing area", fmt("%.3f m2", s.wing_area));
  out << line("wing loading", fmt("%.1f N/m2", s.spec.wing_loading));
  if (s.installed_power) out << line("installed power", fmt("%.1f kW", *s.installed_power / 1e3));
  if (s.installed_thrust) out << line("installed thrust", fmt("%.1f kN", *s.installed_thrust / 1e3));
  out << "\n";

  out << "mission\n";
  out << line("design distance", fmt("%.1f km", s.mission.design_distance / 1e3));
  out << line("design range (spec)", fmt("%.1f km", s.spec.design_range / 1e3));
  out << line("reserve distance", fmt("%.1f km", s.mission.reserve_distance / 1e3));
  if (!s.mission.history.samples.empty()) {
    out << line("block time", fmt("%.1f min", s.mission.history.samples.back().time / 60.0));
  }
  for (const auto& [id, j] : s.mission.energy_per_source) out << line("energy " + id, fmt("%.4f GJ", j / 1e9));
  if (s.mission.idle_clamp_events > 0) {
    out << line("idle-clamped steps", std::to_string(s.mission.idle_clamp_events));
  }
  out << "\n";

  if (!s.regressed.empty()) {
    out << "regressed\n";
    for (const auto& r : s.regressed) {
      out << line(r.field, fmt("%.6g", r.value) + fmt(" +- %.3g", r.std) + " (" + r.method + ", " +
                               std::to_string(r.rows_used) + " rows)");
    }
    out << "\n";
  }
  if (!s.warnings.empty()) {
    out << "warnings\n";
    for (const auto& w : s.warnings) out << "  " << w << "\n";
    out << "\n";
  }

  out << "iterations (" << s.iteration_log.size() << ")\n";
  out << "  iter        mtow [kg]    computed [kg]     residual\n";
  for (const auto& r : s.iteration_log) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %4d %16.6f %16.6f %12.4e\n", r.iteration, r.mtow, r.computed, r.residual);
    out << buf;
  }
  return out.str();
}

Table sized_report_table(const SizedAircraft& s) {
  Table root = spec_to_table(s.loaded_spec());

  Table conv;
  conv.set("converged", true);
  conv.set("iterations", static_cast<int>(s.iteration_log.size()));
  conv.set("final_residual", s.iteration_log.empty() ? 0.0 : s.iteration_log.back().residual);
  conv.set("closure_error", s.closure_error());
  conv.set("initial_guess", s.initial_guess);
  conv.set("design_distance", s.mission.design_distance);
  conv.set("reserve_distance", s.mission.reserve_distance);
  if (s.installed_power) conv.set("installed_power", *s.installed_power);
  if (s.installed_thrust) conv.set("installed_thrust", *s.installed_thrust);
  Array warnings;
  for (const auto& w : s.warnings) warnings.emplace_back(w);
  conv.set("warnings", std::move(warnings));
  root.set("convergence", std::move(conv));

  Array iterations;
  for (const auto& r : s.iteration_log) {
    Table t;
    t.set("iteration", r.iteration);
    t.set("mtow", r.mtow);
    t.set("computed", r.computed);
    t.set("residual", r.residual);
    iterations.emplace_back(std::move(t));
  }
  root.set("iteration", std::move(iterations));

  Array regressed;
  for (const auto& r : s.regressed) {
    Table t;
    t.set("field", r.field);
    t.set("value", r.value);
    t.set("std", r.std);
    t.set("rows_used", r.rows_used);
    t.set("method", r.method);
    regressed.emplace_back(std::move(t));
  }
  root.set("regressed", std::move(regressed));
  return root;
}

std::string sized_report_structured(const SizedAircraft& sized) { return write_document(sized_report_table(sized)); }

std::string iterations_csv(const std::vector<IterationRecord>& log) {
  std::string out = "iteration,mtow_kg,computed_kg,residual\n";
  for (const auto& r : log) {
    out += std::to_string(r.iteration) + "," + fmt("%.17g", r.mtow) + "," + fmt("%.17g", r.computed) + "," +
           fmt("%.17g", r.residual) + "\n";
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_text_file(path)); }

void RunManifest::add_input(const std::string& path) { inputs.push_back({path, sha256_file(path)}); }
void RunManifest::add_output(const std::string& path) { outputs.push_back({path, sha256_file(path)}); }

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string write_manifest(const RunManifest& m) {
  Table root;
  root.set("schema_version", kSchemaVersion);
  root.set("tool_version", m.tool_version);
  root.set("command", m.command);
  root.set("timestamp", m.timestamp);
  Table options;
  for (const auto& [k, v] : m.options) options.set(k, v);
  root.set("options", std::move(options));
  auto entries = [](const std::vector<ManifestEntry>& list) {
    Array out;
    for (const auto& e : list) {
      Table t;
      t.set("path", e.path);
      t.set("sha256", e.sha256);
      out.emplace_back(std::move(t));
    }
    return out;
  };
  root.set("input", entries(m.inputs));
  root.set("output", entries(m.outputs));
  return write_document(root);
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

}  // namespace fastsize

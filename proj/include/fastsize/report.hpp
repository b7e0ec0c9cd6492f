#pragma once
// Sized-aircraft reports and run manifests.

#include <string>
#include <utility>
#include <vector>

#include "fastsize/document.hpp"
#include "fastsize/sizing.hpp"

namespace fastsize {

// Human-readable summary: mass breakdown, geometry, rating, regressed
// fields, warnings and the iteration log.
std::string sized_report_text(const SizedAircraft& sized);

// The structured report: the completed spec with a [weights] block (so `fly`
// and `viz` can read it back), plus [convergence], [[iteration]] and
// [[regressed]] tables.
Table sized_report_table(const SizedAircraft& sized);
std::string sized_report_structured(const SizedAircraft& sized);

// iteration,mtow_kg,computed_kg,residual
std::string iterations_csv(const std::vector<IterationRecord>& log);

std::string sha256_hex(std::string_view bytes);
// Hash of a file's bytes; throws Error when it cannot be read.
std::string sha256_file(const std::string& path);

struct ManifestEntry {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string tool_version;
  std::string command;
  std::vector<std::pair<std::string, std::string>> options;
  std::vector<ManifestEntry> inputs;
  std::vector<ManifestEntry> outputs;
  std::string timestamp;  // UTC, ISO 8601

  void add_input(const std::string& path);
  void add_output(const std::string& path);
};

std::string utc_timestamp();
std::string write_manifest(const RunManifest& manifest);

// Writes bytes to a file, throwing Error naming the path on failure.
void write_file(const std::string& path, std::string_view bytes);

}  // namespace fastsize

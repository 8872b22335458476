#pragma once

#include "ndirac/diagnostics.hpp"
#include "ndirac/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ndirac {

/// Malformed or out-of-range configuration (CLI exit 64).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read or written, or has the wrong layout (CLI exit 74).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value run configuration. Keys:
///
///   grid.n grid.L model.a model.p model.V model.K
///   solver.tol_outer solver.max_outer solver.step0 solver.armijo_c
///   solver.starts solver.initial solver.sigma solver.tol_inner
///   solver.unique_tol solver.inner_starts solver.max_inner
///   seed output.dir
///
/// Profiles are written as constant:c, rational:c,gamma, exponential:c,sigma
/// or table:path (n^3 whitespace separated values in grid order; relative
/// paths resolve against the config file's directory).
struct RunConfig {
  int n = 16;
  double L = 8.0;
  double a = 1.0;
  double p = 2.5;
  std::string V = "constant:0.2";
  std::string K = "constant:1";
  SolveOptions solver;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::filesystem::path base_dir = ".";

  RunConfig();

  /// Every key with its effective value, in the documented order.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

Profile parse_profile(const std::string& spec, const Grid& grid, const std::filesystem::path& base_dir = ".");
ProblemModel build_model(const RunConfig& cfg);

struct StoredField {
  SpinorField field;
  double a = 0.0;
};

/// field.bin: 32-byte header (magic "NDRC", u32 version, u32 n, f64 L,
/// f64 a, u8 representation, 3 pad bytes) followed by the 4 n^3 complex
/// values as little-endian (re, im) f64 pairs in storage order.
void write_field(const std::filesystem::path& path, const SpinorField& u, double a);
StoredField read_field(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string summary_json(const GroundStateResult& result, const RunConfig& cfg);
std::string trace_csv(const std::vector<TraceEntry>& trace);
/// Radially binned |u|; bin width dx unless `bins` > 0. Empty bins are skipped.
std::string profile_csv(const SpinorField& u, int bins = 0);
std::string report_json(const DiagnosticsReport& report);

/// summary.json, field.bin, trace.csv and profile.csv under `dir`.
void write_solve_outputs(const std::filesystem::path& dir, const GroundStateResult& result, const RunConfig& cfg);

}  // namespace ndirac

#pragma once

// Persistence of functions, trajectories and reports; SVG line plots.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "torus3/equation.hpp"
#include "torus3/experiments.hpp"
#include "torus3/solver.hpp"
#include "torus3/spectral.hpp"

namespace torus3 {

/// {"grid_size": N, "coeffs": [[re, im], ...]} for n = 0..N/2.  Doubles are
/// written with round-trip precision.
std::string function_to_json(const TorusFunction& f);
/// Throws Error on malformed input.
TorusFunction function_from_json(std::string_view text);

/// FNV-1a of a byte string, as used for file fingerprints.
std::uint64_t fingerprint_bytes(std::string_view bytes);
std::string fingerprint_hex(std::uint64_t v);

/// Creates `root/run-NNNN` with the first unused number.  Existing runs are
/// never touched.
std::filesystem::path create_run_directory(const std::filesystem::path& root);

/// Writes meta.json, norms.csv (t, H^k0, H^k, E_k, delta, delta_prime, q_min,
/// mean) and snap_<i>.json into `dir`.  Returns the files written, relative
/// to `dir`.
std::vector<std::string> write_trajectory(const std::filesystem::path& dir, const Equation& eq,
                                          const SolveParams& params, const Trajectory& traj);

/// Writes report JSON, one CSV per table under tables/ and SVG plots under
/// plots/.  File names are prefixed with `label`.  Returns relative paths.
std::vector<std::string> write_report(const std::filesystem::path& dir, const std::string& label,
                                      const ExperimentReport& report);

/// JSON text for a list of reports.
std::string reports_to_json(const std::vector<ExperimentReport>& reports);

/// Writes `text` to `dir / relative` (creating parents) and returns `relative`.
std::string write_text(const std::filesystem::path& dir, const std::string& relative, std::string_view text);

/// Writes dir/meta.json listing `files` with their fingerprints next to the
/// caller's metadata (a JSON object as text).
void write_run_meta(const std::filesystem::path& dir, std::string_view metadata_json,
                    const std::vector<std::string>& files);

struct Validation {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Re-checks a run directory against its meta.json: every listed file exists
/// with the recorded fingerprint, and every snapshot decodes to a function with
/// the fingerprint stored in its trajectory meta.json.
Validation validate_run_directory(const std::filesystem::path& dir);

/// A line plot of table columns as a standalone SVG document.
std::string render_svg(const Table& table, const PlotSpec& spec);

/// Human-readable listing of the built-in equations.
std::string list_catalog();

}  // namespace torus3

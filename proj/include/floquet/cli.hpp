#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "floquet/channels.hpp"

namespace floquet::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

enum class Format { csv, json };

/// Scan inputs in the dimensionless units of the front end: couplings in units
/// of sqrt(omega), momenta in units of sqrt(omega).
struct ScanConfig {
  double g0 = 0.0;
  double g1 = 0.0;
  double omega = 1.0;
  double p_min = 0.0;
  double p_max = 0.0;
  int steps = 0;
  int n_max = 32;
  std::optional<double> tol;  ///< auto-convergence from n_max when set
  int jobs = 1;

  void validate() const;
  Couplings couplings() const;
};

struct ScanRow {
  double p_over_sqrt_omega = 0.0;
  double b0_sq = 0.0;
  std::vector<double> reflect;   ///< n = -n_max .. n_max
  std::vector<double> transmit;  ///< n = -n_max .. n_max
  double flux_residual = 0.0;    ///< |sum_open p_n |C_n|^2 - p Re C_0| / p
  int n_max_used = 0;
};

constexpr double kFluxAuditThreshold = 1e-8;

/// Rows in increasing p, independent of `jobs`.
std::vector<ScanRow> run_scan(const ScanConfig& config);

std::string scan_csv(const ScanConfig& config, const std::vector<ScanRow>& rows);
std::string scan_json(const ScanConfig& config, const std::vector<ScanRow>& rows);

/// %.17g
std::string format_double(double v);

/// Parses argv and runs one subcommand (scan, resonance, overlap, converge).
/// Results go to `out` unless --out names a file; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace floquet::cli

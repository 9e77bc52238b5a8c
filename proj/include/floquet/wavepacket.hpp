#pragma once

#include <span>
#include <string>
#include <vector>

#include "floquet/channels.hpp"

namespace floquet {

/// Gaussian packet phi(p) = (2 Delta pi^3)^{-1/4} exp(-(p - p0)^2 / Delta),
/// cut to zero outside (0, sqrt(omega)).
///
/// Psi(x, 0) = int dp phi(p) e^{ipx}, so the normalisation reads 2 pi int |phi|^2 dp = 1.
struct WavePacket {
  double p0 = 0.0;
  double delta = 0.0;

  void validate(double omega) const;
  double amplitude(double p) const;
  /// Fraction of the untruncated norm lying outside (0, sqrt(omega)).
  double leaked_norm(double omega) const;
};

constexpr double kLeakWarningThreshold = 1e-4;

struct OverlapOptions {
  double quadrature_tol = 1e-8;  ///< max change of any |F|^2 sample when the node count doubles
  int initial_nodes = 200;
  int max_nodes = 1 << 14;
  double amplitude_tol = 1e-12;  ///< per-node n_max convergence tolerance on |B_0|^2
  int initial_n_max = 4;
  int jobs = 1;
  /// Lower end of the support is lower_cutoff * sqrt(omega).
  double lower_cutoff = 1e-8;
};

struct OverlapSeries {
  Couplings couplings;
  WavePacket packet;
  std::vector<double> times;
  std::vector<double> values;  ///< |F(t)|^2
  int nodes = 0;               ///< Gauss-Legendre nodes of the accepted level
  int n_max = 0;               ///< common truncation used at every node
  double quadrature_error = 0.0;
  std::vector<std::string> warnings;

  std::size_t peak_index() const;
  double peak() const { return values.empty() ? 0.0 : values[peak_index()]; }
};

/// |F(t)|^2, the probability of finding the static bound state at time t.
///
/// F(t) = sqrt(2|g0|) int dp phi(p) [ -i p e^{-i p^2 t} / (g0^2/4 + p^2)
///                                   + sum_n C_n(p) e^{-i p_n^2 t} / (|g0|/2 - i p_n) ]
/// Requires g0 < 0. Node count doubles from options.initial_nodes until
/// every sample settles to options.quadrature_tol.
OverlapSeries overlap_trace(const Couplings& c, const WavePacket& packet,
                            std::span<const double> times, const OverlapOptions& options = {});

/// int (|g0|/2) e^{-|g0 x|} dx by quadrature; 1 for every g0 < 0.
double bound_state_overlap_check(double g0);

std::vector<double> uniform_times(double t_max, int steps);

struct FitWindow {
  double t_start = 0.0;
  double t_end = 0.0;
};

struct DecayFit {
  double gamma = 0.0;
  double amplitude = 0.0;  ///< prefactor A in A e^{-gamma t}
  FitWindow window;
  double r_squared = 0.0;
  std::size_t samples = 0;
  bool accepted = false;  ///< r_squared >= 0.99
  std::vector<std::string> warnings;
};

constexpr std::size_t kMinFitSamples = 20;
constexpr double kMinFitRSquared = 0.99;

/// [t_peak + 2/gamma_guess, t_peak + 8/gamma_guess].
FitWindow default_fit_window(const OverlapSeries& series, double gamma_guess);

/// Least squares of ln|F|^2 against t over the window; gamma = -slope.
/// Throws ValidationError for fewer than 20 samples, non-positive values, or a
/// window that starts before the peak.
DecayFit fit_decay(const OverlapSeries& series, const FitWindow& window);
DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   const FitWindow& window);

}  // namespace floquet

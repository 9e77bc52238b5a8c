#pragma once

#include <vector>

#include "floquet/channels.hpp"

namespace floquet {

/// Solved sideband amplitudes for one incoming momentum.
///
/// C_n is the transmitted amplitude in channel n (x > 0) and B_n = C_n - delta_{n0}
/// the reflected one. Probabilities are flux-normalised by the incoming p and are
/// exactly zero for closed channels. Vectors are indexed by n + n_max.
struct AmplitudeSet {
  ScatteringParams params;
  std::vector<Channel> channels;
  std::vector<cplx> transmitted;  ///< C_n
  std::vector<cplx> reflected;    ///< B_n
  std::vector<double> reflect_prob;
  std::vector<double> transmit_prob;

  std::size_t index(int n) const { return static_cast<std::size_t>(n + params.n_max); }
  cplx C(int n) const { return transmitted[index(n)]; }
  cplx B(int n) const { return reflected[index(n)]; }

  /// |B_0|^2, the probability of reflection into the incoming mode.
  double reflection() const { return std::norm(B(0)); }

  /// |sum_open p_n |C_n|^2 - p Re C_0|; vanishes identically for an exact solution.
  double flux_residual() const;
  /// |sum_open (reflect_prob + transmit_prob) - 1|.
  double unitarity_residual() const;
};

/// Solves the truncated recurrence through the tridiagonal matrix.
/// Dispatches to static_amplitudes when g1 == 0.
AmplitudeSet solve_amplitudes(const ScatteringParams& params);

/// g1 == 0: C_0 = 2p / (2p + i g0), all other C_n = 0.
AmplitudeSet static_amplitudes(const ScatteringParams& params);

/// Independent solver: backward continued fractions for C_{n+1}/C_n on both tails,
/// closed by the n = 0 equation. Used to cross-check solve_amplitudes.
AmplitudeSet continued_fraction_amplitudes(const ScatteringParams& params);

struct ConvergenceStep {
  int n_max = 0;
  double reflection = 0.0;  ///< |B_0|^2 at this level
  double change = 0.0;      ///< |difference| to the previous level, 0 for the first
};

struct ConvergedAmplitudes {
  AmplitudeSet amplitudes;  ///< solution at the final (finest) level
  int n_max = 0;
  std::vector<ConvergenceStep> history;
};

constexpr int kDefaultChannelCap = 1 << 14;

/// Doubles n_max from params.n_max until |B_0|^2 moves by less than tol between
/// successive levels. The returned set is the finer of the last two levels.
/// Throws ConvergenceError once the channel count 2 n_max + 1 would exceed max_channels.
ConvergedAmplitudes converge_amplitudes(const ScatteringParams& params, double tol,
                                        int max_channels = kDefaultChannelCap);

}  // namespace floquet

#pragma once

#include <optional>
#include <vector>

#include "floquet/channels.hpp"

namespace floquet {

enum class ZtpOrder { leading, corrected, driven_only };

const char* to_string(ZtpOrder order);

/// Predicted zero-transmission position inside the first Floquet band.
struct ZtpPrediction {
  double p_squared_over_omega = 0.0;
  double p_over_sqrt_omega = 0.0;
  ZtpOrder order = ZtpOrder::leading;
  std::optional<double> bound_state_energy;  ///< E_b = -g0^2/4, set when g0 < 0
};

/// p^2 = omega + E_b: the incoming wave plus one drive quantum hits the static bound state.
/// g0^2 == 4 omega returns the degenerate band edge p = 0; larger |g0| throws OutOfBandError.
ZtpPrediction ztp_leading(double g0, double omega);

/// Leading position shifted down by keeping C_{-2} in the recurrence.
ZtpPrediction ztp_corrected(double g0, double g1, double omega);

/// g0 = 0: root of 16 sqrt((omega - p^2)(2 omega - p^2)) = g1^2 in [0, omega).
/// Throws NoRootError when g1^2 > 16 sqrt(2) omega.
ZtpPrediction ztp_driven_only(double g1, double omega);

/// Leading-order pole p^2 = omega - g0^2/4 - i g1^2 |g0| / (16 sqrt(omega)).
cplx pole_formula(const Couplings& c);

struct ResonancePole {
  cplx p_squared;
  double gamma = 0.0;     ///< 2 |Im p^2|, the decay rate of |F(t)|^2
  double residual = 0.0;  ///< |det M| / prod |M_kk| at the root
  int iterations = 0;
  std::vector<cplx> momenta;  ///< continued p_n at the root, index n + n_max
};

struct PoleSearchOptions {
  int n_max = 32;
  double tolerance = 1e-12;  ///< on |delta p^2| / omega
  int max_iterations = 100;
};

/// Momenta p_n(energy) continued from `previous` along the straight segment
/// from previous_energy to energy. Throws BranchJumpError when a segment passes
/// too close to a branch point for the sign to be decided.
std::vector<cplx> continue_momenta(std::span<const cplx> previous, cplx previous_energy,
                                   cplx energy, double omega);

/// Secant iteration on the scaled determinant of M(p^2). Momenta start on the
/// physical sheet at Re(guess) and are continued along the iteration path, so
/// the open channels move onto the unphysical sheet below the real axis.
ResonancePole find_pole(const Couplings& c, std::optional<cplx> guess = std::nullopt,
                        const PoleSearchOptions& options = {});

/// Normalised characteristic function det M / prod |M_kk| at complex p^2 using
/// the supplied momenta.
cplx normalized_determinant(const Couplings& c, std::span<const cplx> momenta);

struct ReflectionPeak {
  double p = 0.0;           ///< grid position of the peak
  double reflection = 0.0;  ///< |B_0|^2 at the grid point
  double refined_p = 0.0;   ///< golden-section refinement between the neighbouring grid points
  double refined_reflection = 0.0;
};

/// Scans p over `steps` cell midpoints of (p_lo, p_hi) and returns the highest
/// interior local maximum of |B_0|^2. Edges are excluded: |B_0|^2 -> 1 as p -> 0
/// for any g0 != 0, which is not a resonance.
std::optional<ReflectionPeak> locate_reflection_peak(const Couplings& c, double p_lo, double p_hi,
                                                     int steps, int n_max = 32);

}  // namespace floquet

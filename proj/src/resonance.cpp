#include "floquet/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "floquet/errors.hpp"
#include "floquet/scatter.hpp"
#include "floquet/tridiag.hpp"

namespace floquet {

namespace {

ZtpPrediction make_prediction(double x, ZtpOrder order) {
  ZtpPrediction out;
  out.p_squared_over_omega = x;
  out.p_over_sqrt_omega = std::sqrt(std::max(x, 0.0));
  out.order = order;
  return out;
}

void require_bound_state(double g0, double omega) {
  if (!(omega > 0.0)) throw ValidationError("omega must be positive");
  if (!(g0 < 0.0))
    throw ValidationError("ZTP prediction needs an attractive static coupling g0 < 0, got " +
                          std::to_string(g0));
  if (g0 * g0 > 4.0 * omega)
    throw OutOfBandError("bound state lies below the first Floquet band: g0^2/(4 omega) = " +
                         std::to_string(g0 * g0 / (4.0 * omega)) + " > 1");
}

// Smallest |p^2 + n omega| over the kept channels: distance to the nearest branch point.
double branch_clearance(cplx energy, std::size_t count, double omega) {
  const int n_max = static_cast<int>(count / 2);
  double best = std::numeric_limits<double>::infinity();
  for (int n = -n_max; n <= n_max; ++n) best = std::min(best, std::abs(energy + double(n) * omega));
  return best;
}

constexpr int kMaxContinuationSteps = 100000;

}  // namespace

const char* to_string(ZtpOrder order) {
  switch (order) {
    case ZtpOrder::leading:
      return "leading";
    case ZtpOrder::corrected:
      return "corrected";
    case ZtpOrder::driven_only:
      return "driven_only";
  }
  return "unknown";
}

ZtpPrediction ztp_leading(double g0, double omega) {
  require_bound_state(g0, omega);
  ZtpPrediction out = make_prediction(1.0 - g0 * g0 / (4.0 * omega), ZtpOrder::leading);
  out.bound_state_energy = -g0 * g0 / 4.0;
  return out;
}

ZtpPrediction ztp_corrected(double g0, double g1, double omega) {
  require_bound_state(g0, omega);
  if (g1 < 0.0) throw ValidationError("g1 must be non-negative");
  const double u = g0 / std::sqrt(omega);
  const double shift =
      std::abs(g0) * g1 * g1 / (8.0 * std::pow(omega, 1.5) * (std::sqrt(u * u + 4.0) + u));
  const double x = 1.0 - g0 * g0 / (4.0 * omega) - shift;
  if (!(x > 0.0))
    throw OutOfBandError("corrected ZTP position p^2/omega = " + std::to_string(x) +
                         " is not inside the first band");
  ZtpPrediction out = make_prediction(x, ZtpOrder::corrected);
  out.bound_state_energy = -g0 * g0 / 4.0;
  return out;
}

ZtpPrediction ztp_driven_only(double g1, double omega) {
  if (!(omega > 0.0)) throw ValidationError("omega must be positive");
  if (!(g1 > 0.0)) throw ValidationError("driven-only ZTP needs g1 > 0");
  // (1 - x)(2 - x) = c^2 with x = p^2/omega; the left side falls from 2 at x = 0 to 0 at x = 1.
  const double c = g1 * g1 / (16.0 * omega);
  const double c2 = c * c;
  if (c2 > 2.0)
    throw NoRootError("no driven-only ZTP: g1^2/omega = " + std::to_string(g1 * g1 / omega) +
                      " exceeds 16 sqrt(2)");
  const double x = (3.0 - std::sqrt(1.0 + 4.0 * c2)) / 2.0;
  return make_prediction(std::max(x, 0.0), ZtpOrder::driven_only);
}

cplx pole_formula(const Couplings& c) {
  return {c.omega - c.g0 * c.g0 / 4.0,
          -c.g1 * c.g1 * std::abs(c.g0) / (16.0 * std::sqrt(c.omega))};
}

std::vector<cplx> continue_momenta(std::span<const cplx> previous, cplx previous_energy,
                                   cplx energy, double omega) {
  const int n_max = static_cast<int>(previous.size() / 2);
  std::vector<cplx> current(previous.begin(), previous.end());
  cplx at = previous_energy;
  const double floor = 1e-14 * omega;
  for (int step = 0; at != energy; ++step) {
    if (step == kMaxContinuationSteps)
      throw BranchJumpError("momentum continuation did not reach the target energy");
    const double clearance = branch_clearance(at, current.size(), omega);
    if (clearance < floor)
      throw BranchJumpError("continuation path touches a channel threshold p^2 + n omega = 0");
    const cplx remaining = energy - at;
    const double max_step = 0.25 * clearance;
    const cplx next =
        std::abs(remaining) <= max_step ? energy : at + remaining * (max_step / std::abs(remaining));
    for (int n = -n_max; n <= n_max; ++n) {
      cplx& pn = current[static_cast<std::size_t>(n + n_max)];
      const cplx root = std::sqrt(next + double(n) * omega);
      pn = std::abs(root - pn) <= std::abs(root + pn) ? root : -root;
    }
    at = next;
  }
  if (branch_clearance(energy, current.size(), omega) < floor)
    throw BranchJumpError("target energy sits on a channel threshold");
  return current;
}

cplx normalized_determinant(const Couplings& c, std::span<const cplx> momenta) {
  const FloquetMatrix m = assemble(momenta, c.g0, c.g1);
  ScaledDeterminant diag_product{cplx{1.0, 0.0}};
  for (const cplx& a : m.diag) diag_product *= ScaledDeterminant{a};
  return ratio(determinant(m), diag_product);
}

namespace {

// det M divided by every diagonal entry except `keep`. When `keep` is the channel
// whose diagonal vanishes at the bound state, this is close to linear near the pole,
// whereas det M / prod M_kk behaves like (z - z_pole) / (z - z_bound).
cplx pole_function(const Couplings& c, std::span<const cplx> momenta, std::size_t keep) {
  const FloquetMatrix m = assemble(momenta, c.g0, c.g1);
  ScaledDeterminant others{cplx{1.0, 0.0}};
  for (std::size_t k = 0; k < m.diag.size(); ++k)
    if (k != keep) others *= ScaledDeterminant{m.diag[k]};
  return ratio(determinant(m), others);
}

}  // namespace

ResonancePole find_pole(const Couplings& c, std::optional<cplx> guess,
                        const PoleSearchOptions& options) {
  c.validate();
  if (!(c.g1 > 0.0)) throw ValidationError("pole search requires g1 > 0");
  if (options.n_max < 1) throw ValidationError("pole search requires n_max >= 1");
  if (!guess) {
    if (!(c.g0 < 0.0))
      throw ValidationError("no default pole guess without a static bound state (g0 >= 0)");
    guess = pole_formula(c);
  }

  // Start on the physical sheet at the real part of the guess.
  const double start = guess->real();
  std::vector<cplx> start_momenta;
  for (int n = -options.n_max; n <= options.n_max; ++n)
    start_momenta.push_back(physical_momentum(start + n * c.omega));

  cplx z0 = *guess;
  std::vector<cplx> k0 = continue_momenta(start_momenta, start, z0, c.omega);
  const FloquetMatrix at_guess = assemble(k0, c.g0, c.g1);
  std::size_t keep = 0;
  for (std::size_t k = 1; k < at_guess.diag.size(); ++k)
    if (std::abs(at_guess.diag[k]) < std::abs(at_guess.diag[keep])) keep = k;

  cplx f0 = pole_function(c, k0, keep);
  const double width = std::max(std::abs(z0.imag()), 1e-10 * c.omega);
  cplx z1 = z0 + cplx{0.1, -0.1} * width;
  std::vector<cplx> k1 = continue_momenta(k0, z0, z1, c.omega);
  cplx f1 = pole_function(c, k1, keep);

  const auto finish = [&](int iterations) {
    ResonancePole pole;
    pole.p_squared = z1;
    pole.gamma = 2.0 * std::abs(z1.imag());
    pole.residual = std::abs(normalized_determinant(c, k1));
    pole.iterations = iterations;
    pole.momenta = std::move(k1);
    return pole;
  };

  for (int it = 1; it <= options.max_iterations; ++it) {
    if (f1 == cplx{}) return finish(it);
    const cplx denom = f1 - f0;
    if (denom == cplx{})
      throw ConvergenceError("secant step degenerated (equal function values)", std::abs(f1));
    const cplx z2 = z1 - f1 * (z1 - z0) / denom;
    if (!std::isfinite(std::abs(z2)))
      throw ConvergenceError("secant iterate diverged", std::abs(f1));
    std::vector<cplx> k2 = continue_momenta(k1, z1, z2, c.omega);
    const cplx f2 = pole_function(c, k2, keep);
    const double move = std::abs(z2 - z1);
    z0 = z1, f0 = f1;
    z1 = z2, f1 = f2;
    k1 = std::move(k2);
    if (move < options.tolerance * c.omega) return finish(it);
  }
  throw ConvergenceError("pole search did not converge in " +
                             std::to_string(options.max_iterations) + " iterations",
                         std::abs(z1 - z0));
}

std::optional<ReflectionPeak> locate_reflection_peak(const Couplings& c, double p_lo, double p_hi,
                                                     int steps, int n_max) {
  c.validate();
  if (!(p_lo >= 0.0 && p_hi > p_lo)) throw ValidationError("peak scan needs 0 <= p_lo < p_hi");
  if (steps < 3) throw ValidationError("peak scan needs at least 3 points");
  const double h = (p_hi - p_lo) / steps;
  const auto reflection = [&](double p) {
    return solve_amplitudes(make_params(c, p, n_max)).reflection();
  };
  std::vector<double> grid(static_cast<std::size_t>(steps));
  std::vector<double> value(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k] = p_lo + (static_cast<double>(k) + 0.5) * h;
    value[k] = reflection(grid[k]);
  }
  std::optional<std::size_t> best;
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    if (value[k] > value[k - 1] && value[k] >= value[k + 1] && (!best || value[k] > value[*best]))
      best = k;
  }
  if (!best) return std::nullopt;

  ReflectionPeak peak;
  peak.p = grid[*best];
  peak.reflection = value[*best];

  // Golden-section search on the bracketing cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid[*best - 1], b = grid[*best + 1];
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = reflection(x1), f2 = reflection(x2);
  while (b - a > 1e-12 * std::max(1.0, b)) {
    if (f1 < f2) {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = reflection(x2);
    } else {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = reflection(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  const double refined = reflection(mid);
  peak.refined_p = refined >= peak.reflection ? mid : peak.p;
  peak.refined_reflection = std::max(refined, peak.reflection);
  return peak;
}

}  // namespace floquet

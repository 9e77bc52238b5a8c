#include "floquet/scatter.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "floquet/errors.hpp"
#include "floquet/tridiag.hpp"

namespace floquet {

namespace {

// Fills B_n and the flux-normalised probabilities from C_n.
AmplitudeSet finish(const ScatteringParams& params, std::vector<Channel> channels,
                    std::vector<cplx> c) {
  AmplitudeSet out;
  out.params = params;
  const std::size_t d = c.size();
  out.reflected = c;
  out.reflected[static_cast<std::size_t>(params.n_max)] -= 1.0;
  out.reflect_prob.assign(d, 0.0);
  out.transmit_prob.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    if (!channels[k].open) continue;
    const double weight = channels[k].momentum.real() / params.p;
    out.reflect_prob[k] = weight * std::norm(out.reflected[k]);
    out.transmit_prob[k] = weight * std::norm(c[k]);
  }
  out.channels = std::move(channels);
  out.transmitted = std::move(c);
  return out;
}

std::vector<Channel> channel_vector(const ScatteringParams& params) {
  const ChannelSet set(params);
  return {set.begin(), set.end()};
}

}  // namespace

double AmplitudeSet::flux_residual() const {
  double outgoing = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k)
    if (channels[k].open) outgoing += channels[k].momentum.real() * std::norm(transmitted[k]);
  return std::abs(outgoing - params.p * C(0).real());
}

double AmplitudeSet::unitarity_residual() const {
  double total = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) total += reflect_prob[k] + transmit_prob[k];
  return std::abs(total - 1.0);
}

AmplitudeSet static_amplitudes(const ScatteringParams& params) {
  params.validate();
  if (params.g1 != 0.0) throw ValidationError("static_amplitudes requires g1 = 0");
  std::vector<cplx> c(params.dimension());
  const cplx two_p{2.0 * params.p, 0.0};
  c[static_cast<std::size_t>(params.n_max)] = two_p / (two_p + cplx{0.0, params.g0});
  return finish(params, channel_vector(params), std::move(c));
}

AmplitudeSet solve_amplitudes(const ScatteringParams& params) {
  params.validate();
  if (params.g1 == 0.0) return static_amplitudes(params);
  auto channels = channel_vector(params);
  std::vector<cplx> momenta;
  momenta.reserve(channels.size());
  for (const auto& ch : channels) momenta.push_back(ch.momentum);
  const FloquetMatrix m = assemble(momenta, params.g0, params.g1);
  std::vector<cplx> rhs(m.dimension());
  rhs[static_cast<std::size_t>(params.n_max)] = cplx{0.0, 4.0 * params.p / params.g1};
  return finish(params, std::move(channels), solve(m, rhs));
}

AmplitudeSet continued_fraction_amplitudes(const ScatteringParams& params) {
  params.validate();
  if (!(params.g1 > 0.0)) throw ValidationError("continued-fraction solver requires g1 > 0");
  auto channels = channel_vector(params);
  const int n_max = params.n_max;
  const std::size_t d = channels.size();
  const auto at = [n_max](int n) { return static_cast<std::size_t>(n + n_max); };

  // Row n of the recurrence: a_n C_n + h (C_{n+1} + C_{n-1}) = 2 p delta_{n0}.
  const cplx h{0.0, 0.5 * params.g1};
  std::vector<cplx> a(d);
  for (std::size_t k = 0; k < d; ++k) a[k] = 2.0 * channels[k].momentum + cplx{0.0, params.g0};

  const auto guarded = [](cplx denom, int n) {
    if (denom == cplx{} || !std::isfinite(std::abs(denom)))
      throw BreakdownError("continued fraction denominator vanished at n = " + std::to_string(n));
    return denom;
  };

  // up[n] = C_n / C_{n-1} for n >= 1, with C_{n_max+1} = 0.
  std::vector<cplx> up(d);
  cplx next{};
  for (int n = n_max; n >= 1; --n) {
    next = -h / guarded(a[at(n)] + h * next, n);
    up[at(n)] = next;
  }
  // down[n] = C_n / C_{n+1} for n <= -1, with C_{-n_max-1} = 0.
  std::vector<cplx> down(d);
  cplx prev{};
  for (int n = -n_max; n <= -1; ++n) {
    prev = -h / guarded(a[at(n)] + h * prev, n);
    down[at(n)] = prev;
  }

  std::vector<cplx> c(d);
  const cplx r_up = n_max >= 1 ? up[at(1)] : cplx{};
  const cplx r_down = n_max >= 1 ? down[at(-1)] : cplx{};
  c[at(0)] = 2.0 * params.p / guarded(a[at(0)] + h * (r_up + r_down), 0);
  for (int n = 1; n <= n_max; ++n) c[at(n)] = up[at(n)] * c[at(n - 1)];
  for (int n = -1; n >= -n_max; --n) c[at(n)] = down[at(n)] * c[at(n + 1)];
  return finish(params, std::move(channels), std::move(c));
}

ConvergedAmplitudes converge_amplitudes(const ScatteringParams& params, double tol,
                                        int max_channels) {
  params.validate();
  if (!(tol > 0.0)) throw ValidationError("convergence tolerance must be positive");
  ConvergedAmplitudes out;
  ScatteringParams level = params;
  out.amplitudes = solve_amplitudes(level);
  out.n_max = level.n_max;
  out.history.push_back({level.n_max, out.amplitudes.reflection(), 0.0});
  if (params.g1 == 0.0) return out;

  for (;;) {
    if (4L * level.n_max + 1 > max_channels) {
      const double last = out.history.size() > 1 ? out.history.back().change
                                                 : std::numeric_limits<double>::infinity();
      throw ConvergenceError("|B_0|^2 not converged within " + std::to_string(max_channels) +
                                 " channels (last change " + std::to_string(last) + ")",
                             last);
    }
    level.n_max *= 2;
    AmplitudeSet finer = solve_amplitudes(level);
    const double change = std::abs(finer.reflection() - out.amplitudes.reflection());
    out.history.push_back({level.n_max, finer.reflection(), change});
    out.amplitudes = std::move(finer);
    out.n_max = level.n_max;
    if (change < tol) return out;
  }
}

}  // namespace floquet

#include "floquet/channels.hpp"

#include <cmath>
#include <string>

#include "floquet/errors.hpp"

namespace floquet {

void Couplings::validate() const {
  if (!std::isfinite(g0) || !std::isfinite(g1) || !std::isfinite(omega))
    throw ValidationError("couplings must be finite");
  if (!(omega > 0.0)) throw ValidationError("omega must be positive, got " + std::to_string(omega));
  if (g1 < 0.0) throw ValidationError("g1 must be non-negative, got " + std::to_string(g1));
}

void ScatteringParams::validate() const {
  couplings().validate();
  if (!(p > 0.0) || !std::isfinite(p))
    throw ValidationError("incoming momentum p must be positive, got " + std::to_string(p));
  if (n_max < 1) throw ValidationError("n_max must be at least 1, got " + std::to_string(n_max));
}

cplx physical_momentum(double energy) {
  if (energy >= 0.0) return {std::sqrt(energy), 0.0};
  return {0.0, std::sqrt(-energy)};
}

Channel channel_momentum(const ScatteringParams& params, int n) {
  Channel ch;
  ch.n = n;
  ch.energy = n == 0 ? params.p * params.p : params.p * params.p + n * params.omega;
  ch.open = ch.energy >= 0.0;
  // p_0 is the incoming momentum itself, not sqrt(p^2) with its rounding.
  ch.momentum = n == 0 ? cplx{params.p, 0.0} : physical_momentum(ch.energy);
  return ch;
}

ChannelSet::ChannelSet(const ScatteringParams& params) : n_max_(params.n_max) {
  channels_.reserve(params.dimension());
  for (int n = -n_max_; n <= n_max_; ++n) channels_.push_back(channel_momentum(params, n));
}

std::vector<cplx> ChannelSet::momenta() const {
  std::vector<cplx> out;
  out.reserve(channels_.size());
  for (const auto& ch : channels_) out.push_back(ch.momentum);
  return out;
}

}  // namespace floquet

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace floquet {

using cplx = std::complex<double>;

/// Coupling constants of the driven delta potential g0*delta(x) + g1*cos(omega t)*delta(x).
///
/// Units: hbar = 1 and reduced mass 1/2, so energies are momentum squared.
/// g0 and g1 carry momentum units; their natural scale is sqrt(omega).
struct Couplings {
  double g0 = 0.0;
  double g1 = 0.0;
  double omega = 1.0;

  /// Throws ValidationError unless omega > 0, g1 >= 0 and both couplings are finite.
  void validate() const;
};

struct ScatteringParams {
  double g0 = 0.0;
  double g1 = 0.0;
  double omega = 1.0;
  double p = 0.5;  ///< incoming momentum
  int n_max = 32;  ///< channels n = -n_max .. n_max are kept

  Couplings couplings() const { return {g0, g1, omega}; }
  std::size_t dimension() const { return 2 * static_cast<std::size_t>(n_max) + 1; }

  /// Throws ValidationError unless omega > 0, p > 0, n_max >= 1 and g1 >= 0.
  void validate() const;
};

inline ScatteringParams make_params(const Couplings& c, double p, int n_max = 32) {
  return {c.g0, c.g1, c.omega, p, n_max};
}

struct Channel {
  int n = 0;
  cplx momentum;        ///< p_n, real for open channels, i*kappa with kappa > 0 for closed ones
  double energy = 0.0;  ///< p^2 + n*omega
  bool open = false;    ///< energy >= 0; the threshold itself counts as open with p_n = 0
};

/// Physical-sheet momentum sqrt(energy): non-negative real when energy >= 0,
/// otherwise on the positive imaginary axis so that exp(i p_n |x|) decays.
cplx physical_momentum(double energy);

Channel channel_momentum(const ScatteringParams& params, int n);

/// Sidebands n = -n_max .. n_max in increasing n.
///
/// Storage index is n + n_max, i.e. the 1-based matrix row k = n + 1 + n_max minus one.
class ChannelSet {
 public:
  explicit ChannelSet(const ScatteringParams& params);

  int n_max() const { return n_max_; }
  std::size_t size() const { return channels_.size(); }
  std::size_t index(int n) const { return static_cast<std::size_t>(n + n_max_); }

  const Channel& operator[](std::size_t k) const { return channels_[k]; }
  const Channel& sideband(int n) const { return channels_[index(n)]; }

  std::span<const Channel> channels() const { return channels_; }
  std::vector<cplx> momenta() const;

  auto begin() const { return channels_.begin(); }
  auto end() const { return channels_.end(); }

 private:
  int n_max_;
  std::vector<Channel> channels_;
};

inline ChannelSet channel_set(const ScatteringParams& params) { return ChannelSet(params); }

}  // namespace floquet

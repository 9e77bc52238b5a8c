#include "floquet/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "floquet/errors.hpp"
#include "floquet/parallel.hpp"
#include "floquet/quadrature.hpp"
#include "floquet/scatter.hpp"

namespace floquet {

namespace {

using std::numbers::pi;

// Per-node data that does not depend on t.
struct NodeTable {
  std::vector<double> p_squared;
  std::vector<cplx> free_term;  ///< w phi sqrt(2|g0|) * (-i p / (g0^2/4 + p^2))
  std::vector<cplx> channel;    ///< w phi sqrt(2|g0|) * C_n / (|g0|/2 - i p_n), row-major [node][n]
  std::size_t width = 0;
  int n_max = 0;
};

NodeTable tabulate(const Couplings& c, const WavePacket& packet, const GaussLegendre& rule,
                   const OverlapOptions& options) {
  const std::size_t nodes = rule.nodes.size();
  NodeTable table;

  // A single truncation for the whole node set keeps the integrand smooth in p.
  std::vector<int> needed(nodes);
  parallel_for(nodes, options.jobs, [&](std::size_t k) {
    needed[k] = converge_amplitudes(make_params(c, rule.nodes[k], options.initial_n_max),
                                    options.amplitude_tol)
                    .n_max;
  });
  table.n_max = *std::max_element(needed.begin(), needed.end());
  table.width = 2 * static_cast<std::size_t>(table.n_max) + 1;
  table.p_squared.resize(nodes);
  table.free_term.resize(nodes);
  table.channel.resize(nodes * table.width);

  const double abs_g0 = std::abs(c.g0);
  const double prefactor = std::sqrt(2.0 * abs_g0);
  parallel_for(nodes, options.jobs, [&](std::size_t k) {
    const double p = rule.nodes[k];
    const double weight = rule.weights[k] * packet.amplitude(p) * prefactor;
    const AmplitudeSet amps = solve_amplitudes(make_params(c, p, table.n_max));
    table.p_squared[k] = p * p;
    table.free_term[k] = weight * cplx{0.0, -p} / (c.g0 * c.g0 / 4.0 + p * p);
    for (std::size_t j = 0; j < table.width; ++j) {
      const cplx pn = amps.channels[j].momentum;
      table.channel[k * table.width + j] =
          weight * amps.transmitted[j] / (abs_g0 / 2.0 - cplx{0.0, 1.0} * pn);
    }
  });
  return table;
}

std::vector<double> evaluate(const NodeTable& table, const Couplings& c,
                             std::span<const double> times, int jobs) {
  std::vector<double> out(times.size());
  const std::size_t nodes = table.p_squared.size();
  parallel_for(times.size(), jobs, [&](std::size_t i) {
    const double t = times[i];
    // e^{-i p_n^2 t} = e^{-i p^2 t} (e^{-i omega t})^n
    std::vector<cplx> sideband(table.width);
    sideband[static_cast<std::size_t>(table.n_max)] = 1.0;
    for (int n = 1; n <= table.n_max; ++n) {
      const auto up = static_cast<std::size_t>(table.n_max + n);
      const auto down = static_cast<std::size_t>(table.n_max - n);
      sideband[up] = std::polar(1.0, -c.omega * t * n);
      sideband[down] = std::conj(sideband[up]);
    }
    cplx f{};
    for (std::size_t k = 0; k < nodes; ++k) {
      const cplx* row = &table.channel[k * table.width];
      cplx sum = table.free_term[k];
      for (std::size_t j = 0; j < table.width; ++j) sum += row[j] * sideband[j];
      f += std::polar(1.0, -table.p_squared[k] * t) * sum;
    }
    out[i] = std::norm(f);
  });
  return out;
}

}  // namespace

void WavePacket::validate(double omega) const {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ValidationError("wave packet width Delta must be positive");
  if (!(p0 > 0.0) || !(p0 < std::sqrt(omega)))
    throw ValidationError("packet centre p0 must lie inside the first band (0, sqrt(omega))");
}

double WavePacket::amplitude(double p) const {
  const double norm = std::pow(2.0 * delta * pi * pi * pi, -0.25);
  return norm * std::exp(-(p - p0) * (p - p0) / delta);
}

double WavePacket::leaked_norm(double omega) const {
  // |phi|^2 is proportional to a normal density with mean p0 and variance Delta/4.
  const double sigma = std::sqrt(delta) / 2.0;
  const auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - p0) / (sigma * std::sqrt(2.0))); };
  return 1.0 - (cdf(std::sqrt(omega)) - cdf(0.0));
}

std::size_t OverlapSeries::peak_index() const {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

OverlapSeries overlap_trace(const Couplings& c, const WavePacket& packet,
                            std::span<const double> times, const OverlapOptions& options) {
  c.validate();
  if (!(c.g0 < 0.0))
    throw ValidationError("overlap needs a static bound state: g0 must be negative");
  packet.validate(c.omega);
  if (times.empty()) throw ValidationError("empty time grid");
  for (double t : times)
    if (!std::isfinite(t)) throw ValidationError("time grid contains a non-finite value");
  if (options.initial_nodes < 1 || options.max_nodes < options.initial_nodes)
    throw ValidationError("invalid quadrature node limits");

  OverlapSeries series;
  series.couplings = c;
  series.packet = packet;
  series.times.assign(times.begin(), times.end());
  const double leak = packet.leaked_norm(c.omega);
  if (leak > kLeakWarningThreshold)
    series.warnings.push_back("wave packet leaks " + std::to_string(leak) +
                              " of its norm outside the first band");

  const double lo = options.lower_cutoff * std::sqrt(c.omega);
  const double hi = std::sqrt(c.omega);
  const auto level = [&](int nodes, int& n_max) {
    const GaussLegendre rule(nodes, lo, hi);
    const NodeTable table = tabulate(c, packet, rule, options);
    n_max = table.n_max;
    return evaluate(table, c, times, options.jobs);
  };

  int nodes = options.initial_nodes;
  int n_max = 0;
  std::vector<double> coarse = level(nodes, n_max);
  double change = std::numeric_limits<double>::infinity();
  while (2L * nodes <= options.max_nodes) {
    nodes *= 2;
    std::vector<double> fine = level(nodes, n_max);
    change = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i)
      change = std::max(change, std::abs(fine[i] - coarse[i]));
    coarse = std::move(fine);
    if (change < options.quadrature_tol) {
      series.values = std::move(coarse);
      series.nodes = nodes;
      series.n_max = n_max;
      series.quadrature_error = change;
      return series;
    }
  }
  throw ConvergenceError("overlap quadrature not converged at " + std::to_string(nodes) +
                             " nodes; last change " + std::to_string(change),
                         change);
}

double bound_state_overlap_check(double g0) {
  if (!(g0 < 0.0)) throw ValidationError("bound state exists only for g0 < 0");
  const double kappa = std::abs(g0);
  // The integrand drops below e^{-50} past 50/kappa; integrate each half on ten panels.
  const double box = 50.0 / kappa;
  const int panels = 10;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const GaussLegendre rule(32, box * i / panels, box * (i + 1) / panels);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      total += rule.weights[k] * 0.5 * kappa * std::exp(-kappa * rule.nodes[k]);
  }
  return 2.0 * total;
}

std::vector<double> uniform_times(double t_max, int steps) {
  if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");
  if (steps < 2) throw ValidationError("time grid needs at least two samples");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = t_max * i / (steps - 1);
  return out;
}

FitWindow default_fit_window(const OverlapSeries& series, double gamma_guess) {
  if (!(gamma_guess > 0.0)) throw ValidationError("gamma guess must be positive");
  const double t_peak = series.times.at(series.peak_index());
  return {t_peak + 2.0 / gamma_guess, t_peak + 8.0 / gamma_guess};
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   const FitWindow& window) {
  if (times.size() != values.size() || times.empty())
    throw ValidationError("fit needs matching, non-empty time and value arrays");
  if (!(window.t_end > window.t_start)) throw ValidationError("fit window is empty");
  const auto peak = std::max_element(values.begin(), values.end()) - values.begin();
  if (window.t_start < times[static_cast<std::size_t>(peak)])
    throw ValidationError("fit window must start after the peak of |F|^2");

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.t_start || times[i] > window.t_end) continue;
    if (!(values[i] > 0.0))
      throw ValidationError("non-positive |F|^2 at t = " + std::to_string(times[i]));
    const double y = std::log(values[i]);
    sx += times[i], sy += y, sxx += times[i] * times[i], sxy += times[i] * y, syy += y * y;
    ++count;
  }
  if (count < kMinFitSamples)
    throw ValidationError("fit window holds " + std::to_string(count) + " samples, need " +
                          std::to_string(kMinFitSamples));

  const double n = static_cast<double>(count);
  const double cov = sxy - sx * sy / n;
  const double var_t = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  const double slope = cov / var_t;
  const double intercept = (sy - slope * sx) / n;

  DecayFit fit;
  fit.gamma = -slope;
  fit.amplitude = std::exp(intercept);
  fit.window = window;
  fit.samples = count;
  fit.r_squared = var_y > 0.0 ? cov * cov / (var_t * var_y) : 1.0;
  fit.accepted = fit.gamma > 0.0 && fit.r_squared >= kMinFitRSquared;
  if (!(fit.gamma > 0.0)) fit.warnings.push_back("fitted slope is not decaying");
  if (fit.r_squared < kMinFitRSquared)
    fit.warnings.push_back("poor exponential fit: r^2 = " + std::to_string(fit.r_squared));
  return fit;
}

DecayFit fit_decay(const OverlapSeries& series, const FitWindow& window) {
  return fit_decay(series.times, series.values, window);
}

}  // namespace floquet

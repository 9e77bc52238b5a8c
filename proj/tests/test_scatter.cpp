#include <doctest.h>

#include <cmath>

#include "floquet/errors.hpp"
#include "floquet/scatter.hpp"
#include "oracles.hpp"

using namespace floquet;

namespace {

double element_relative_error(const AmplitudeSet& a, const AmplitudeSet& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.transmitted.size(); ++k) {
    const double scale = std::max(std::abs(a.transmitted[k]), std::abs(b.transmitted[k]));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(a.transmitted[k] - b.transmitted[k]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("static closed form") {
  SUBCASE("free propagation") {
    for (double p : {0.1, 1.0, 7.0}) {
      const auto a = solve_amplitudes({0.0, 0.0, 1.0, p, 4});
      CHECK(a.C(0) == cplx{1.0, 0.0});
      CHECK(a.B(0) == cplx{});
    }
  }
  SUBCASE("g0 = -1, p = 0.5") {
    const auto a = static_amplitudes({-1.0, 0.0, 1.0, 0.5, 4});
    // r = -i g0 / (2p + i g0) = i / (1 - i): |r|^2 = 1/2
    CHECK(a.reflection() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::norm(a.C(0)) == doctest::Approx(0.5).epsilon(1e-15));
    for (int n : {-4, -1, 1, 4}) CHECK(a.C(n) == cplx{});
  }
  SUBCASE("high-energy transparency") {
    double last = 1.0;
    for (double p : {1.0, 10.0, 100.0, 1e4}) {
      const double r = static_amplitudes({-1.0, 0.0, 1.0, p, 2}).reflection();
      CHECK(r < last);
      last = r;
    }
    CHECK(last < 1e-8);
  }
  CHECK_THROWS_AS(static_amplitudes({-1.0, 0.3, 1.0, 0.5, 2}), ValidationError);
}

TEST_CASE("amplitude set bookkeeping") {
  const auto a = solve_amplitudes({-1.0, 0.4, 1.0, 0.6, 16});
  CHECK(a.B(0) == a.C(0) - 1.0);
  CHECK(a.B(3) == a.C(3));
  CHECK(a.reflection() >= 0.0);
  CHECK(a.reflection() <= 1.0);
  for (std::size_t k = 0; k < a.channels.size(); ++k) {
    if (a.channels[k].open) continue;
    CHECK(a.reflect_prob[k] == 0.0);
    CHECK(a.transmit_prob[k] == 0.0);
  }
  CHECK(a.flux_residual() < 1e-12);
  CHECK(a.unitarity_residual() < 1e-12);
}

TEST_CASE("matrix solve satisfies the recurrence row by row") {
  const ScatteringParams params{0.7, 2.2, 1.3, 0.9, 12};
  const auto a = solve_amplitudes(params);
  const double g0 = params.g0, g1 = params.g1;
  for (int n = -params.n_max; n <= params.n_max; ++n) {
    const cplx pn = oracle::sideband_momentum(params.p, n, params.omega);
    const cplx up = n < params.n_max ? a.C(n + 1) : cplx{};
    const cplx down = n > -params.n_max ? a.C(n - 1) : cplx{};
    const cplx lhs = 2.0 * pn * a.C(n);
    const cplx rhs = (n == 0 ? 2.0 * params.p : 0.0) - cplx{0.0, g0} * a.C(n) -
                     cplx{0.0, g1 / 2.0} * (up + down);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("continued-fraction oracle") {
  SUBCASE("randomised equivalence") {
    for (const auto& draw : oracle::parameter_sweep(300, 99)) {
      const ScatteringParams params{draw.g0, draw.g1, 1.0, draw.p, 32};
      const auto matrix = solve_amplitudes(params);
      const auto fraction = continued_fraction_amplitudes(params);
      CHECK(element_relative_error(matrix, fraction) <= 1e-10);
    }
  }
  SUBCASE("weak-drive limit approaches the static amplitude") {
    const auto weak = continued_fraction_amplitudes({-1.0, 1e-6, 1.0, 0.5, 16});
    const auto stat = static_amplitudes({-1.0, 0.0, 1.0, 0.5, 16});
    CHECK(std::abs(weak.C(0) - stat.C(0)) < 1e-6);
  }
  SUBCASE("tail ratios stay bounded like 1/sqrt(n)") {
    const ScatteringParams params{0.0, 4.5, 1.0, 0.5, 64};
    const auto a = continued_fraction_amplitudes(params);
    for (int n = 20; n < 60; ++n) {
      const double scaled = std::abs(a.C(n + 1) / a.C(n)) * std::sqrt(double(n));
      CHECK(scaled > 0.5);
      CHECK(scaled < 2.0);
    }
  }
  CHECK_THROWS_AS(continued_fraction_amplitudes({-1.0, 0.0, 1.0, 0.5, 4}), ValidationError);
}

TEST_CASE("flux and unitarity across the parameter box") {
  for (const auto& draw : oracle::parameter_sweep(300, 5)) {
    const ScatteringParams params{draw.g0, draw.g1, 1.0, draw.p, 32};
    const auto a = solve_amplitudes(params);
    CHECK(a.flux_residual() < 1e-10 * params.p);
    CHECK(a.unitarity_residual() < 1e-10);
    CHECK(a.reflection() <= 1.0 + 1e-12);
  }
}

TEST_CASE("static limit continuity in g1") {
  const double exact = 1.0 / (1.0 + 4.0 * 0.25);
  double last = 1.0;
  for (double g1 : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double r = solve_amplitudes({-1.0, g1, 1.0, 0.5, 16}).reflection();
    const double err = std::abs(r - exact);
    CHECK(err < last);
    last = err;
  }
  CHECK(last < 1e-7);
}

TEST_CASE("truncation control") {
  SUBCASE("moderate drive converges early") {
    const auto result = converge_amplitudes({-1.0, 0.4, 1.0, 0.6, 1}, 1e-10);
    CHECK(result.n_max <= 16);
    CHECK(result.history.back().change < 1e-10);
    CHECK(result.history.front().change == 0.0);
    for (std::size_t i = 2; i < result.history.size(); ++i)
      CHECK(result.history[i].change <= result.history[i - 1].change);
  }
  SUBCASE("static problem returns the first level") {
    const auto result = converge_amplitudes({-1.0, 0.0, 1.0, 0.6, 8}, 1e-10);
    CHECK(result.n_max == 8);
    CHECK(result.history.size() == 1);
  }
  SUBCASE("strong drive is self-consistent under doubling") {
    const auto result = converge_amplitudes({0.0, 4.5, 1.0, 0.5, 2}, 1e-10);
    const ScatteringParams doubled{0.0, 4.5, 1.0, 0.5, 2 * result.n_max};
    CHECK(std::abs(solve_amplitudes(doubled).reflection() - result.amplitudes.reflection()) < 1e-10);
    const auto weak = converge_amplitudes({-1.0, 0.2, 1.0, 0.5, 2}, 1e-10);
    CHECK(result.n_max > weak.n_max);
  }
  SUBCASE("hard cap") {
    CHECK_THROWS_AS(converge_amplitudes({0.0, 4.5, 1.0, 0.5, 2}, 1e-10, 9), ConvergenceError);
  }
  CHECK_THROWS_AS(converge_amplitudes({-1.0, 0.4, 1.0, 0.6, 1}, 0.0), ValidationError);
}

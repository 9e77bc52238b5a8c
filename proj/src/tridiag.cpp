#include "floquet/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "floquet/errors.hpp"

namespace floquet {

namespace {

constexpr double kPivotGuard = 64.0 * std::numeric_limits<double>::epsilon();

}  // namespace

std::vector<cplx> FloquetMatrix::apply(std::span<const cplx> x) const {
  const std::size_t d = diag.size();
  std::vector<cplx> y(d);
  for (std::size_t k = 0; k < d; ++k) {
    cplx acc = diag[k] * x[k];
    if (k > 0) acc += off * x[k - 1];
    if (k + 1 < d) acc += off * x[k + 1];
    y[k] = acc;
  }
  return y;
}

ScaledDeterminant::ScaledDeterminant(cplx value) : mantissa_(value) { normalize(); }

ScaledDeterminant::ScaledDeterminant(cplx mantissa, long exponent)
    : mantissa_(mantissa), exponent_(exponent) {
  normalize();
}

void ScaledDeterminant::normalize() {
  if (mantissa_ == cplx{}) {
    exponent_ = 0;
    return;
  }
  // Scale by the larger component so |mantissa| lands in [0.5, 2).
  const double big = std::max(std::abs(mantissa_.real()), std::abs(mantissa_.imag()));
  int e = 0;
  std::frexp(big, &e);  // big in [2^(e-1), 2^e)
  mantissa_ = {std::ldexp(mantissa_.real(), -e + 1), std::ldexp(mantissa_.imag(), -e + 1)};
  exponent_ += e - 1;
  // Now max component in [1, 2); |m| in [1, 2*sqrt(2)). Pull into [0.5, 2).
  if (std::abs(mantissa_) >= 2.0) {
    mantissa_ *= 0.5;
    exponent_ += 1;
  }
}

cplx ScaledDeterminant::value() const {
  const int e = static_cast<int>(exponent_);
  return {std::ldexp(mantissa_.real(), e), std::ldexp(mantissa_.imag(), e)};
}

double ScaledDeterminant::log2_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return std::log2(std::abs(mantissa_)) + static_cast<double>(exponent_);
}

ScaledDeterminant& ScaledDeterminant::operator*=(const ScaledDeterminant& rhs) {
  mantissa_ *= rhs.mantissa_;
  exponent_ += rhs.exponent_;
  normalize();
  return *this;
}

cplx ratio(const ScaledDeterminant& a, const ScaledDeterminant& b) {
  const cplx q = a.mantissa_ / b.mantissa_;
  const int e = static_cast<int>(a.exponent_ - b.exponent_);
  return {std::ldexp(q.real(), e), std::ldexp(q.imag(), e)};
}

FloquetMatrix assemble(std::span<const cplx> momenta, double g0, double g1) {
  if (!(g1 > 0.0))
    throw ValidationError("matrix form requires g1 > 0; use the static closed form for g1 = 0");
  const cplx scale{0.0, 2.0 / g1};
  const cplx ig0{0.0, g0};
  FloquetMatrix m;
  m.diag.reserve(momenta.size());
  for (const cplx& pn : momenta) m.diag.push_back(scale * (2.0 * pn + ig0));
  return m;
}

FloquetMatrix assemble(const ScatteringParams& params) {
  return assemble(ChannelSet(params).momenta(), params.g0, params.g1);
}

TridiagonalFactorization::TridiagonalFactorization(const FloquetMatrix& m) : off_(m.off) {
  const std::size_t d = m.dimension();
  if (d == 0) throw ValidationError("empty matrix");
  const cplx off2 = m.off * m.off;
  pivots_.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    const cplx fill = k == 0 ? cplx{} : off2 / pivots_[k - 1];
    const cplx u = m.diag[k] - fill;
    const double scale = std::abs(m.diag[k]) + std::abs(fill);
    if (!(std::abs(u) > kPivotGuard * scale) || !std::isfinite(std::abs(u)))
      throw SingularMatrixError("tridiagonal pivot vanished at row " + std::to_string(k + 1) +
                                    " (det M = 0; perturb p or change n_max)",
                                k);
    pivots_[k] = u;
  }
}

ScaledDeterminant TridiagonalFactorization::determinant() const {
  ScaledDeterminant det{cplx{1.0, 0.0}};
  for (const cplx& u : pivots_) det *= ScaledDeterminant{u};
  return det;
}

std::vector<cplx> TridiagonalFactorization::solve(std::span<const cplx> b) const {
  const std::size_t d = pivots_.size();
  if (b.size() != d)
    throw ValidationError("right-hand side has length " + std::to_string(b.size()) +
                          ", matrix dimension is " + std::to_string(d));
  // L has unit diagonal and sub-diagonal off/u_{k-1}; U has diagonal u_k and super-diagonal off.
  std::vector<cplx> y(b.begin(), b.end());
  for (std::size_t k = 1; k < d; ++k) y[k] -= off_ / pivots_[k - 1] * y[k - 1];
  std::vector<cplx> x(d);
  x[d - 1] = y[d - 1] / pivots_[d - 1];
  for (std::size_t k = d - 1; k-- > 0;) x[k] = (y[k] - off_ * x[k + 1]) / pivots_[k];
  return x;
}

std::vector<cplx> solve(const FloquetMatrix& m, std::span<const cplx> b) {
  return TridiagonalFactorization(m).solve(b);
}

ScaledDeterminant determinant(const FloquetMatrix& m) {
  const std::size_t d = m.dimension();
  if (d == 0) return ScaledDeterminant{cplx{1.0, 0.0}};
  const cplx off2 = m.off * m.off;
  // D_{k-2}, D_{k-1} share one exponent so the recurrence stays a plain linear combination.
  cplx prev{1.0, 0.0};  // D_{-1}
  cplx cur = m.diag[0];  // D_0
  long exponent = 0;
  for (std::size_t k = 1; k < d; ++k) {
    const cplx next = m.diag[k] * cur - off2 * prev;
    prev = cur;
    cur = next;
    const double big = std::max(std::abs(cur), std::abs(prev));
    if (big == 0.0) return {};
    if (big > 0x1p64 || big < 0x1p-64) {
      int e = 0;
      std::frexp(big, &e);
      cur = {std::ldexp(cur.real(), -e), std::ldexp(cur.imag(), -e)};
      prev = {std::ldexp(prev.real(), -e), std::ldexp(prev.imag(), -e)};
      exponent += e;
    }
  }
  return ScaledDeterminant{cur, exponent};
}

}  // namespace floquet

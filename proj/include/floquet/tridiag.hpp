#pragma once

#include <complex>
#include <span>
#include <vector>

#include "floquet/channels.hpp"

namespace floquet {

/// Tridiagonal matrix with a varying diagonal and one constant value on both
/// off-diagonals. The Floquet system uses off = -1.
struct FloquetMatrix {
  std::vector<cplx> diag;
  cplx off = -1.0;

  std::size_t dimension() const { return diag.size(); }

  /// (M x)_k, used for residual checks.
  std::vector<cplx> apply(std::span<const cplx> x) const;
};

/// Complex number stored as mantissa * 2^exponent with 0.5 <= |mantissa| < 2,
/// or mantissa == 0. Products of thousands of O(sqrt(n)) factors stay finite.
class ScaledDeterminant {
 public:
  ScaledDeterminant() = default;
  ScaledDeterminant(cplx value);  // NOLINT(google-explicit-constructor)
  ScaledDeterminant(cplx mantissa, long exponent);

  cplx mantissa() const { return mantissa_; }
  long exponent() const { return exponent_; }
  bool is_zero() const { return mantissa_ == cplx{}; }

  /// Plain complex value; overflows to inf/underflows to 0 when out of range.
  cplx value() const;
  /// log2 |value|, -inf for zero.
  double log2_abs() const;

  ScaledDeterminant& operator*=(const ScaledDeterminant& rhs);
  friend ScaledDeterminant operator*(ScaledDeterminant lhs, const ScaledDeterminant& rhs) {
    lhs *= rhs;
    return lhs;
  }

  /// a / b as an ordinary complex number (finite whenever the quotient is representable).
  friend cplx ratio(const ScaledDeterminant& a, const ScaledDeterminant& b);

 private:
  void normalize();

  cplx mantissa_{};
  long exponent_ = 0;
};

/// M_kk = (2i/g1)(2 p_n + i g0) with n = k - n_max, off-diagonals -1.
/// Throws ValidationError for g1 == 0; the static problem has a closed form instead.
FloquetMatrix assemble(const ScatteringParams& params);

/// Same diagonal rule for arbitrary (possibly complex, analytically continued) momenta.
FloquetMatrix assemble(std::span<const cplx> momenta, double g0, double g1);

/// LU factors of a tridiagonal matrix without pivoting.
///
/// Elimination runs top to bottom; a pivot whose magnitude falls below
/// 64 eps * (|a_k| + |off|^2 / |u_{k-1}|) raises SingularMatrixError.
class TridiagonalFactorization {
 public:
  explicit TridiagonalFactorization(const FloquetMatrix& m);

  std::span<const cplx> pivots() const { return pivots_; }
  /// Product of the pivots, rescaled as it accumulates.
  ScaledDeterminant determinant() const;
  std::vector<cplx> solve(std::span<const cplx> b) const;

 private:
  cplx off_;
  std::vector<cplx> pivots_;
};

/// Thomas algorithm, O(d).
std::vector<cplx> solve(const FloquetMatrix& m, std::span<const cplx> b);

/// Continuant recurrence D_k = a_k D_{k-1} - off^2 D_{k-2}, renormalised every step.
/// Never fails: an exactly singular matrix yields a zero mantissa.
ScaledDeterminant determinant(const FloquetMatrix& m);

}  // namespace floquet

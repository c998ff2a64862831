#pragma once

#include <map>
#include <vector>

#include "volpot/types.hpp"

namespace volpot {

/// Multi-index gamma in N^n; its length is the space dimension.
using MultiIndex = std::vector<int>;

/// Coefficients of the constant-coefficient operator
///   P[a,D]u = sum_{l,j} a2(l,j) d_l d_j u + sum_j a1(j) d_j u + a0 u
/// with a real symmetric, positive definite principal part.
///
/// Instances are immutable. Every constructor symmetrizes a2 exactly and
/// rejects principal parts whose ellipticity margin is at or below 1e-12.
class OperatorCoefficients {
 public:
  static constexpr double kEllipticityThreshold = 1e-12;

  /// Throws SymmetryError when a2 is not symmetric to 1e-14 relative, and
  /// EllipticityError when the smallest eigenvalue is not positive.
  static OperatorCoefficients make(const Matrix& a2, const CVector& a1, Complex a0);
  static OperatorCoefficients make(const Matrix& a2);

  static OperatorCoefficients laplacian(int n);
  /// Delta - kappa^2.
  static OperatorCoefficients modified_helmholtz(int n, double kappa);

  int dim() const { return static_cast<int>(a2_.rows()); }
  const Matrix& a2() const { return a2_; }
  const CVector& a1() const { return a1_; }
  Complex a0() const { return a0_; }

  bool has_lower_order_terms() const;

 private:
  OperatorCoefficients(Matrix a2, CVector a1, Complex a0)
      : a2_(std::move(a2)), a1_(std::move(a1)), a0_(a0) {}

  Matrix a2_;
  CVector a1_;
  Complex a0_;
};

/// Builds coefficients from the multi-index form a_gamma, |gamma| <= 2.
/// Missing keys are zero. a_{jj} = a_{2e_j}, a_{lj} = a_{e_l+e_j}/2 (l != j),
/// a_j = a_{e_j}, a = a_0. Second-order coefficients must be real.
OperatorCoefficients from_multiindex(int n, const std::map<MultiIndex, Complex>& coeffs);

/// inf over the unit sphere of xi^T a2 xi, i.e. the smallest eigenvalue of a2.
double ellipticity_margin(const OperatorCoefficients& op);
double smallest_eigenvalue(const Matrix& symmetric);

/// Lower-triangular T with positive diagonal and T T^T = a2.
Matrix factor_principal(const OperatorCoefficients& op);

/// Central-difference application of P[a,D] to u at x, second order in h.
/// Uses the 2n+1 axis points plus four diagonal points per coordinate pair.
Complex apply_operator_fd(const OperatorCoefficients& op, const ScalarField& u, const Point& x,
                          double h);

}  // namespace volpot

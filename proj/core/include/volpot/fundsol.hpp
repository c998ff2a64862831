#pragma once

#include <utility>

#include "volpot/operators.hpp"
#include "volpot/types.hpp"

namespace volpot {

enum class FundamentalKind { laplace, principal, modified_helmholtz };

const char* to_string(FundamentalKind kind);

/// Laplace fundamental solution S_n: ln|x|/(2 pi) in 2D, -1/(4 pi |x|) in 3D.
double laplace_Sn(int n, const Point& x);

/// Fundamental solution of the principal part of op: S_n(T^{-1}x)/sqrt(det a2).
double principal_anisotropic(const OperatorCoefficients& op, const Point& x);

/// Fundamental solution of Delta - kappa^2:
/// -exp(-kappa r)/(4 pi r) in 3D, -K0(kappa r)/(2 pi) in 2D.
double modified_helmholtz(int n, double kappa, const Point& x);

/// An evaluable fundamental solution S_a together with the split of its
/// gradient kernel d_j S_a = k_{j,1} + k_{j,2}, where
///   k_{j,1}(x) = |T^{-1}x|^{-n} ((a2)^{-1} x)_j / (s_n sqrt(det a2))
/// is odd and positively homogeneous of degree -(n-1), and k_{j,2} is the
/// weakly singular remainder.
///
/// Fundamental solutions of all three kinds are real valued. For the
/// modified Helmholtz kind the remainder is evaluated from its own closed form
/// and the gradient is defined as k_{j,1} + k_{j,2}, so the split sums to the
/// gradient bit for bit.
class FundamentalSolution {
 public:
  static FundamentalSolution laplace(int n);
  /// Requires a1 = 0 and a0 = 0.
  static FundamentalSolution principal(const OperatorCoefficients& op);
  static FundamentalSolution modified_helmholtz(int n, double kappa);
  /// Chooses the kind matching op, or throws UnsupportedOperatorError.
  static FundamentalSolution for_operator(const OperatorCoefficients& op);

  FundamentalKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double kappa() const { return kappa_; }
  const OperatorCoefficients& op() const { return op_; }
  const Matrix& factor() const { return t_; }

  double eval(const Point& x) const;
  Vector grad(const Point& x) const;
  Matrix hess(const Point& x) const;

  /// (k_{j,1}(x), k_{j,2}(x)) for component j (0-based).
  std::pair<double, double> gradient_split(int j, const Point& x) const;

  /// The vector (k_{j,1}(x))_j.
  Vector homogeneous_gradient(const Point& x) const;
  /// The vector (k_{j,2}(x))_j.
  Vector remainder_gradient(const Point& x) const;
  /// Entry (l, j) = d_l k_{j,1}(x).
  Matrix homogeneous_jacobian(const Point& x) const;
  /// Entry (l, j) = d_l k_{j,2}(x).
  Matrix remainder_jacobian(const Point& x) const;

 private:
  FundamentalSolution(FundamentalKind kind, OperatorCoefficients op, double kappa);

  void check_point(const Point& x) const;
  // Radial profile derivatives of the modified Helmholtz remainder.
  void remainder_radial(double r, double& d1, double& d2) const;

  FundamentalKind kind_;
  OperatorCoefficients op_;
  int dim_;
  double kappa_ = 0.0;
  Matrix t_;
  Matrix a2_inv_;
  double sqrt_det_ = 1.0;
  double norm_ = 1.0;  // 1/(s_n sqrt(det a2))
};

}  // namespace volpot

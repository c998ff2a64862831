#include "volpot/fundsol.hpp"

#include <cmath>

#include "volpot/bessel.hpp"

namespace volpot {

namespace {

void require_nonzero(const Point& x) {
  if (x.norm() == 0.0) throw SingularPointError("fundamental solution evaluated at the origin");
}

// exp(-t)(1+t) - 1 without cancellation at small t.
double screened_profile_minus_one(double t) {
  if (t < 0.1) {
    double term = 1.0;  // t^k/k!
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      term *= t / k;
      if (k >= 2) sum += ((k % 2 == 0) ? 1.0 : -1.0) * (1.0 - k) * term;
    }
    return sum;
  }
  return std::exp(-t) * (1.0 + t) - 1.0;
}

Matrix radial_hessian(const Point& x, double d1, double d2) {
  const int n = static_cast<int>(x.size());
  const double r = x.norm();
  const Vector e = x / r;
  Matrix h = (d1 / r) * Matrix::Identity(n, n);
  h += (d2 - d1 / r) * (e * e.transpose());
  return h;
}

}  // namespace

const char* to_string(FundamentalKind kind) {
  switch (kind) {
    case FundamentalKind::laplace:
      return "laplace";
    case FundamentalKind::principal:
      return "principal";
    case FundamentalKind::modified_helmholtz:
      return "modified-helmholtz";
  }
  return "unknown";
}

double laplace_Sn(int n, const Point& x) {
  require_dim(n);
  if (x.size() != n) throw DomainError("point dimension does not match");
  require_nonzero(x);
  const double r = x.norm();
  if (n == 2) return std::log(r) / (2.0 * kPi);
  return -1.0 / (4.0 * kPi * r);
}

double principal_anisotropic(const OperatorCoefficients& op, const Point& x) {
  const Matrix t = factor_principal(op);
  const Point u = t.triangularView<Eigen::Lower>().solve(x);
  const double sqrt_det = t.diagonal().prod();
  return laplace_Sn(op.dim(), u) / sqrt_det;
}

double modified_helmholtz(int n, double kappa, const Point& x) {
  require_dim(n);
  if (!(kappa > 0.0)) throw DomainError("modified Helmholtz requires kappa > 0");
  if (x.size() != n) throw DomainError("point dimension does not match");
  require_nonzero(x);
  const double r = x.norm();
  if (n == 3) return -std::exp(-kappa * r) / (4.0 * kPi * r);
  return -bessel::k0(kappa * r) / (2.0 * kPi);
}

FundamentalSolution::FundamentalSolution(FundamentalKind kind, OperatorCoefficients op, double kappa)
    : kind_(kind), op_(std::move(op)), dim_(op_.dim()), kappa_(kappa) {
  t_ = factor_principal(op_);
  sqrt_det_ = t_.diagonal().prod();
  a2_inv_ = op_.a2().inverse();
  norm_ = 1.0 / (unit_sphere_measure(dim_) * sqrt_det_);
}

FundamentalSolution FundamentalSolution::laplace(int n) {
  return FundamentalSolution(FundamentalKind::laplace, OperatorCoefficients::laplacian(n), 0.0);
}

FundamentalSolution FundamentalSolution::principal(const OperatorCoefficients& op) {
  if (op.has_lower_order_terms()) {
    throw UnsupportedOperatorError(
        "anisotropic fundamental solutions are available only for a1 = 0 and a0 = 0");
  }
  return FundamentalSolution(FundamentalKind::principal, op, 0.0);
}

FundamentalSolution FundamentalSolution::modified_helmholtz(int n, double kappa) {
  return FundamentalSolution(FundamentalKind::modified_helmholtz,
                             OperatorCoefficients::modified_helmholtz(n, kappa), kappa);
}

FundamentalSolution FundamentalSolution::for_operator(const OperatorCoefficients& op) {
  const int n = op.dim();
  const bool identity = op.a2() == Matrix::Identity(n, n);
  const bool no_drift = op.a1().cwiseAbs().maxCoeff() == 0.0;
  if (!no_drift) {
    throw UnsupportedOperatorError("no closed-form fundamental solution for first-order terms");
  }
  if (op.a0() == Complex(0.0)) {
    return identity ? laplace(n) : principal(op);
  }
  if (identity && op.a0().imag() == 0.0 && op.a0().real() < 0.0) {
    return modified_helmholtz(n, std::sqrt(-op.a0().real()));
  }
  throw UnsupportedOperatorError(
      "closed-form fundamental solutions cover Laplace, anisotropic principal parts and "
      "Delta - kappa^2 only");
}

void FundamentalSolution::check_point(const Point& x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match fundamental solution");
  require_nonzero(x);
}

double FundamentalSolution::eval(const Point& x) const {
  check_point(x);
  switch (kind_) {
    case FundamentalKind::laplace:
      return laplace_Sn(dim_, x);
    case FundamentalKind::principal: {
      const Point u = t_.triangularView<Eigen::Lower>().solve(x);
      return laplace_Sn(dim_, u) / sqrt_det_;
    }
    case FundamentalKind::modified_helmholtz:
      return volpot::modified_helmholtz(dim_, kappa_, x);
  }
  return 0.0;
}

Vector FundamentalSolution::homogeneous_gradient(const Point& x) const {
  check_point(x);
  const Vector w = a2_inv_ * x;
  const double q = x.dot(w);
  return norm_ * std::pow(q, -0.5 * dim_) * w;
}

Matrix FundamentalSolution::homogeneous_jacobian(const Point& x) const {
  check_point(x);
  const Vector w = a2_inv_ * x;
  const double q = x.dot(w);
  const double qpow = std::pow(q, -0.5 * dim_);
  Matrix jac = norm_ * qpow * a2_inv_;
  jac -= (norm_ * dim_ * qpow / q) * (w * w.transpose());
  return jac;
}

void FundamentalSolution::remainder_radial(double r, double& d1, double& d2) const {
  const double t = kappa_ * r;
  if (dim_ == 3) {
    const double gm1 = screened_profile_minus_one(t);
    d1 = gm1 / (4.0 * kPi * r * r);
    d2 = -kappa_ * kappa_ * std::exp(-t) / (4.0 * kPi * r) - 2.0 * gm1 / (4.0 * kPi * r * r * r);
  } else {
    const double xk = bessel::x_k1_minus_one(t);
    d1 = xk / (2.0 * kPi * r);
    d2 = -kappa_ * kappa_ * bessel::k0(t) / (2.0 * kPi) - xk / (2.0 * kPi * r * r);
  }
}

Vector FundamentalSolution::remainder_gradient(const Point& x) const {
  check_point(x);
  if (kind_ != FundamentalKind::modified_helmholtz) return Vector::Zero(dim_);
  const double r = x.norm();
  double d1 = 0.0;
  double d2 = 0.0;
  remainder_radial(r, d1, d2);
  return (d1 / r) * x;
}

Matrix FundamentalSolution::remainder_jacobian(const Point& x) const {
  check_point(x);
  if (kind_ != FundamentalKind::modified_helmholtz) return Matrix::Zero(dim_, dim_);
  double d1 = 0.0;
  double d2 = 0.0;
  remainder_radial(x.norm(), d1, d2);
  return radial_hessian(x, d1, d2);
}

Vector FundamentalSolution::grad(const Point& x) const {
  Vector g = homogeneous_gradient(x);
  if (kind_ == FundamentalKind::modified_helmholtz) g += remainder_gradient(x);
  return g;
}

Matrix FundamentalSolution::hess(const Point& x) const {
  check_point(x);
  if (kind_ != FundamentalKind::modified_helmholtz) return homogeneous_jacobian(x);
  const double r = x.norm();
  const double t = kappa_ * r;
  double d1 = 0.0;
  double d2 = 0.0;
  if (dim_ == 3) {
    const double g = std::exp(-t) * (1.0 + t);
    d1 = g / (4.0 * kPi * r * r);
    d2 = -kappa_ * kappa_ * std::exp(-t) / (4.0 * kPi * r) - 2.0 * g / (4.0 * kPi * r * r * r);
  } else {
    const double k1 = bessel::k1(t);
    d1 = kappa_ * k1 / (2.0 * kPi);
    d2 = -kappa_ * kappa_ * (bessel::k0(t) + k1 / t) / (2.0 * kPi);
  }
  return radial_hessian(x, d1, d2);
}

std::pair<double, double> FundamentalSolution::gradient_split(int j, const Point& x) const {
  if (j < 0 || j >= dim_) throw DomainError("gradient component out of range");
  const double k1 = homogeneous_gradient(x)(j);
  const double k2 = remainder_gradient(x)(j);
  return {k1, k2};
}

}  // namespace volpot

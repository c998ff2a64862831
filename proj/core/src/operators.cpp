#include "volpot/operators.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace volpot {

namespace {

Matrix symmetrized(const Matrix& a2) {
  const double scale = std::max(a2.cwiseAbs().maxCoeff(), 1e-300);
  for (int l = 0; l < a2.rows(); ++l) {
    for (int j = l + 1; j < a2.cols(); ++j) {
      if (std::abs(a2(l, j) - a2(j, l)) > 1e-14 * scale) {
        std::ostringstream msg;
        msg << "principal coefficient matrix a2 is not symmetric: a2(" << l + 1 << "," << j + 1
            << ") = " << a2(l, j) << " but a2(" << j + 1 << "," << l + 1 << ") = " << a2(j, l);
        throw SymmetryError(msg.str());
      }
    }
  }
  Matrix s = a2;
  for (int l = 0; l < a2.rows(); ++l) {
    for (int j = l + 1; j < a2.cols(); ++j) {
      const double avg = 0.5 * (a2(l, j) + a2(j, l));
      s(l, j) = avg;
      s(j, l) = avg;
    }
  }
  return s;
}

}  // namespace

double smallest_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

OperatorCoefficients OperatorCoefficients::make(const Matrix& a2, const CVector& a1, Complex a0) {
  if (a2.rows() != a2.cols()) throw DomainError("a2 must be square");
  require_dim(static_cast<int>(a2.rows()));
  if (a1.size() != a2.rows()) throw DomainError("a1 must have length equal to the dimension");
  if (!a2.allFinite()) throw DomainError("a2 has non-finite entries");

  Matrix sym = symmetrized(a2);
  const double margin = smallest_eigenvalue(sym);
  if (!(margin > kEllipticityThreshold)) {
    std::ostringstream msg;
    msg << "operator is not elliptic: inf over |xi|=1 of xi^T a2 xi equals " << margin
        << " but the ellipticity assumption requires it to be positive (threshold "
        << kEllipticityThreshold << ")";
    throw EllipticityError(msg.str());
  }
  return OperatorCoefficients(std::move(sym), a1, a0);
}

OperatorCoefficients OperatorCoefficients::make(const Matrix& a2) {
  return make(a2, CVector::Zero(a2.rows()), Complex(0.0));
}

OperatorCoefficients OperatorCoefficients::laplacian(int n) {
  require_dim(n);
  return make(Matrix::Identity(n, n));
}

OperatorCoefficients OperatorCoefficients::modified_helmholtz(int n, double kappa) {
  require_dim(n);
  if (!(kappa > 0.0)) throw DomainError("modified Helmholtz requires kappa > 0");
  return make(Matrix::Identity(n, n), CVector::Zero(n), Complex(-kappa * kappa, 0.0));
}

bool OperatorCoefficients::has_lower_order_terms() const {
  return a0_ != Complex(0.0) || a1_.cwiseAbs().maxCoeff() != 0.0;
}

OperatorCoefficients from_multiindex(int n, const std::map<MultiIndex, Complex>& coeffs) {
  require_dim(n);
  Matrix a2 = Matrix::Zero(n, n);
  CVector a1 = CVector::Zero(n);
  Complex a0(0.0);

  for (const auto& [gamma, value] : coeffs) {
    if (static_cast<int>(gamma.size()) != n) {
      throw DomainError("multi-index length does not match the dimension");
    }
    int order = 0;
    for (int g : gamma) {
      if (g < 0) throw DomainError("multi-index entries must be nonnegative");
      order += g;
    }
    if (order > 2) throw DomainError("multi-index order exceeds 2");

    if (order == 0) {
      a0 = value;
    } else if (order == 1) {
      for (int j = 0; j < n; ++j) {
        if (gamma[j] == 1) a1(j) = value;
      }
    } else {
      if (value.imag() != 0.0) {
        throw SymmetryError("second-order coefficients must be real (a2 is a real symmetric matrix)");
      }
      std::vector<int> idx;
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < gamma[j]; ++k) idx.push_back(j);
      }
      const int l = idx[0];
      const int j = idx[1];
      if (l == j) {
        a2(l, l) = value.real();
      } else {
        a2(l, j) = 0.5 * value.real();
        a2(j, l) = 0.5 * value.real();
      }
    }
  }
  return OperatorCoefficients::make(a2, a1, a0);
}

double ellipticity_margin(const OperatorCoefficients& op) { return smallest_eigenvalue(op.a2()); }

Matrix factor_principal(const OperatorCoefficients& op) {
  const Matrix& a2 = op.a2();
  Eigen::LLT<Matrix> llt(a2);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError("principal part is not positive definite; Cholesky factorization failed");
  }
  Matrix t = llt.matrixL();
  for (int i = 0; i < t.rows(); ++i) {
    if (!(t(i, i) > 0.0)) throw FactorizationError("Cholesky factor has a nonpositive diagonal entry");
  }
  return t;
}

Complex apply_operator_fd(const OperatorCoefficients& op, const ScalarField& u, const Point& x,
                          double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  const int n = op.dim();
  if (x.size() != n) throw DomainError("point dimension does not match operator");

  const Complex u0 = u(x);
  Complex result = op.a0() * u0;
  const double h2 = h * h;

  auto shifted = [&](int i, double si, int j, double sj) {
    Point y = x;
    y(i) += si;
    if (j >= 0) y(j) += sj;
    return u(y);
  };

  for (int i = 0; i < n; ++i) {
    const Complex up = shifted(i, h, -1, 0.0);
    const Complex um = shifted(i, -h, -1, 0.0);
    result += op.a2()(i, i) * (up - 2.0 * u0 + um) / h2;
    result += op.a1()(i) * (up - um) / (2.0 * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Complex upp = shifted(i, h, j, h);
      const Complex upm = shifted(i, h, j, -h);
      const Complex ump = shifted(i, -h, j, h);
      const Complex umm = shifted(i, -h, j, -h);
      const Complex mixed = (upp - upm - ump + umm) / (4.0 * h2);
      // a_{ij} and a_{ji} both multiply the same mixed derivative
      result += 2.0 * op.a2()(i, j) * mixed;
    }
  }
  return result;
}

}  // namespace volpot

#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace volpot {

using Complex = std::complex<double>;

// Points, vectors and matrices carry their dimension (2 or 3) at run time but
// never allocate: the storage is fixed at 3.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Vector = Point;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

using ScalarField = std::function<Complex(const Point&)>;

inline constexpr double kPi = 3.14159265358979323846;

inline Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

inline Point make_point(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

/// Surface measure of the unit sphere in R^n (2*pi for n=2, 4*pi for n=3).
inline double unit_sphere_measure(int n) { return n == 2 ? 2.0 * kPi : 4.0 * kPi; }

// Error hierarchy. Every failure the library reports is a volpot::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EllipticityError : public Error {
 public:
  using Error::Error;
};

class SymmetryError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  using Error::Error;
};

class SingularPointError : public Error {
 public:
  using Error::Error;
};

class NearBoundaryError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InconsistentSampleError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperatorError : public Error {
 public:
  using Error::Error;
};

inline void require_dim(int n) {
  if (n != 2 && n != 3) throw DomainError("dimension must be 2 or 3, got " + std::to_string(n));
}

}  // namespace volpot

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "volpot/geometry.hpp"
#include "volpot/types.hpp"

namespace volpot {

using GradientField = std::function<CVector(const Point&)>;

/// A density on the closure of a domain. The gradient is optional; kinks list
/// the hyperplanes across which the density is only Lipschitz.
struct Density {
  std::string name;
  ScalarField value;
  GradientField gradient;
  std::vector<Hyperplane> kinks;
  /// Closed ball outside which the density vanishes, if known.
  std::optional<Ball> support;

  Complex operator()(const Point& y) const { return value(y); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
  CVector grad(const Point& y) const;
  /// d_j of the density as a density of its own (requires a gradient).
  Density partial(int j) const;
};

/// Boundary density, evaluated at a boundary point together with its outward normal.
using BoundaryDensity = std::function<Complex(const Point& y, const Vector& normal)>;

/// A representation (f0, f1, ..., fn) of f0 + sum_j d_j f_j.
struct NegativeExponentDensity {
  std::vector<Density> components;
  double alpha = 1.0;
  double norm_bound = 0.0;

  int dim() const { return static_cast<int>(components.size()) - 1; }
  /// f0 + sum_j d_j f_j evaluated pointwise from the component gradients.
  Complex realized(const Point& y) const;
};

namespace density {

Density constant(Complex c);
Density one();
Density coordinate(int j);
Density x1();
Density x1sq();
/// |y1|, Lipschitz with a kink on {y1 = 0}.
Density abs_x1();
/// cos(k y1).
Density cos_k(double k);
/// Smooth bump with peak value 1 supported in B(center, radius).
Density bump(const Point& center, double radius);
Density sum(const Density& a, const Density& b);
Density scaled(const Density& a, Complex c);

/// Preset by name: one, x1, x1sq, abs_x1, cos_k (uses k), bump (ball of
/// radius 0.5 about the origin). Throws DomainError for unknown names.
Density preset(const std::string& name, int n, double k = 1.0);

/// Values sampled at scattered points, interpolated by inverse distance
/// weighting over the nearest n+2 samples.
Density tabulated(std::vector<Point> nodes, std::vector<Complex> values);
/// Reads rows y1,y2[,y3],value; a header line is skipped when present.
Density tabulated_csv(const std::string& path, int n);

/// Extension to the bounding ball: the value at y outside the domain is the
/// value at the boundary point on the ray from the center through y.
Density extended(const Density& f, const Domain& domain);

/// Restriction of a density to the boundary.
BoundaryDensity trace(const Density& f);
/// nu_j * f on the boundary.
BoundaryDensity normal_component(const Density& f, int j);

}  // namespace density

}  // namespace volpot

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "volpot/types.hpp"

namespace volpot {

enum class DomainKind { ball, star2d };
enum class Location { interior, boundary, exterior };

using RadialFunction = std::function<double(double)>;

/// Half-space boundary {y : normal . y = offset}. Densities that are only
/// piecewise smooth declare such planes so that quadrature can split there.
struct Hyperplane {
  Vector normal;
  double offset = 0.0;
};

struct Ball {
  Point center;
  double radius = 0.0;
};

struct BoundaryQuadrature {
  std::vector<Point> nodes;
  std::vector<Vector> normals;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

struct VolumeQuadrature {
  std::vector<Point> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
};

/// A bounded domain with smooth boundary: a ball (n = 2, 3) or a planar
/// domain star-shaped about its center, {c + r(cos t, sin t) : r < rho(t)}.
///
/// For planar domains the boundary parameter is the polar angle t about the
/// center, so a boundary point's parameter is recovered exactly by atan2.
class Domain {
 public:
  /// Points closer than this to the boundary are classified as boundary points.
  static constexpr double kBoundaryBand = 1e-9;

  static Domain make_ball(int n, const Point& center, double radius);
  static Domain make_star2d(RadialFunction rho, RadialFunction drho, const Point& center,
                            std::string label = "star");
  /// Derivative of rho by a fourth-order central difference.
  static Domain make_star2d(RadialFunction rho, const Point& center, std::string label = "star");
  static Domain make_ellipse(double a, double b, const Point& center);
  /// rho(t) = c0 + c1 cos t + c2 cos 2t + ...
  static Domain make_cosine_star(std::vector<double> coeffs, const Point& center);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Point& center() const { return center_; }
  const std::string& label() const { return label_; }
  /// Ball radius; for planar star domains the maximum of rho.
  double radius() const { return max_rho_; }
  /// r with closure(Omega) inside B(0, r).
  double bounding_radius() const;

  double rho(double t) const;
  double drho(double t) const;

  // Planar boundary parametrization by the polar angle about the center.
  Point boundary_point(double t) const;
  Vector boundary_tangent(double t) const;  // d/dt of boundary_point
  Vector boundary_normal(double t) const;   // outward unit normal

  /// Outward unit normal at a point on (or radially projected onto) the boundary.
  Vector normal_at(const Point& y) const;

  Location locate(const Point& x) const;
  bool contains(const Point& x) const { return locate(x) == Location::interior; }
  double boundary_distance(const Point& x) const;
  /// Planar domains: parameter of the closest boundary point.
  double nearest_boundary_parameter(const Point& x) const;

  /// Maximal intervals [a, b], a >= 0, of {r : origin + r*dir in Omega}.
  std::vector<std::pair<double, double>> ray_segments(const Point& origin, const Vector& dir) const;

  /// The boundary point on the ray from the center through y (y itself when
  /// y lies in the closure).
  Point radial_projection(const Point& y) const;

 private:
  Domain() = default;

  DomainKind kind_ = DomainKind::ball;
  int dim_ = 2;
  Point center_;
  double max_rho_ = 1.0;
  double min_rho_ = 1.0;
  RadialFunction rho_;
  RadialFunction drho_;
  std::string label_;
};

/// Unit vectors u1, u2 such that (e, u1, u2) is a right-handed orthonormal
/// basis of R^3. e must be a unit vector.
std::pair<Vector, Vector> orthonormal_complement(const Vector& e);

/// Directions on the unit sphere (3D): Gauss-Legendre in cos(theta) times the
/// trapezoid rule in azimuth. Weights sum to 4 pi.
struct SphereRule {
  std::vector<Vector> directions;
  std::vector<double> weights;
};
SphereRule sphere_rule(int n_polar, int n_azimuth);

/// Trapezoid rule (2D) or product sphere rule (3D) on the boundary.
BoundaryQuadrature boundary_rule(const Domain& domain, int N);

/// Polar-mapped product rule about the center: Gauss-Legendre in the radial
/// fraction, trapezoid in angle (2D); Gauss-Legendre radial times sphere rule (3D).
VolumeQuadrature volume_rule(const Domain& domain, int N);

struct PolarRuleOptions {
  std::span<const Hyperplane> kinks{};
  /// When positive, the ball B(x, excise_radius) is removed from the region.
  double excise_radius = 0.0;
  /// Rays are clipped to this ball when the integrand vanishes outside it.
  /// Honored in 2D, and in 3D only for x inside the ball.
  std::optional<Ball> support{};
};

/// Rule in polar coordinates about x covering Omega (minus the optional
/// excised ball). The Jacobian r^{n-1} cancels kernel singularities at x.
/// Angular panels are refined adaptively on the ray geometry, so the rule
/// stays accurate for x close to the boundary on either side.
/// Radial intervals starting at x use the substitution r = b u^3; intervals
/// starting at a small positive radius are graded dyadically toward x.
VolumeQuadrature polar_rule(const Domain& domain, const Point& x, int N,
                            const PolarRuleOptions& options = {});

/// polar_rule for a strictly interior point. Throws NearBoundaryError for
/// points within the boundary band and DomainError for exterior points.
VolumeQuadrature singular_volume_rule(const Domain& domain, const Point& x, int N,
                                      std::span<const Hyperplane> kinks = {});

}  // namespace volpot

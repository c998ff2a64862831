#include "volpot/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "volpot/quadrature.hpp"

namespace volpot {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double t) {
  double w = std::fmod(t, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < 100 && (hi - lo) > 1e-15; ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::pair<Vector, Vector> orthonormal_complement(const Vector& e) {
  Vector helper = Vector::Zero(3);
  if (std::abs(e(0)) < 0.9) {
    helper(0) = 1.0;
  } else {
    helper(1) = 1.0;
  }
  Vector u1 = helper - helper.dot(e) * e;
  u1.normalize();
  Vector u2(3);
  u2 << e(1) * u1(2) - e(2) * u1(1), e(2) * u1(0) - e(0) * u1(2), e(0) * u1(1) - e(1) * u1(0);
  return {u1, u2};
}

namespace {

struct RadialPiece {
  double a;
  double b;
};

void ray_pieces(const Domain& domain, const Point& x, const Vector& dir,
                const PolarRuleOptions& options, std::vector<RadialPiece>& out) {
  out.clear();
  double keep_lo = options.excise_radius;
  double keep_hi = std::numeric_limits<double>::infinity();
  if (options.support) {
    const Vector oc = x - options.support->center;
    const double beta = dir.dot(oc);
    const double disc = beta * beta - (oc.squaredNorm() - options.support->radius * options.support->radius);
    if (disc <= 0.0) return;
    keep_lo = std::max(keep_lo, -beta - std::sqrt(disc));
    keep_hi = -beta + std::sqrt(disc);
  }
  std::array<double, 16> cuts{};
  for (auto [a, b] : domain.ray_segments(x, dir)) {
    a = std::max(a, keep_lo);
    b = std::min(b, keep_hi);
    if (!(b > a)) continue;
    std::size_t ncut = 0;
    for (const auto& plane : options.kinks) {
      const double along = plane.normal.dot(dir);
      if (along == 0.0) continue;
      const double rk = (plane.offset - plane.normal.dot(x)) / along;
      const double margin = 1e-13 * (b - a);
      if (rk > a + margin && rk < b - margin && ncut < cuts.size()) cuts[ncut++] = rk;
    }
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(ncut));
    double lo = a;
    for (std::size_t i = 0; i < ncut; ++i) {
      out.push_back({lo, cuts[i]});
      lo = cuts[i];
    }
    out.push_back({lo, b});
  }
}

// Radial nodes/weights (without the r^{n-1} Jacobian) for one piece.
void radial_nodes(double a, double b, int N, std::vector<double>& r, std::vector<double>& w) {
  r.clear();
  w.clear();
  const auto& gl = quad::gauss_legendre(N);
  if (a == 0.0) {
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double u = 0.5 * (gl.nodes[i] + 1.0);
      const double wu = 0.5 * gl.weights[i];
      r.push_back(b * u * u * u);
      w.push_back(3.0 * b * u * u * wu);
    }
    return;
  }
  double lo = a;
  if (a < 0.25 * b) {
    const auto& glm = quad::gauss_legendre(std::max(8, N / 4));
    while (lo < 0.25 * b) {
      const double hi = 2.0 * lo;
      quad::append_mapped(glm, lo, hi, r, w);
      lo = hi;
    }
  }
  quad::append_mapped(gl, lo, b, r, w);
}

// Proxies for the angular refinement: integrals along the ray of the radial
// profiles met by the supported kernels, plus a piece-length cube that
// reacts to kink crossings.
constexpr int kProxyCount = 5;

void ray_proxies(int n, const std::vector<RadialPiece>& pieces, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  auto log_antiderivative = [](double r) {
    return r == 0.0 ? 0.0 : 0.25 * r * r * (2.0 * std::log(r) - 1.0);
  };
  for (const auto& p : pieces) {
    const double len = p.b - p.a;
    if (n == 2) {
      out[0] += 0.5 * (p.b * p.b - p.a * p.a);
      out[1] += len;
      out[2] += log_antiderivative(p.b) - log_antiderivative(p.a);
    } else {
      out[0] += (p.b * p.b * p.b - p.a * p.a * p.a) / 3.0;
      out[1] += 0.5 * (p.b * p.b - p.a * p.a);
      out[2] += len;
    }
    out[3] += len * len * len;
    if (p.a > 0.0) out[4] += std::log(p.b / p.a);
  }
}

}  // namespace

double VolumeQuadrature::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

Domain Domain::make_ball(int n, const Point& center, double radius) {
  require_dim(n);
  if (center.size() != n) throw DomainError("ball center dimension mismatch");
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  Domain d;
  d.kind_ = DomainKind::ball;
  d.dim_ = n;
  d.center_ = center;
  d.max_rho_ = radius;
  d.min_rho_ = radius;
  d.rho_ = [radius](double) { return radius; };
  d.drho_ = [](double) { return 0.0; };
  d.label_ = n == 2 ? "disk" : "ball";
  return d;
}

Domain Domain::make_star2d(RadialFunction rho, RadialFunction drho, const Point& center,
                           std::string label) {
  if (center.size() != 2) throw DomainError("star domains are planar");
  Domain d;
  d.kind_ = DomainKind::star2d;
  d.dim_ = 2;
  d.center_ = center;
  d.max_rho_ = 0.0;
  d.min_rho_ = std::numeric_limits<double>::infinity();
  constexpr int kSamples = 4096;
  for (int i = 0; i < kSamples; ++i) {
    const double t = kTwoPi * i / kSamples;
    const double r = rho(t);
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw DomainError("radial function must be positive; rho(" + std::to_string(t) +
                        ") = " + std::to_string(r));
    }
    const double r_shift = rho(t + kTwoPi);
    if (std::abs(r_shift - r) > 1e-10 * r) throw DomainError("radial function is not 2*pi periodic");
    d.max_rho_ = std::max(d.max_rho_, r);
    d.min_rho_ = std::min(d.min_rho_, r);
  }
  d.rho_ = std::move(rho);
  d.drho_ = std::move(drho);
  d.label_ = std::move(label);
  return d;
}

Domain Domain::make_star2d(RadialFunction rho, const Point& center, std::string label) {
  RadialFunction drho = [rho](double t) {
    constexpr double h = 1e-3;
    return (-rho(t + 2 * h) + 8.0 * rho(t + h) - 8.0 * rho(t - h) + rho(t - 2 * h)) / (12.0 * h);
  };
  return make_star2d(rho, drho, center, std::move(label));
}

Domain Domain::make_ellipse(double a, double b, const Point& center) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("ellipse semi-axes must be positive");
  auto rho = [a, b](double t) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    return a * b / std::sqrt(b * b * c * c + a * a * s * s);
  };
  auto drho = [a, b](double t) {
    const double c = std::cos(t);
    const double s = std::sin(t);
    const double q = b * b * c * c + a * a * s * s;
    return -0.5 * a * b * std::pow(q, -1.5) * 2.0 * (a * a - b * b) * s * c;
  };
  return make_star2d(rho, drho, center, "ellipse");
}

Domain Domain::make_cosine_star(std::vector<double> coeffs, const Point& center) {
  if (coeffs.empty()) throw DomainError("cosine series needs at least one coefficient");
  auto rho = [coeffs](double t) {
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * std::cos(k * t);
    return s;
  };
  auto drho = [coeffs](double t) {
    double s = 0.0;
    for (std::size_t k = 1; k < coeffs.size(); ++k) s -= coeffs[k] * k * std::sin(k * t);
    return s;
  };
  return make_star2d(rho, drho, center, "star");
}

double Domain::bounding_radius() const { return center_.norm() + 1.05 * max_rho_; }

double Domain::rho(double t) const { return rho_(t); }
double Domain::drho(double t) const { return drho_(t); }

Point Domain::boundary_point(double t) const {
  if (dim_ != 2) throw DomainError("boundary_point(t) is defined for planar domains");
  const double r = rho_(t);
  return center_ + make_point(r * std::cos(t), r * std::sin(t));
}

Vector Domain::boundary_tangent(double t) const {
  if (dim_ != 2) throw DomainError("boundary_tangent(t) is defined for planar domains");
  const double r = rho_(t);
  const double dr = drho_(t);
  const double c = std::cos(t);
  const double s = std::sin(t);
  return make_point(dr * c - r * s, dr * s + r * c);
}

Vector Domain::boundary_normal(double t) const {
  const Vector tau = boundary_tangent(t);
  Vector nu = make_point(tau(1), -tau(0));
  return nu / nu.norm();
}

Vector Domain::normal_at(const Point& y) const {
  const Vector d = y - center_;
  if (dim_ == 3 || kind_ == DomainKind::ball) return d / d.norm();
  return boundary_normal(std::atan2(d(1), d(0)));
}

double Domain::nearest_boundary_parameter(const Point& x) const {
  if (dim_ != 2) throw DomainError("boundary parameters are defined for planar domains");
  const Vector d = x - center_;
  if (kind_ == DomainKind::ball) return d.norm() > 0.0 ? wrap_angle(std::atan2(d(1), d(0))) : 0.0;
  constexpr int kSamples = 1024;
  double best_t = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    const double t = kTwoPi * i / kSamples;
    const double dist2 = (boundary_point(t) - x).squaredNorm();
    if (dist2 < best) {
      best = dist2;
      best_t = t;
    }
  }
  const double h = kTwoPi / kSamples;
  const double t = golden_minimize([&](double s) { return (boundary_point(s) - x).squaredNorm(); },
                                   best_t - h, best_t + h);
  return wrap_angle(t);
}

double Domain::boundary_distance(const Point& x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match domain");
  if (kind_ == DomainKind::ball) return std::abs((x - center_).norm() - max_rho_);
  return (boundary_point(nearest_boundary_parameter(x)) - x).norm();
}

Location Domain::locate(const Point& x) const {
  if (x.size() != dim_) throw DomainError("point dimension does not match domain");
  if (kind_ == DomainKind::ball) {
    const double gap = (x - center_).norm() - max_rho_;
    if (std::abs(gap) <= kBoundaryBand) return Location::boundary;
    return gap < 0.0 ? Location::interior : Location::exterior;
  }
  const Vector d = x - center_;
  const double r = d.norm();
  if (r == 0.0) return Location::interior;
  const double gap = r - rho_(std::atan2(d(1), d(0)));
  if (std::abs(gap) < 1e-6 * std::max(1.0, max_rho_)) {
    if (boundary_distance(x) <= kBoundaryBand) return Location::boundary;
  }
  // 1e-12 tolerance on the radial comparison
  return gap < -1e-12 ? Location::interior : Location::exterior;
}

std::vector<std::pair<double, double>> Domain::ray_segments(const Point& origin,
                                                            const Vector& dir) const {
  std::vector<std::pair<double, double>> segments;
  const Vector oc = origin - center_;
  if (kind_ == DomainKind::ball) {
    const double beta = dir.dot(oc);
    const double gamma = oc.squaredNorm() - max_rho_ * max_rho_;
    const double disc = beta * beta - gamma;
    if (disc <= 0.0) return segments;
    const double root = std::sqrt(disc);
    const double q = -(beta + std::copysign(root, beta));
    double r1 = q;
    double r2 = q != 0.0 ? gamma / q : -beta;
    if (r1 > r2) std::swap(r1, r2);
    if (r2 <= 0.0) return segments;
    segments.emplace_back(std::max(0.0, r1), r2);
    return segments;
  }

  auto inside_gap = [&](double r) {
    const Vector y = oc + r * dir;
    const double rr = y.norm();
    if (rr == 0.0) return rho_(0.0);
    return rho_(std::atan2(y(1), y(0))) - rr;
  };
  const double r_max = oc.norm() + 1.01 * max_rho_;
  constexpr int kSamples = 96;
  auto refine = [&](double lo, double hi, bool lo_inside) {
    for (int i = 0; i < 64 && hi - lo > 1e-15 * r_max; ++i) {
      const double mid = 0.5 * (lo + hi);
      if ((inside_gap(mid) > 0.0) == lo_inside) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  std::array<double, kSamples + 1> gap{};
  for (int i = 0; i <= kSamples; ++i) gap[i] = inside_gap(r_max * i / kSamples);
  std::vector<double> crossings;
  for (int i = 1; i <= kSamples; ++i) {
    if ((gap[i - 1] > 0.0) != (gap[i] > 0.0)) {
      crossings.push_back(refine(r_max * (i - 1) / kSamples, r_max * i / kSamples, gap[i - 1] > 0.0));
    }
  }
  // A chord, or a gap between chords, shorter than the sample spacing shows
  // up only as a local extremum of the gap that keeps its sign on the samples.
  for (int i = 0; i <= kSamples; ++i) {
    const double sign = gap[i] > 0.0 ? -1.0 : 1.0;
    auto g = [&](double r) { return sign * inside_gap(r); };
    const double c = sign * gap[i];
    const bool left_ok = i == 0 || (sign * gap[i - 1] <= 0.0 && sign * gap[i - 1] <= c);
    const bool right_ok = i == kSamples || (sign * gap[i + 1] <= 0.0 && sign * gap[i + 1] <= c);
    if (!left_ok || !right_ok) continue;
    double lo = r_max * std::max(0, i - 1) / kSamples;
    double hi = r_max * std::min(kSamples, i + 1) / kSamples;
    const double a0 = lo;
    const double b0 = hi;
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = g(x1);
    double f2 = g(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-15 * r_max; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = g(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = g(x1);
      }
      if (std::max(f1, f2) > 0.0) break;
    }
    const double peak = f1 > f2 ? x1 : x2;
    if (!(g(peak) > 0.0)) continue;
    if (peak > a0) crossings.push_back(refine(a0, peak, inside_gap(a0) > 0.0));
    if (peak < b0) crossings.push_back(refine(peak, b0, inside_gap(peak) > 0.0));
  }
  std::sort(crossings.begin(), crossings.end());
  bool inside = gap[0] > 0.0;
  double start = 0.0;
  for (double c : crossings) {
    if (inside) {
      if (c > start) segments.emplace_back(start, c);
    } else {
      start = c;
    }
    inside = !inside;
  }
  if (inside) segments.emplace_back(start, r_max);
  return segments;
}

Point Domain::radial_projection(const Point& y) const {
  if (locate(y) != Location::exterior) return y;
  const Vector d = y - center_;
  if (dim_ == 3 || kind_ == DomainKind::ball) return center_ + max_rho_ * d / d.norm();
  return boundary_point(std::atan2(d(1), d(0)));
}

SphereRule sphere_rule(int n_polar, int n_azimuth) {
  SphereRule rule;
  const auto& gl = quad::gauss_legendre(n_polar);
  for (int i = 0; i < n_polar; ++i) {
    const double u = gl.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (int k = 0; k < n_azimuth; ++k) {
      const double phi = kTwoPi * (k + 0.5) / n_azimuth;
      rule.directions.push_back(make_point(s * std::cos(phi), s * std::sin(phi), u));
      rule.weights.push_back(gl.weights[i] * kTwoPi / n_azimuth);
    }
  }
  return rule;
}

BoundaryQuadrature boundary_rule(const Domain& domain, int N) {
  if (N < 4) throw DomainError("boundary rule needs N >= 4");
  BoundaryQuadrature q;
  if (domain.dim() == 2) {
    for (int i = 0; i < N; ++i) {
      const double t = kTwoPi * i / N;
      q.nodes.push_back(domain.boundary_point(t));
      q.normals.push_back(domain.boundary_normal(t));
      q.weights.push_back(kTwoPi / N * domain.boundary_tangent(t).norm());
    }
    return q;
  }
  const double R = domain.radius();
  const auto sphere = sphere_rule(N, 2 * N);
  for (std::size_t i = 0; i < sphere.directions.size(); ++i) {
    q.nodes.push_back(domain.center() + R * sphere.directions[i]);
    q.normals.push_back(sphere.directions[i]);
    q.weights.push_back(R * R * sphere.weights[i]);
  }
  return q;
}

VolumeQuadrature volume_rule(const Domain& domain, int N) {
  if (N < 4) throw DomainError("volume rule needs N >= 4");
  VolumeQuadrature q;
  const auto& gl = quad::gauss_legendre(N);
  if (domain.dim() == 2) {
    const int m = 2 * N;
    for (int k = 0; k < m; ++k) {
      const double t = kTwoPi * k / m;
      const double r = domain.rho(t);
      const Vector e = make_point(std::cos(t), std::sin(t));
      for (int i = 0; i < N; ++i) {
        const double s = 0.5 * (gl.nodes[i] + 1.0);
        q.nodes.push_back(domain.center() + s * r * e);
        q.weights.push_back(0.5 * gl.weights[i] * (kTwoPi / m) * s * r * r);
      }
    }
    return q;
  }
  const double R = domain.radius();
  const auto sphere = sphere_rule(N, 2 * N);
  for (std::size_t k = 0; k < sphere.directions.size(); ++k) {
    for (int i = 0; i < N; ++i) {
      const double s = 0.5 * (gl.nodes[i] + 1.0);
      q.nodes.push_back(domain.center() + s * R * sphere.directions[k]);
      q.weights.push_back(0.5 * gl.weights[i] * s * s * R * R * R * sphere.weights[k]);
    }
  }
  return q;
}

namespace {

// An angular interval. When graded, theta(s) = a + (b - a)(3s^2 - 2s^3) on
// [0, 1], which absorbs the square-root behaviour of chord lengths at
// tangent directions.
struct AngularInterval {
  double a;
  double b;
  bool graded;

  double theta(double s) const {
    return graded ? a + (b - a) * s * s * (3.0 - 2.0 * s) : a + (b - a) * s;
  }
  double dtheta(double s) const { return graded ? (b - a) * 6.0 * s * (1.0 - s) : (b - a); }
  double inverse(double t) const {
    if (!graded) return (t - a) / (b - a);
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (theta(mid) < t ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

// Angles at which the number of ray segments changes, for a planar star domain.
// Bisection for a sign change of f on [lo, hi].
double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  const bool lo_positive = f(lo) > 0.0;
  for (int k = 0; k < 60 && hi - lo > 1e-15; ++k) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) > 0.0) == lo_positive ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Directions from x of the boundary points where the ray from x is tangent
// to the boundary: roots of h(t) = (p(t) - x) x p'(t).
std::vector<double> tangency_angles(const Domain& domain, const Point& x) {
  constexpr int kSamples = 1024;
  const std::function<double(double)> h = [&](double t) {
    const Vector d = domain.boundary_point(t) - x;
    const Vector tg = domain.boundary_tangent(t);
    return d(0) * tg(1) - d(1) * tg(0);
  };
  auto at = [](int i) { return kTwoPi * i / kSamples; };
  std::array<double, kSamples + 1> hv{};
  for (int i = 0; i <= kSamples; ++i) hv[i] = h(at(i));
  auto sample = [&](int i) { return hv[static_cast<std::size_t>((i % kSamples + kSamples) % kSamples)]; };

  std::vector<double> roots;
  for (int i = 1; i <= kSamples; ++i) {
    if ((hv[i - 1] > 0.0) != (hv[i] > 0.0)) roots.push_back(bisect_root(h, at(i - 1), at(i)));
  }
  // Two roots closer than the sample spacing leave a local extremum of h
  // that does not change sign on the samples.
  constexpr double kInvPhi = 0.6180339887498949;
  for (int i = 0; i < kSamples; ++i) {
    const double sign = sample(i) > 0.0 ? 1.0 : -1.0;
    const double l = sign * sample(i - 1);
    const double c = sign * sample(i);
    const double r = sign * sample(i + 1);
    if (!(l > 0.0 && r > 0.0 && c <= l && c <= r)) continue;
    double lo = at(i - 1);
    double hi = at(i + 1);
    const double a0 = lo;
    const double b0 = hi;
    auto g = [&](double t) { return sign * h(t); };
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = g(x1);
    double f2 = g(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
      if (f1 > f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = g(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = g(x1);
      }
      if (std::min(f1, f2) <= 0.0) break;
    }
    const double trough = f1 < f2 ? x1 : x2;
    if (!(g(trough) <= 0.0)) continue;
    roots.push_back(bisect_root(h, a0, trough));
    roots.push_back(bisect_root(h, trough, b0));
  }

  std::vector<double> events;
  for (double t : roots) {
    const Vector d = domain.boundary_point(t) - x;
    events.push_back(std::atan2(d(1), d(0)));
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-13; }),
               events.end());
  return events;
}

}  // namespace

VolumeQuadrature polar_rule(const Domain& domain, const Point& x, int N,
                            const PolarRuleOptions& requested) {
  if (N < 4) throw DomainError("polar rule needs N >= 4");
  if (x.size() != domain.dim()) throw DomainError("point dimension does not match domain");
  const int n = domain.dim();
  PolarRuleOptions options = requested;
  // The 3D azimuthal sweep is uniform, so the support edge may only be met
  // once per ray.
  if (n == 3 && options.support &&
      !((x - options.support->center).norm() < options.support->radius)) {
    options.support.reset();
  }
  const auto& gl_ang = quad::gauss_legendre(16);
  VolumeQuadrature q;
  std::vector<RadialPiece> pieces;
  std::vector<double> rn;
  std::vector<double> rw;

  auto emit_ray = [&](const Vector& dir, double angular_weight) {
    ray_pieces(domain, x, dir, options, pieces);
    for (const auto& p : pieces) {
      radial_nodes(p.a, p.b, N, rn, rw);
      for (std::size_t i = 0; i < rn.size(); ++i) {
        const double jac = n == 2 ? rn[i] : rn[i] * rn[i];
        const Point y = x + rn[i] * dir;
        // Offsets below the spacing of doubles at x would land on x itself.
        if (y == x) continue;
        q.nodes.push_back(y);
        q.weights.push_back(angular_weight * rw[i] * jac);
      }
    }
  };

  const Vector oc = x - domain.center();
  const double dist_c = oc.norm();
  const bool outside = domain.locate(x) == Location::exterior;

  // The refined angular variable, its intervals and breakpoints.
  std::function<Vector(double)> direction;
  std::vector<AngularInterval> intervals;
  std::vector<double> breakpoints;
  Vector axis;
  Vector u1;
  Vector u2;
  if (n == 2) {
    direction = [](double t) { return make_point(std::cos(t), std::sin(t)); };
    for (const auto& plane : options.kinks) {
      const double t = std::atan2(plane.normal(0), -plane.normal(1));
      breakpoints.push_back(t);
      breakpoints.push_back(t + kPi);
    }
    const Point nearest = domain.boundary_point(domain.nearest_boundary_parameter(x));
    const Vector toward = nearest - x;
    if (toward.norm() > 0.0) breakpoints.push_back(std::atan2(toward(1), toward(0)));
    if (options.support) {
      const Vector to_support = options.support->center - x;
      const double ds = to_support.norm();
      if (ds > options.support->radius) {
        const double tc = std::atan2(to_support(1), to_support(0));
        const double half = std::asin(options.support->radius / ds);
        breakpoints.push_back(tc - half);
        breakpoints.push_back(tc + half);
      }
    }

    std::vector<double> events;
    if (domain.kind() == DomainKind::ball) {
      if (outside) {
        const double tc = std::atan2(-oc(1), -oc(0));
        const double half = std::asin(std::min(1.0, domain.radius() / dist_c));
        events = {tc - half, tc + half};
      }
    } else {
      events = tangency_angles(domain, x);
    }
    if (events.empty()) {
      intervals.push_back({0.0, kTwoPi, false});
    } else {
      std::sort(events.begin(), events.end());
      for (std::size_t i = 0; i < events.size(); ++i) {
        const double a = events[i];
        const double b = i + 1 < events.size() ? events[i + 1] : events[0] + kTwoPi;
        if (!(b - a > 1e-14)) continue;
        if (domain.ray_segments(x, direction(0.5 * (a + b))).empty()) continue;
        intervals.push_back({a, b, true});
      }
    }
  } else {
    axis = dist_c > 1e-14 ? Vector(oc / dist_c) : make_point(0.0, 0.0, 1.0);
    std::tie(u1, u2) = orthonormal_complement(axis);
    // theta is measured from the direction pointing back to the center.
    direction = [&](double theta) { return Vector(-std::cos(theta) * axis + std::sin(theta) * u1); };
    if (outside) {
      intervals.push_back({0.0, std::asin(std::min(1.0, domain.radius() / dist_c)), true});
    } else {
      intervals.push_back({0.0, kPi, false});
    }
  }

  std::vector<RadialPiece> proxy_pieces;
  std::vector<quad::Panel> panels;
  std::vector<const AngularInterval*> owner;
  const int initial = n == 2 ? std::max(4, N / 8) : std::max(4, N / 12);
  for (const auto& iv : intervals) {
    // Scale each proxy component by its magnitude on a coarse sweep.
    std::array<double, kProxyCount> scale{};
    std::array<double, kProxyCount> buf{};
    for (int i = 0; i < 64; ++i) {
      const double s = (i + 0.5) / 64;
      ray_pieces(domain, x, direction(iv.theta(s)), options, pieces);
      ray_proxies(n, pieces, buf);
      for (int c = 0; c < kProxyCount; ++c) scale[c] = std::max(scale[c], std::abs(buf[c]));
    }
    for (auto& s : scale) s = s > 0.0 ? s : 1.0;
    auto proxy = [&](double s, std::span<double> out) {
      const double t = iv.theta(s);
      ray_pieces(domain, x, direction(t), options, proxy_pieces);
      ray_proxies(n, proxy_pieces, out);
      const double factor = iv.dtheta(s) * (n == 3 ? std::sin(t) : 1.0);
      for (int c = 0; c < kProxyCount; ++c) out[c] *= factor / scale[c];
    };
    std::vector<double> local;
    for (double bp : breakpoints) {
      double t = bp;
      while (t < iv.a) t += kTwoPi;
      while (t >= iv.a + kTwoPi) t -= kTwoPi;
      if (t > iv.a && t < iv.b) local.push_back(iv.inverse(t));
    }
    const auto part =
        quad::adaptive_partition(proxy, kProxyCount, 0.0, 1.0, local, initial, 1e-13, 1e-12);
    for (const auto& p : part) {
      panels.push_back(p);
      owner.push_back(&iv);
    }
  }

  const int n_azimuth = std::max(8, N / 2);
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& panel = panels[k];
    const auto& iv = *owner[k];
    const double half = 0.5 * (panel.b - panel.a);
    const double mid = 0.5 * (panel.a + panel.b);
    for (std::size_t i = 0; i < gl_ang.nodes.size(); ++i) {
      const double s = mid + half * gl_ang.nodes[i];
      const double t = iv.theta(s);
      const double w = half * gl_ang.weights[i] * iv.dtheta(s);
      if (n == 2) {
        emit_ray(direction(t), w);
        continue;
      }
      const double st = std::sin(t);
      const double ct = std::cos(t);
      for (int m = 0; m < n_azimuth; ++m) {
        const double psi = kTwoPi * (m + 0.5) / n_azimuth;
        const Vector dir = -ct * axis + st * (std::cos(psi) * u1 + std::sin(psi) * u2);
        emit_ray(dir, w * st * kTwoPi / n_azimuth);
      }
    }
  }
  return q;
}


VolumeQuadrature singular_volume_rule(const Domain& domain, const Point& x, int N,
                                      std::span<const Hyperplane> kinks) {
  switch (domain.locate(x)) {
    case Location::boundary:
      throw NearBoundaryError("singular volume rule requires a strictly interior point");
    case Location::exterior:
      throw DomainError("singular volume rule requires an interior point");
    case Location::interior:
      break;
  }
  PolarRuleOptions options;
  options.kinks = kinks;
  return polar_rule(domain, x, N, options);
}

}  // namespace volpot

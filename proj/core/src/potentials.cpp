#include "volpot/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "volpot/quadrature.hpp"

namespace volpot {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Boundary points farther than this fraction of the domain radius count as far.
constexpr double kFarFraction = 0.5;

bool is_far(const Domain& domain, const Point& x) {
  return domain.boundary_distance(x) >= kFarFraction * domain.radius();
}

// The support shared by every component, if they all carry the same one.
std::optional<Ball> common_support(const NegativeExponentDensity& nd) {
  if (nd.components.empty() || !nd.components.front().support) return std::nullopt;
  const Ball& b = *nd.components.front().support;
  for (const auto& c : nd.components) {
    if (!c.support || c.support->center != b.center || c.support->radius != b.radius) return std::nullopt;
  }
  return b;
}

std::vector<Hyperplane> merged_kinks(const NegativeExponentDensity& nd) {
  std::vector<Hyperplane> kinks;
  for (const auto& c : nd.components) kinks.insert(kinks.end(), c.kinks.begin(), c.kinks.end());
  return kinks;
}

// Integrates over the sphere of the 3D ball in the frame whose pole points to
// x: for a polar angle psi, sums the azimuthal trapezoid rule into out.
struct PoleFrame {
  Point center;
  double radius;
  Vector pole;
  Vector u1;
  Vector u2;
  int azimuth;

  PoleFrame(const Domain& domain, const Point& x, int m) : center(domain.center()), radius(domain.radius()), azimuth(m) {
    const Vector d = x - center;
    pole = d.norm() > 0.0 ? Vector(d / d.norm()) : make_point(0.0, 0.0, 1.0);
    std::tie(u1, u2) = orthonormal_complement(pole);
  }

  void ring(double psi, double weight, const BoundaryIntegrand& g, std::span<Complex> scratch,
            std::span<Complex> out) const {
    const double s = std::sin(psi);
    const double c = std::cos(psi);
    const double w = weight * radius * radius * s * kTwoPi / azimuth;
    for (int k = 0; k < azimuth; ++k) {
      const double phi = kTwoPi * (k + 0.5) / azimuth;
      const Vector nu = c * pole + s * (std::cos(phi) * u1 + std::sin(phi) * u2);
      std::fill(scratch.begin(), scratch.end(), Complex(0.0));
      g(center + radius * nu, nu, scratch);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * scratch[i];
    }
  }
};

}  // namespace

const char* to_string(Side side) { return side == Side::interior ? "interior" : "exterior"; }

HomogeneousKernel gradient_kernel(const FundamentalSolution& fs, int j) {
  if (j < 0 || j >= fs.dim()) throw DomainError("gradient component out of range");
  HomogeneousKernel k;
  k.dim = fs.dim();
  k.degree = -(fs.dim() - 1.0);
  k.value = [fs, j](const Point& z) { return fs.homogeneous_gradient(z)(j); };
  k.gradient = [fs, j](const Point& z) { return Vector(fs.homogeneous_jacobian(z).col(j)); };
  k.name = "k" + std::to_string(j + 1) + ",1";
  return k;
}

void require_odd_gradient_kernel(const HomogeneousKernel& k) {
  require_dim(k.dim);
  if (!k.value || !k.gradient) throw DomainError("kernel '" + k.name + "' is incomplete");
  const double expected = -(k.dim - 1.0);
  if (std::abs(k.degree - expected) > 1e-12) {
    throw DomainError("kernel '" + k.name + "' must be homogeneous of degree -(n-1)");
  }
  // fixed sample directions, deterministic
  for (int i = 0; i < 8; ++i) {
    const double a = 0.7 + 0.9 * i;
    Point z = k.dim == 2 ? make_point(std::cos(a), std::sin(a))
                         : make_point(std::cos(a) * std::sin(1.3 * a), std::sin(a) * std::sin(1.3 * a),
                                      std::cos(1.3 * a));
    z *= 0.3 + 0.1 * i;
    const double v = k.value(z);
    const double scale = std::max(std::abs(v), 1e-300);
    if (std::abs(k.value(-z) + v) > 1e-10 * scale + 1e-300) {
      throw DomainError("kernel '" + k.name + "' is not odd");
    }
    if (std::abs(k.value(2.0 * z) - std::pow(2.0, expected) * v) > 1e-10 * scale + 1e-300) {
      throw DomainError("kernel '" + k.name + "' is not homogeneous of degree -(n-1)");
    }
  }
}

std::vector<Complex> boundary_integral(const Domain& domain, const Point& x, int N, int m,
                                       const BoundaryIntegrand& g) {
  if (N < 4) throw DomainError("boundary resolution must be at least 4");
  if (x.size() != domain.dim()) throw DomainError("point dimension does not match domain");
  const auto size = static_cast<std::size_t>(m);
  std::vector<Complex> out(size, Complex(0.0));
  std::vector<Complex> scratch(size);
  const Location where = domain.locate(x);

  if (domain.dim() == 2) {
    auto add_param = [&](double t, double w, std::span<Complex> acc) {
      const Point y = domain.boundary_point(t);
      const Vector tau = domain.boundary_tangent(t);
      const double speed = tau.norm();
      const Vector nu = make_point(tau(1) / speed, -tau(0) / speed);
      std::fill(scratch.begin(), scratch.end(), Complex(0.0));
      g(y, nu, scratch);
      for (std::size_t i = 0; i < size; ++i) acc[i] += w * speed * scratch[i];
    };
    if (where == Location::boundary) {
      const Vector d = x - domain.center();
      const double t0 = std::atan2(d(1), d(0));
      const auto& gl = quad::gauss_legendre(N);
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double u = 0.5 * (gl.nodes[i] + 1.0);
        const double w = 3.0 * kPi * u * u * 0.5 * gl.weights[i];
        add_param(t0 + kPi * u * u * u, w, out);
        add_param(t0 - kPi * u * u * u, w, out);
      }
      return out;
    }
    if (is_far(domain, x)) {
      for (int i = 0; i < N; ++i) add_param(kTwoPi * i / N, kTwoPi / N, out);
      return out;
    }
    const double t0 = domain.nearest_boundary_parameter(x);
    std::vector<Complex> acc(size);
    auto f = [&](double t, std::span<double> vals) {
      std::fill(acc.begin(), acc.end(), Complex(0.0));
      add_param(t, 1.0, acc);
      for (std::size_t i = 0; i < size; ++i) {
        vals[2 * i] = acc[i].real();
        vals[2 * i + 1] = acc[i].imag();
      }
    };
    const double bp[] = {t0};
    const auto r = quad::integrate_adaptive_vec(f, 2 * m, t0 - kPi, t0 + kPi, bp, 1e-15, 1e-13);
    for (std::size_t i = 0; i < size; ++i) out[i] = Complex(r[2 * i], r[2 * i + 1]);
    return out;
  }

  if (where != Location::boundary && is_far(domain, x)) {
    const auto rule = boundary_rule(domain, N);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      std::fill(scratch.begin(), scratch.end(), Complex(0.0));
      g(rule.nodes[q], rule.normals[q], scratch);
      for (std::size_t i = 0; i < size; ++i) out[i] += rule.weights[q] * scratch[i];
    }
    return out;
  }
  const PoleFrame frame(domain, x, std::max(2 * N, 32));
  if (where == Location::boundary) {
    const auto& gl = quad::gauss_legendre(N);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double u = 0.5 * (gl.nodes[i] + 1.0);
      frame.ring(kPi * u * u * u, 3.0 * kPi * u * u * 0.5 * gl.weights[i], g, scratch, out);
    }
    return out;
  }
  std::vector<Complex> acc(size);
  auto f = [&](double psi, std::span<double> vals) {
    std::fill(acc.begin(), acc.end(), Complex(0.0));
    frame.ring(psi, 1.0, g, scratch, acc);
    for (std::size_t i = 0; i < size; ++i) {
      vals[2 * i] = acc[i].real();
      vals[2 * i + 1] = acc[i].imag();
    }
  };
  const auto r = quad::integrate_adaptive_vec(f, 2 * m, 0.0, kPi, {}, 1e-15, 1e-13);
  for (std::size_t i = 0; i < size; ++i) out[i] = Complex(r[2 * i], r[2 * i + 1]);
  return out;
}

Complex boundary_integral(const Domain& domain, const Point& x, int N,
                          const std::function<Complex(const Point&, const Vector&)>& g) {
  return boundary_integral(domain, x, N, 1,
                           [&](const Point& y, const Vector& nu, std::span<Complex> out) {
                             out[0] = g(y, nu);
                           })[0];
}

VolumeQuadrature potential_rule(const Domain& domain, const Point& x, int N,
                                std::span<const Hyperplane> kinks, const std::optional<Ball>& support) {
  switch (domain.locate(x)) {
    case Location::boundary:
      throw NearBoundaryError("point lies within 1e-9 of the boundary; use one-sided limits");
    case Location::interior:
      break;
    case Location::exterior:
      if (kinks.empty() && !support && is_far(domain, x)) return volume_rule(domain, N);
      break;
  }
  PolarRuleOptions options;
  options.kinks = kinks;
  options.support = support;
  return polar_rule(domain, x, N, options);
}

Complex volume_potential(const FundamentalSolution& fs, const Domain& domain, const Density& f,
                         const Point& x, int N) {
  const auto rule = potential_rule(domain, x, N, f.kinks, f.support);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    sum += rule.weights[i] * fs.eval(x - rule.nodes[i]) * f(rule.nodes[i]);
  }
  return sum;
}

CVector volume_potential_gradient(const FundamentalSolution& fs, const Domain& domain,
                                  const Density& f, const Point& x, int N) {
  const auto rule = potential_rule(domain, x, N, f.kinks, f.support);
  CVector sum = CVector::Zero(domain.dim());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Complex fy = f(rule.nodes[i]);
    const Vector g = fs.grad(x - rule.nodes[i]);
    for (int j = 0; j < domain.dim(); ++j) sum(j) += rule.weights[i] * g(j) * fy;
  }
  return sum;
}

Complex subtracted_integral_G(const HomogeneousKernel& k, const Density& psi, int l,
                              const Domain& domain, const Point& x, int N) {
  require_odd_gradient_kernel(k);
  if (k.dim != domain.dim() || x.size() != domain.dim()) {
    throw DomainError("kernel, domain and point dimensions differ");
  }
  if (l < 0 || l >= domain.dim()) throw DomainError("derivative direction out of range");
  if (!(x.norm() < domain.bounding_radius())) {
    throw DomainError("point lies outside the bounding ball of the domain");
  }
  const Complex px = psi(x);
  if (!std::isfinite(px.real()) || !std::isfinite(px.imag())) {
    throw DomainError("density '" + psi.name + "' is undefined at the evaluation point");
  }
  PolarRuleOptions options;
  options.kinks = psi.kinks;
  const auto rule = polar_rule(domain, x, N, options);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Complex py = psi(rule.nodes[i]);
    if (!std::isfinite(py.real()) || !std::isfinite(py.imag())) {
      throw DomainError("density '" + psi.name + "' is undefined at a quadrature node");
    }
    sum += rule.weights[i] * k.gradient(x - rule.nodes[i])(l) * (py - px);
  }
  return sum;
}

Complex boundary_kernel_K(const HomogeneousKernel& k, const BoundaryDensity& mu,
                          const Domain& domain, const Point& x, Side side, int N) {
  const Location where = domain.locate(x);
  if (where == Location::boundary) {
    throw NearBoundaryError("boundary kernel operators are evaluated off the boundary only");
  }
  const Side actual = where == Location::interior ? Side::interior : Side::exterior;
  if (actual != side) {
    throw DomainError(std::string("point lies on the ") + to_string(actual) + " side, not the " +
                      to_string(side) + " side");
  }
  return boundary_integral(domain, x, N,
                           [&](const Point& y, const Vector& nu) { return k.value(x - y) * mu(y, nu); });
}

CMatrix volume_potential_hessian(const FundamentalSolution& fs, const Domain& domain,
                                 const Density& f, const Point& x, int N) {
  const int n = domain.dim();
  const auto rule = singular_volume_rule(domain, x, N, f.kinks);
  const Density ef = density::extended(f, domain);
  const Complex fx = ef(x);
  const bool remainder = fs.kind() == FundamentalKind::modified_helmholtz;
  CMatrix h = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point& y = rule.nodes[i];
    const Vector z = x - y;
    const Complex diff = ef(y) - fx;
    const Matrix j1 = fs.homogeneous_jacobian(z);
    if (remainder) {
      const Matrix j2 = fs.remainder_jacobian(z);
      const Complex fy = f(y);
      for (int l = 0; l < n; ++l) {
        for (int j = 0; j < n; ++j) h(l, j) += rule.weights[i] * (j1(l, j) * diff + j2(l, j) * fy);
      }
    } else {
      for (int l = 0; l < n; ++l) {
        for (int j = 0; j < n; ++j) h(l, j) += rule.weights[i] * j1(l, j) * diff;
      }
    }
  }
  if (fx != Complex(0.0)) {
    const auto boundary = boundary_integral(
        domain, x, N, n * n, [&](const Point& y, const Vector& nu, std::span<Complex> out) {
          const Vector k1 = fs.homogeneous_gradient(x - y);
          for (int l = 0; l < n; ++l) {
            for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(l * n + j)] = k1(j) * nu(l);
          }
        });
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) h(l, j) -= fx * boundary[static_cast<std::size_t>(l * n + j)];
    }
  }
  return h;
}

Complex single_layer(const FundamentalSolution& fs, const Domain& domain,
                     const BoundaryDensity& phi, const Point& x, int N) {
  return boundary_integral(domain, x, N,
                           [&](const Point& y, const Vector& nu) { return fs.eval(x - y) * phi(y, nu); });
}

Complex volume_potential_negative(const FundamentalSolution& fs, const Domain& domain,
                                  const NegativeExponentDensity& nd, const Point& x, int N) {
  const int n = domain.dim();
  if (nd.dim() != n) throw DomainError("negative exponent density needs n + 1 components");
  const auto kinks = merged_kinks(nd);
  const auto rule = potential_rule(domain, x, N, kinks, common_support(nd));
  Complex sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point& y = rule.nodes[i];
    const Vector z = x - y;
    Complex v = fs.eval(z) * nd.components[0](y);
    const Vector g = fs.grad(z);
    for (int j = 0; j < n; ++j) v += g(j) * nd.components[static_cast<std::size_t>(j + 1)](y);
    sum += rule.weights[i] * v;
  }
  sum += boundary_integral(domain, x, N, [&](const Point& y, const Vector& nu) {
    Complex v = 0.0;
    for (int j = 0; j < n; ++j) v += nu(j) * nd.components[static_cast<std::size_t>(j + 1)](y);
    return v == Complex(0.0) ? v : fs.eval(x - y) * v;
  });
  return sum;
}

Complex exterior_field(const FundamentalSolution& fs, const DiscreteFunctional& tau,
                       const Point& x) {
  if (tau.nodes.empty() || tau.nodes.size() != tau.weights.size() ||
      tau.nodes.size() != tau.values.size()) {
    throw DomainError("functional needs matching, nonempty nodes, weights and values");
  }
  Point centroid = Point::Zero(x.size());
  for (const auto& p : tau.nodes) centroid += p;
  centroid /= static_cast<double>(tau.nodes.size());
  double hull = 0.0;
  for (const auto& p : tau.nodes) hull = std::max(hull, (p - centroid).norm());
  if ((x - centroid).norm() < hull + 1e-6) {
    throw DomainError("evaluation point lies inside the support hull of the functional");
  }
  Complex sum = 0.0;
  for (std::size_t i = 0; i < tau.nodes.size(); ++i) {
    sum += tau.weights[i] * tau.values[i] * fs.eval(x - tau.nodes[i]);
  }
  return sum;
}

PotentialField::PotentialField(FundamentalSolution fs, Domain domain, Side side, int N)
    : fs_(std::move(fs)), domain_(std::move(domain)), side_(side), n_(N) {
  if (fs_.dim() != domain_.dim()) throw DomainError("fundamental solution and domain dimensions differ");
  if (N < 4) throw DomainError("resolution must be at least 4");
}

void PotentialField::check_side(const Point& x) const {
  const Location where = domain_.locate(x);
  if (where == Location::boundary) throw NearBoundaryError("point lies in the boundary band");
  const Side actual = where == Location::interior ? Side::interior : Side::exterior;
  if (actual != side_) {
    throw DomainError(std::string("point lies on the ") + to_string(actual) + " side of the boundary");
  }
}

Complex PotentialField::value(const Density& f, const Point& x) const {
  check_side(x);
  return volume_potential(fs_, domain_, f, x, n_);
}

CVector PotentialField::gradient(const Density& f, const Point& x) const {
  check_side(x);
  return volume_potential_gradient(fs_, domain_, f, x, n_);
}

Complex PotentialField::value(const NegativeExponentDensity& nd, const Point& x) const {
  check_side(x);
  return volume_potential_negative(fs_, domain_, nd, x, n_);
}

}  // namespace volpot

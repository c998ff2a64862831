#include "volpot/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace volpot {

CVector Density::grad(const Point& y) const {
  if (!gradient) throw DomainError("density '" + name + "' has no gradient");
  return gradient(y);
}

Density Density::partial(int j) const {
  if (!gradient) throw DomainError("density '" + name + "' has no gradient");
  Density d;
  d.name = "d" + std::to_string(j + 1) + "(" + name + ")";
  auto g = gradient;
  d.value = [g, j](const Point& y) { return g(y)(j); };
  d.support = support;
  return d;
}

Complex NegativeExponentDensity::realized(const Point& y) const {
  if (components.empty()) throw DomainError("negative exponent density has no components");
  Complex v = components[0](y);
  for (std::size_t j = 1; j < components.size(); ++j) {
    v += components[j].grad(y)(static_cast<Eigen::Index>(j - 1));
  }
  return v;
}

namespace density {

namespace {

CVector unit_vector(const Point& y, int j, Complex scale) {
  CVector g = CVector::Zero(y.size());
  g(j) = scale;
  return g;
}

}  // namespace

Density constant(Complex c) {
  Density d;
  d.name = c == Complex(1.0) ? "one" : "constant";
  d.value = [c](const Point&) { return c; };
  d.gradient = [](const Point& y) { return CVector(CVector::Zero(y.size())); };
  return d;
}

Density one() { return constant(1.0); }

Density coordinate(int j) {
  Density d;
  d.name = "x" + std::to_string(j + 1);
  d.value = [j](const Point& y) { return Complex(y(j)); };
  d.gradient = [j](const Point& y) { return unit_vector(y, j, 1.0); };
  return d;
}

Density x1() { return coordinate(0); }

Density x1sq() {
  Density d;
  d.name = "x1sq";
  d.value = [](const Point& y) { return Complex(y(0) * y(0)); };
  d.gradient = [](const Point& y) { return unit_vector(y, 0, 2.0 * y(0)); };
  return d;
}

Density abs_x1() {
  Density d;
  d.name = "abs_x1";
  d.value = [](const Point& y) { return Complex(std::abs(y(0))); };
  d.gradient = [](const Point& y) {
    return unit_vector(y, 0, y(0) > 0.0 ? 1.0 : (y(0) < 0.0 ? -1.0 : 0.0));
  };
  return d;
}

Density cos_k(double k) {
  Density d;
  d.name = "cos_k";
  d.value = [k](const Point& y) { return Complex(std::cos(k * y(0))); };
  d.gradient = [k](const Point& y) { return unit_vector(y, 0, -k * std::sin(k * y(0))); };
  return d;
}

Density bump(const Point& center, double radius) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  Density d;
  d.name = "bump";
  d.value = [center, radius](const Point& y) {
    const double s2 = (y - center).squaredNorm() / (radius * radius);
    if (s2 >= 1.0) return Complex(0.0);
    return Complex(std::exp(1.0 - 1.0 / (1.0 - s2)));
  };
  d.gradient = [center, radius](const Point& y) {
    const Vector z = y - center;
    const double s2 = z.squaredNorm() / (radius * radius);
    CVector g = CVector::Zero(y.size());
    if (s2 >= 1.0) return g;
    const double e = std::exp(1.0 - 1.0 / (1.0 - s2));
    const double factor = -e * 2.0 / ((1.0 - s2) * (1.0 - s2) * radius * radius);
    for (Eigen::Index i = 0; i < y.size(); ++i) g(i) = factor * z(i);
    return g;
  };
  d.support = Ball{center, radius};
  return d;
}

Density sum(const Density& a, const Density& b) {
  Density d;
  d.name = a.name + "+" + b.name;
  d.value = [a, b](const Point& y) { return a(y) + b(y); };
  if (a.has_gradient() && b.has_gradient()) {
    d.gradient = [a, b](const Point& y) { return CVector(a.grad(y) + b.grad(y)); };
  }
  d.kinks = a.kinks;
  d.kinks.insert(d.kinks.end(), b.kinks.begin(), b.kinks.end());
  if (a.support && b.support && a.support->center == b.support->center &&
      a.support->radius == b.support->radius) {
    d.support = a.support;
  }
  return d;
}

Density scaled(const Density& a, Complex c) {
  Density d;
  d.name = a.name;
  d.value = [a, c](const Point& y) { return c * a(y); };
  if (a.has_gradient()) d.gradient = [a, c](const Point& y) { return CVector(c * a.grad(y)); };
  d.kinks = a.kinks;
  d.support = a.support;
  return d;
}

Density preset(const std::string& name, int n, double k) {
  require_dim(n);
  if (name == "one") return one();
  if (name == "x1") return x1();
  if (name == "x1sq") return x1sq();
  if (name == "abs_x1") {
    Density d = abs_x1();
    Hyperplane plane{Vector::Zero(n), 0.0};
    plane.normal(0) = 1.0;
    d.kinks.push_back(plane);
    return d;
  }
  if (name == "cos_k") return cos_k(k);
  if (name == "bump") return bump(Point::Zero(n), 0.5);
  throw DomainError("unknown density preset '" + name + "'");
}

Density tabulated(std::vector<Point> nodes, std::vector<Complex> values) {
  if (nodes.empty() || nodes.size() != values.size()) {
    throw DomainError("tabulated density needs matching, nonempty nodes and values");
  }
  const Eigen::Index n = nodes.front().size();
  for (const auto& p : nodes) {
    if (p.size() != n) throw DomainError("tabulated density mixes dimensions");
  }
  auto table = std::make_shared<const std::pair<std::vector<Point>, std::vector<Complex>>>(
      std::move(nodes), std::move(values));
  Density d;
  d.name = "tabulated";
  d.value = [table, n](const Point& y) {
    const auto& [pts, vals] = *table;
    const std::size_t k = std::min<std::size_t>(pts.size(), static_cast<std::size_t>(n + 2));
    std::vector<std::pair<double, std::size_t>> dist(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) dist[i] = {(pts[i] - y).squaredNorm(), i};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    if (dist[0].first == 0.0) return vals[dist[0].second];
    Complex num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double w = 1.0 / dist[i].first;
      num += w * vals[dist[i].second];
      den += w;
    }
    return num / den;
  };
  return d;
}

Density tabulated_csv(const std::string& path, int n) {
  require_dim(n);
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open density table '" + path + "'");
  std::vector<Point> nodes;
  std::vector<Complex> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::vector<double> fields;
    double v = 0.0;
    while (row >> v) fields.push_back(v);
    if (fields.empty() && line_no == 1) continue;  // header
    if (static_cast<int>(fields.size()) != n + 1) {
      throw DomainError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(n + 1) + " numeric fields");
    }
    Point p(n);
    for (int i = 0; i < n; ++i) p(i) = fields[static_cast<std::size_t>(i)];
    nodes.push_back(p);
    values.emplace_back(fields.back());
  }
  return tabulated(std::move(nodes), std::move(values));
}

Density extended(const Density& f, const Domain& domain) {
  Density d;
  d.name = "E(" + f.name + ")";
  d.value = [f, domain](const Point& y) { return f(domain.radial_projection(y)); };
  d.kinks = f.kinks;
  return d;
}

BoundaryDensity trace(const Density& f) {
  return [f](const Point& y, const Vector&) { return f(y); };
}

BoundaryDensity normal_component(const Density& f, int j) {
  return [f, j](const Point& y, const Vector& normal) { return normal(j) * f(y); };
}

}  // namespace density

}  // namespace volpot

#include "volpot/schauder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "volpot/potentials.hpp"

namespace volpot {

namespace {

void require_unit_exponent(double e, const char* what) {
  if (!(e > 0.0 && e <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in (0, 1], got " + std::to_string(e));
  }
}

std::vector<Hyperplane> all_kinks(const NegativeExponentDensity& nd) {
  std::vector<Hyperplane> k;
  for (const auto& c : nd.components) k.insert(k.end(), c.kinks.begin(), c.kinks.end());
  return k;
}

// Product rule about the center, split at kinks when there are any.
VolumeQuadrature pairing_rule(const Domain& domain, std::span<const Hyperplane> kinks, int N) {
  if (kinks.empty()) return volume_rule(domain, N);
  PolarRuleOptions options;
  options.kinks = kinks;
  return polar_rule(domain, domain.center(), N, options);
}

void check_components(const Domain& domain, const NegativeExponentDensity& nd) {
  if (nd.dim() != domain.dim()) {
    throw DomainError("negative exponent density needs n + 1 = " + std::to_string(domain.dim() + 1) +
                      " components");
  }
}

}  // namespace

double omega_theta_eval(double theta, double r) {
  require_unit_exponent(theta, "theta");
  if (r < 0.0) throw DomainError("modulus argument must be nonnegative");
  if (r == 0.0) return 0.0;
  const double r_theta = std::exp(-1.0 / theta);
  const double s = std::min(r, r_theta);
  return std::pow(s, theta) * std::abs(std::log(s));
}

ModulusDiagnostics check_modulus(const std::function<double(double)>& omega) {
  ModulusDiagnostics d;
  if (omega(0.0) != 0.0) d.warnings.push_back("omega(0) is not 0");
  double prev = 0.0;
  bool positive = true;
  bool monotone = true;
  for (int i = 0; i <= 160; ++i) {
    const double t = std::pow(10.0, -8.0 + 10.0 * i / 160.0);
    const double v = omega(t);
    if (!(v > 0.0)) positive = false;
    if (i > 0 && v < prev) monotone = false;
    prev = v;
  }
  if (!positive) d.warnings.push_back("omega is not positive on (0, 100]");
  if (!monotone) d.warnings.push_back("omega is not nondecreasing on sampled radii");
  // A bounded ratio saturates; one still growing between a <= 10 and a <= 100
  // signals an unbounded sup.
  double short_range = 0.0;
  for (int i = 0; i <= 80; ++i) {
    const double t = std::pow(10.0, -8.0 + 8.0 * i / 80.0);
    const double wt = omega(t);
    if (!(wt > 0.0)) continue;
    for (int k = 0; k <= 40; ++k) {
      const double a = std::pow(100.0, k / 40.0);
      const double ratio = omega(a * t) / (a * wt);
      d.growth_ratio = std::max(d.growth_ratio, ratio);
      if (k <= 20) short_range = std::max(short_range, ratio);
    }
  }
  if (!(d.growth_ratio < 1e3) || d.growth_ratio > 1.1 * short_range) {
    d.warnings.push_back("sampled sup of omega(a t)/(a omega(t)) is " + std::to_string(d.growth_ratio));
  }
  return d;
}

Modulus Modulus::power(double alpha) {
  require_unit_exponent(alpha, "alpha");
  std::ostringstream name;
  name << "power:" << alpha;
  return Modulus(ModulusKind::power, alpha,
                 [alpha](double r) { return alpha == 1.0 ? r : std::pow(r, alpha); }, name.str());
}

Modulus Modulus::omega_theta(double theta) {
  require_unit_exponent(theta, "theta");
  std::ostringstream name;
  name << "omega:" << theta;
  return Modulus(ModulusKind::omega_theta, theta,
                 [theta](double r) { return omega_theta_eval(theta, r); }, name.str());
}

Modulus Modulus::custom(std::function<double(double)> omega, std::string name) {
  if (!omega) throw DomainError("custom modulus needs a callable");
  Modulus m(ModulusKind::custom, 0.0, std::move(omega), std::move(name));
  m.warnings_ = check_modulus(m.fn_).warnings;
  return m;
}

Modulus Modulus::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("modulus must be power:<alpha> or omega:<theta>");
  const std::string kind = spec.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw DomainError("bad modulus parameter in '" + spec + "'");
  }
  if (kind == "power") return power(value);
  if (kind == "omega") return omega_theta(value);
  throw DomainError("unknown modulus kind '" + kind + "'");
}

double holder_seminorm(std::span<const Point> points, std::span<const Complex> values,
                       const Modulus& omega, SeparationBand band) {
  if (points.size() != values.size()) throw DomainError("sample points and values differ in count");
  double best = 0.0;
  bool distinct = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = i + 1; k < points.size(); ++k) {
      const double d = (points[i] - points[k]).norm();
      if (d == 0.0) {
        if (values[i] != values[k]) {
          throw InconsistentSampleError("repeated sample point carries two different values");
        }
        continue;
      }
      distinct = true;
      if (d < band.min_separation || d > band.max_separation) continue;
      best = std::max(best, std::abs(values[i] - values[k]) / omega(d));
    }
  }
  if (!distinct) throw DomainError("seminorm needs at least two distinct sample points");
  return best;
}

KernelClassNorm kernel_class_norm(const std::function<Complex(const Point&, const Point&)>& K,
                                  std::span<const Point> X, std::span<const Point> Y, double s1,
                                  double s2, double s3) {
  KernelClassNorm out;
  for (const auto& x : X) {
    for (const auto& y : Y) {
      const double d = (x - y).norm();
      if (d == 0.0) continue;
      out.decay = std::max(out.decay, std::pow(d, s1) * std::abs(K(x, y)));
    }
  }
  for (const auto& xp : X) {
    for (const auto& xpp : X) {
      const double h = (xp - xpp).norm();
      if (h == 0.0) continue;
      for (const auto& y : Y) {
        const double d = (xp - y).norm();
        if (d < 2.0 * h) continue;
        const double v = std::pow(d, s2) / std::pow(h, s3) * std::abs(K(xp, y) - K(xpp, y));
        out.regularity = std::max(out.regularity, v);
      }
    }
  }
  return out;
}

std::vector<Point> closure_samples(const Domain& domain, int N) {
  auto pts = volume_rule(domain, N).nodes;
  const auto b = boundary_rule(domain, domain.dim() == 2 ? 4 * N : N);
  pts.insert(pts.end(), b.nodes.begin(), b.nodes.end());
  return pts;
}

NegativeExponentDensity make_negative_density(const Domain& domain, std::vector<Density> components,
                                              double alpha) {
  require_unit_exponent(alpha, "alpha");
  if (static_cast<int>(components.size()) != domain.dim() + 1) {
    throw DomainError("negative exponent density needs n + 1 components");
  }
  NegativeExponentDensity nd;
  nd.components = std::move(components);
  nd.alpha = alpha;
  const auto pts = closure_samples(domain, domain.dim() == 2 ? 12 : 8);
  const Modulus omega = Modulus::power(alpha);
  std::vector<Complex> vals(pts.size());
  for (const auto& c : nd.components) {
    double sup = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      vals[i] = c(pts[i]);
      sup = std::max(sup, std::abs(vals[i]));
    }
    nd.norm_bound += sup + holder_seminorm(pts, vals, omega);
  }
  return nd;
}

Complex integral_functional_I(const Domain& domain, const NegativeExponentDensity& nd, int N) {
  check_components(domain, nd);
  const auto kinks = all_kinks(nd);
  const auto vol = pairing_rule(domain, kinks, N);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i) sum += vol.weights[i] * nd.components[0](vol.nodes[i]);
  const auto bnd = boundary_rule(domain, domain.dim() == 2 ? 4 * N : N);
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    Complex v = 0.0;
    for (int j = 0; j < domain.dim(); ++j) {
      v += bnd.normals[i](j) * nd.components[static_cast<std::size_t>(j + 1)](bnd.nodes[i]);
    }
    sum += bnd.weights[i] * v;
  }
  return sum;
}

Complex extension_pairing_E(const Domain& domain, const NegativeExponentDensity& nd,
                            const Density& v, int N) {
  check_components(domain, nd);
  auto kinks = all_kinks(nd);
  kinks.insert(kinks.end(), v.kinks.begin(), v.kinks.end());
  const auto vol = pairing_rule(domain, kinks, N);
  const int n = domain.dim();
  Complex sum = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const Point& y = vol.nodes[i];
    Complex term = nd.components[0](y) * v(y);
    bool need_grad = false;
    for (int j = 0; j < n; ++j) {
      if (nd.components[static_cast<std::size_t>(j + 1)](y) != Complex(0.0)) need_grad = true;
    }
    if (need_grad) {
      const CVector g = v.grad(y);
      for (int j = 0; j < n; ++j) term -= nd.components[static_cast<std::size_t>(j + 1)](y) * g(j);
    }
    sum += vol.weights[i] * term;
  }
  const auto bnd = boundary_rule(domain, n == 2 ? 4 * N : N);
  for (std::size_t i = 0; i < bnd.size(); ++i) {
    Complex t = 0.0;
    for (int j = 0; j < n; ++j) {
      t += bnd.normals[i](j) * nd.components[static_cast<std::size_t>(j + 1)](bnd.nodes[i]);
    }
    if (t != Complex(0.0)) sum += bnd.weights[i] * t * v(bnd.nodes[i]);
  }
  return sum;
}

Complex canonical_pairing_J(const Domain& domain, const Density& f, const Density& v, int N) {
  auto kinks = f.kinks;
  kinks.insert(kinks.end(), v.kinks.begin(), v.kinks.end());
  const auto vol = pairing_rule(domain, kinks, N);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i) sum += vol.weights[i] * f(vol.nodes[i]) * v(vol.nodes[i]);
  return sum;
}

SampleCloud read_samples_csv(const std::string& path, int n) {
  require_dim(n);
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open sample file '" + path + "'");
  SampleCloud cloud;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::vector<double> f;
    double v = 0.0;
    while (row >> v) f.push_back(v);
    if (f.empty() && line_no == 1) continue;
    if (static_cast<int>(f.size()) != n + 1) {
      throw DomainError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(n + 1) +
                        " fields");
    }
    Point p(n);
    for (int i = 0; i < n; ++i) p(i) = f[static_cast<std::size_t>(i)];
    cloud.points.push_back(p);
    cloud.values.emplace_back(f.back());
  }
  return cloud;
}

void write_samples_csv(const std::string& path, const SampleCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write sample file '" + path + "'");
  if (cloud.points.empty()) return;
  const auto n = cloud.points.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out << "x" << (i + 1) << ",";
  out << "value\n" << std::setprecision(17);
  for (std::size_t k = 0; k < cloud.points.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) out << cloud.points[k](i) << ",";
    out << cloud.values[k].real() << "\n";
  }
}

}  // namespace volpot

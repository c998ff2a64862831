#include "volpot/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "volpot/quadrature.hpp"
#include "volpot/schauder.hpp"

namespace volpot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

double sup_abs(const Domain& domain, const Density& f) {
  double s = 0.0;
  for (const auto& p : closure_samples(domain, domain.dim() == 2 ? 16 : 8)) s = std::max(s, std::abs(f(p)));
  return s;
}

// Value at 0 of the quadratic through (d_i, v_i).
Complex extrapolate_to_zero(std::span<const double> d, std::span<const Complex> v) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double w = 1.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (k != i) w *= (0.0 - d[k]) / (d[i] - d[k]);
    }
    sum += w * v[i];
  }
  return sum;
}

// Linear Richardson extrapolation to eps = 0 from the last two entries.
Complex richardson(std::span<const double> eps, std::span<const Complex> v) {
  const std::size_t m = eps.size();
  if (m == 1) return v[0];
  const double ea = eps[m - 2];
  const double eb = eps[m - 1];
  return (ea * v[m - 1] - eb * v[m - 2]) / (ea - eb);
}

std::string params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += ";";
    s += k;
    s += "=";
    s += v;
  }
  return s;
}

std::string num(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

}  // namespace

bool Observation::pass() const {
  switch (comparison) {
    case Comparison::le:
      return value <= tolerance;
    case Comparison::ge:
      return value >= tolerance;
    case Comparison::info:
      return true;
  }
  return false;
}

void VerificationReport::expect_le(std::string label, double value, double tolerance) {
  observed.push_back({std::move(label), value, tolerance, Comparison::le});
}

void VerificationReport::expect_ge(std::string label, double value, double tolerance) {
  observed.push_back({std::move(label), value, tolerance, Comparison::ge});
}

void VerificationReport::note(std::string label, double value) {
  observed.push_back({std::move(label), value, 0.0, Comparison::info});
}

bool VerificationReport::pass() const {
  return std::all_of(observed.begin(), observed.end(), [](const Observation& o) { return o.pass(); });
}

void write_csv_header(std::ostream& out) { out << "check,param,label,value,tolerance,pass\n"; }

void write_csv(std::ostream& out, const VerificationReport& report) {
  for (const auto& o : report.observed) {
    out << report.name << "," << report.parameters << "," << o.label << "," << format_double(o.value)
        << ",";
    if (o.comparison == Comparison::info) {
      out << ",info\n";
    } else {
      out << (o.comparison == Comparison::le ? "<=" : ">=") << format_double(o.tolerance) << ","
          << (o.pass() ? "true" : "false") << "\n";
    }
  }
}

VerificationReport check_pde_identity(const FundamentalSolution& fs, const OperatorCoefficients& op,
                                      const Domain& domain, const Density& f,
                                      std::span<const Point> grid, double h, int N, double tol) {
  const auto start = Clock::now();
  if (!(h > 0.0)) throw DomainError("finite difference step must be positive");
  for (const auto& x : grid) {
    if (domain.boundary_distance(x) < 5.0 * h) {
      throw DomainError("grid point closer than 5h to the boundary");
    }
  }
  VerificationReport r;
  r.name = "pde_identity";
  r.parameters = params({{"fundsol", to_string(fs.kind())}, {"domain", domain.label()},
                         {"density", f.name}, {"h", num(h)}, {"N", num(N)}});
  const double scale = std::max(sup_abs(domain, f), 1e-300);
  const ScalarField u = [&](const Point& y) { return volume_potential(fs, domain, f, y, N); };
  double interior = 0.0;
  double exterior = 0.0;
  int n_in = 0;
  int n_out = 0;
  for (const auto& x : grid) {
    const Complex lhs = apply_operator_fd(op, u, x, h);
    if (domain.contains(x)) {
      interior = std::max(interior, std::abs(lhs - f(x)) / scale);
      ++n_in;
    } else {
      exterior = std::max(exterior, std::abs(lhs) / scale);
      ++n_out;
    }
  }
  if (n_in > 0) r.expect_le("interior_residual", interior, tol);
  if (n_out > 0) r.expect_le("exterior_residual", exterior, tol);
  r.note("grid_points", static_cast<double>(grid.size()));
  r.runtime = seconds_since(start);
  return r;
}

std::vector<Point> boundary_samples(const Domain& domain, int count) {
  if (count < 1) throw DomainError("need at least one boundary sample");
  std::vector<Point> pts;
  if (domain.dim() == 2) {
    for (int i = 0; i < count; ++i) pts.push_back(domain.boundary_point(2.0 * kPi * i / count));
    return pts;
  }
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back(domain.center() + domain.radius() * make_point(s * std::cos(phi), s * std::sin(phi), z));
  }
  return pts;
}

VerificationReport check_transmission(const std::string& name, const Domain& domain,
                                      const FieldEvaluator& u, std::span<const Point> samples,
                                      std::span<const double> offsets, double tol) {
  const auto start = Clock::now();
  if (offsets.size() < 2) throw DomainError("transmission check needs at least two offsets");
  VerificationReport r;
  r.name = "transmission";
  std::string offs;
  for (double d : offsets) offs += (offs.empty() ? "" : " ") + num(d);
  r.parameters = params({{"field", name}, {"domain", domain.label()}, {"samples", num(samples.size())},
                         {"offsets", offs}});
  std::vector<Complex> inner(offsets.size());
  std::vector<Complex> outer(offsets.size());
  double worst = 0.0;
  double magnitude = 0.0;
  for (const auto& y : samples) {
    const Vector nu = domain.normal_at(y);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      inner[i] = u(y - offsets[i] * nu);
      outer[i] = u(y + offsets[i] * nu);
    }
    const Complex plus = extrapolate_to_zero(offsets, inner);
    const Complex minus = extrapolate_to_zero(offsets, outer);
    worst = std::max(worst, std::abs(plus - minus));
    magnitude = std::max(magnitude, std::abs(plus));
  }
  r.expect_le("max_jump", worst, tol);
  r.note("max_trace", magnitude);
  r.runtime = seconds_since(start);
  return r;
}

VerificationReport check_integration_by_parts(const TwoPointKernel& K, const Domain& domain,
                                              const Density& phi, const Point& x, int j, int N,
                                              const IntegrationByPartsOptions& options) {
  const auto start = Clock::now();
  const int n = domain.dim();
  if (j < 0 || j >= n) throw DomainError("component out of range");
  if (options.eps.empty()) throw DomainError("need at least one excision radius");
  std::vector<double> eps = options.eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (!domain.contains(x) || domain.boundary_distance(x) <= eps.front()) {
    throw DomainError("x must lie farther from the boundary than the largest excision radius");
  }
  VerificationReport r;
  r.name = "integration_by_parts";
  r.parameters = params({{"kernel", K.name}, {"domain", domain.label()}, {"phi", phi.name},
                         {"j", num(j + 1)}, {"N", num(N)}});

  // Sphere integrals eps^{n-1} int K(x, x - eps xi) xi_j dsigma.
  std::vector<Vector> dirs;
  std::vector<double> dw;
  if (n == 2) {
    constexpr int M = 512;
    for (int i = 0; i < M; ++i) {
      const double t = 2.0 * kPi * i / M;
      dirs.push_back(make_point(std::cos(t), std::sin(t)));
      dw.push_back(2.0 * kPi / M);
    }
  } else {
    const auto s = sphere_rule(32, 64);
    dirs = s.directions;
    dw = s.weights;
  }
  std::vector<Complex> psi(eps.size());
  std::vector<Complex> lhs(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      s += dw[i] * K.value(x, x - eps[e] * dirs[i]) * dirs[i](j);
    }
    psi[e] = std::pow(eps[e], n - 1) * s;
    PolarRuleOptions po;
    po.kinks = phi.kinks;
    po.excise_radius = eps[e];
    po.support = phi.support;
    const auto rule = polar_rule(domain, x, N, po);
    Complex l = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      l += rule.weights[i] * K.grad_y(x, rule.nodes[i])(j) * phi(rule.nodes[i]);
    }
    lhs[e] = l;
  }
  const Complex psi_j = richardson(eps, psi);
  const Complex lhs_limit = richardson(eps, lhs);

  PolarRuleOptions vo;
  vo.kinks = phi.kinks;
  vo.support = phi.support;
  const auto rule = polar_rule(domain, x, N, vo);
  Complex volume = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    volume += rule.weights[i] * K.value(x, rule.nodes[i]) * phi.grad(rule.nodes[i])(j);
  }
  const Complex boundary = boundary_integral(domain, x, N, [&](const Point& y, const Vector& nu) {
    return K.value(x, y) * phi(y) * nu(j);
  });
  const Complex rhs = -volume + boundary + phi(x) * psi_j;

  // Successive increments of the sphere integrals must not grow.
  bool convergent = true;
  for (std::size_t e = 2; e < eps.size(); ++e) {
    const double prev = std::abs(psi[e - 1] - psi[e - 2]);
    const double cur = std::abs(psi[e] - psi[e - 1]);
    if (cur > 10.0 * prev + 1e-10) convergent = false;
  }
  r.expect_ge("psi_sequence_convergent", convergent ? 1.0 : 0.0, 1.0);
  r.expect_le("lhs_minus_rhs", std::abs(lhs_limit - rhs), options.tol);
  r.note("lhs", lhs_limit.real());
  r.note("psi_j", psi_j.real());
  if (options.psi_expected) {
    r.expect_le("psi_j_error", std::abs(psi_j - *options.psi_expected), options.psi_tol);
  }
  if (options.below_critical) r.expect_le("psi_j_abs", std::abs(psi_j), options.psi_tol);
  r.runtime = seconds_since(start);
  return r;
}

constexpr double kZeroFloor = 1e-10;

VerificationReport check_maximal_bound(const HomogeneousKernel& k, const Domain& domain,
                                       std::span<const Point> xs, std::span<const double> rhos, int N,
                                       const MaximalBoundOptions& options) {
  const auto start = Clock::now();
  if (xs.empty() || rhos.size() < 2) throw DomainError("need points and at least two radii");
  VerificationReport r;
  r.name = "maximal_bound";
  r.parameters = params({{"kernel", k.name}, {"domain", domain.label()}, {"points", num(xs.size())},
                         {"radii", num(rhos.size())}, {"N", num(N)}});
  std::vector<double> rho(rhos.begin(), rhos.end());
  std::sort(rho.begin(), rho.end(), std::greater<>());

  // Sphere Lipschitz data of k: sup |k| + Lipschitz constant on sampled directions.
  std::vector<Point> sphere;
  if (domain.dim() == 2) {
    for (int i = 0; i < 256; ++i) {
      const double t = 2.0 * kPi * i / 256;
      sphere.push_back(make_point(std::cos(t), std::sin(t)));
    }
  } else {
    sphere = sphere_rule(12, 24).directions;
  }
  std::vector<Complex> kv(sphere.size());
  double ksup = 0.0;
  for (std::size_t i = 0; i < sphere.size(); ++i) {
    kv[i] = k.value(sphere[i]);
    ksup = std::max(ksup, std::abs(kv[i]));
  }
  const double sphere_norm = ksup + holder_seminorm(sphere, kv, Modulus::power(1.0));

  std::vector<double> sup_over_x(rho.size(), 0.0);
  std::vector<std::vector<double>> value(xs.size(), std::vector<double>(rho.size()));
  for (std::size_t p = 0; p < xs.size(); ++p) {
    for (std::size_t q = 0; q < rho.size(); ++q) {
      PolarRuleOptions po;
      po.excise_radius = rho[q];
      const auto rule = polar_rule(domain, xs[p], N, po);
      double s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * k.value(xs[p] - rule.nodes[i]);
      value[p][q] = s;
      sup_over_x[q] = std::max(sup_over_x[q], std::abs(s));
    }
  }
  const double hi = *std::max_element(sup_over_x.begin(), sup_over_x.end());
  const double lo = *std::min_element(sup_over_x.begin(), sup_over_x.end());
  r.note("sup_value", hi);
  r.note("sphere_lipschitz_norm", sphere_norm);
  r.note("fitted_constant", hi / sphere_norm);
  if (options.min_growth_per_decade) {
    const double decades = std::log10(rho.front() / rho.back());
    double growth = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < xs.size(); ++p) {
      growth = std::min(growth, (value[p].back() - value[p].front()) / decades);
    }
    r.expect_ge("growth_per_decade", growth, *options.min_growth_per_decade);
  } else {
    // Sups below the floor are zero up to rounding; their spread is not growth.
    const double floor = kZeroFloor * sphere_norm;
    r.note("zero_floor", floor);
    r.expect_le("relative_variation", (hi - lo) / std::max(hi, floor), options.variation_tol);
  }
  r.runtime = seconds_since(start);
  return r;
}

VerificationReport check_derivative_recursion(const FundamentalSolution& fs, const Domain& domain,
                                              const Density& phi, std::span<const Point> grid,
                                              int N, double tol) {
  const auto start = Clock::now();
  const int n = domain.dim();
  VerificationReport r;
  r.name = "derivative_recursion";
  r.parameters = params({{"fundsol", to_string(fs.kind())}, {"domain", domain.label()},
                         {"phi", phi.name}, {"points", num(grid.size())}, {"N", num(N)}});
  double worst_in = 0.0;
  double worst_out = 0.0;
  bool any_in = false;
  bool any_out = false;
  for (const auto& x : grid) {
    const CVector g = volume_potential_gradient(fs, domain, phi, x, N);
    for (int j = 0; j < n; ++j) {
      const Complex rhs = volume_potential(fs, domain, phi.partial(j), x, N) -
                          single_layer(fs, domain, density::normal_component(phi, j), x, N);
      const double d = std::abs(g(j) - rhs);
      if (domain.contains(x)) {
        worst_in = std::max(worst_in, d);
        any_in = true;
      } else {
        worst_out = std::max(worst_out, d);
        any_out = true;
      }
    }
  }
  if (any_in) r.expect_le("interior_discrepancy", worst_in, tol);
  if (any_out) r.expect_le("exterior_discrepancy", worst_out, tol);
  r.runtime = seconds_since(start);
  return r;
}

ModulusExperimentOptions default_modulus_options(int n) {
  require_dim(n);
  ModulusExperimentOptions o;
  if (n == 2) {
    o.bases = {make_point(0.0, 0.1), make_point(0.0, -0.3), make_point(0.2, 0.25)};
    o.directions = {make_point(1.0, 0.0), make_point(0.0, 1.0),
                    make_point(std::sqrt(0.5), std::sqrt(0.5))};
  } else {
    o.bases = {make_point(0.0, 0.1, 0.0), make_point(0.0, -0.2, 0.1)};
    o.directions = {make_point(1.0, 0.0, 0.0), make_point(0.0, 1.0, 0.0), make_point(0.0, 0.0, 1.0)};
    o.N = 24;
  }
  return o;
}

VerificationReport modulus_experiment(const FundamentalSolution& fs, const Domain& domain,
                                      const Density& f, double alpha,
                                      const ModulusExperimentOptions& options) {
  const auto start = Clock::now();
  const int n = domain.dim();
  if (options.bases.empty() || options.directions.empty() || options.scales.empty()) {
    throw DomainError("modulus experiment needs bases, directions and scales");
  }
  VerificationReport r;
  r.name = "modulus_experiment";
  r.parameters = params({{"fundsol", to_string(fs.kind())}, {"domain", domain.label()},
                         {"density", f.name}, {"alpha", num(alpha)}, {"N", num(options.N)}});
  const Modulus w1 = Modulus::omega_theta(1.0);
  std::vector<CMatrix> base_h;
  for (const auto& b : options.bases) base_h.push_back(volume_potential_hessian(fs, domain, f, b, options.N));

  const std::size_t ns = options.scales.size();
  // seminorms[(l, j)][scale]
  std::vector<std::vector<double>> omega_sn(static_cast<std::size_t>(n * n), std::vector<double>(ns, 0.0));
  std::vector<std::vector<double>> lip_sn(static_cast<std::size_t>(n * n), std::vector<double>(ns, 0.0));
  for (std::size_t s = 0; s < ns; ++s) {
    const double h = options.scales[s];
    for (std::size_t b = 0; b < options.bases.size(); ++b) {
      for (const auto& d : options.directions) {
        const Point y = options.bases[b] + h * d / d.norm();
        const CMatrix hy = volume_potential_hessian(fs, domain, f, y, options.N);
        for (int l = 0; l < n; ++l) {
          for (int j = l; j < n; ++j) {
            const double diff = std::abs(hy(l, j) - base_h[b](l, j));
            const auto e = static_cast<std::size_t>(l * n + j);
            omega_sn[e][s] = std::max(omega_sn[e][s], diff / w1(h));
            lip_sn[e][s] = std::max(lip_sn[e][s], diff / h);
          }
        }
      }
    }
  }
  for (int l = 0; l < n; ++l) {
    for (int j = l; j < n; ++j) {
      const auto e = static_cast<std::size_t>(l * n + j);
      const std::string entry = "[" + num(l + 1) + num(j + 1) + "]";
      for (std::size_t s = 0; s < ns; ++s) {
        r.note("omega1" + entry + "@" + num(options.scales[s]), omega_sn[e][s]);
        r.note("lipschitz" + entry + "@" + num(options.scales[s]), lip_sn[e][s]);
      }
      const double hi = *std::max_element(omega_sn[e].begin(), omega_sn[e].end());
      const double lo = *std::min_element(omega_sn[e].begin(), omega_sn[e].end());
      if (hi <= options.floor) {
        r.note("omega1_max" + entry, hi);
      } else if (alpha == 1.0) {
        r.expect_le("omega1_ratio" + entry, lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity(),
                    options.max_ratio);
      } else {
        r.note("omega1_ratio" + entry, lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
      }
    }
  }
  r.runtime = seconds_since(start);
  return r;
}

VerificationReport convergence_study(const std::string& operation, const FundamentalSolution& fs,
                                     const Domain& domain, const Density& f,
                                     std::span<const int> Ns) {
  const auto start = Clock::now();
  if (Ns.size() < 2) throw DomainError("convergence study needs at least two resolutions");
  std::vector<int> sizes(Ns.begin(), Ns.end());
  std::sort(sizes.begin(), sizes.end());
  const int n = domain.dim();
  const Point c = domain.center();
  const double R = domain.radius();
  Vector e1 = Vector::Zero(n);
  e1(0) = 1.0;

  std::function<Complex(int)> compute;
  std::optional<Complex> exact;
  int ref_n = 2 * sizes.back();
  bool spectral = false;
  if (operation == "volume_potential") {
    compute = [&](int N) { return volume_potential(fs, domain, f, c, N); };
    if (fs.kind() == FundamentalKind::laplace && domain.kind() == DomainKind::ball && f.name == "one") {
      exact = n == 2 ? -R * R / 4.0 + 0.5 * R * R * std::log(R) : -R * R / 2.0;
    }
  } else if (operation == "volume_potential_gradient") {
    const Point x = c + 0.3 * R * e1;
    compute = [&, x](int N) { return volume_potential_gradient(fs, domain, f, x, N)(0); };
    if (fs.kind() == FundamentalKind::laplace && domain.kind() == DomainKind::ball && f.name == "one") {
      exact = 0.3 * R / n;
    }
  } else if (operation == "single_layer_on_surface") {
    const Point x = n == 2 ? domain.boundary_point(0.7)
                           : Point(c + R * make_point(std::sin(0.7), 0.0, std::cos(0.7)));
    const BoundaryDensity phi = density::trace(f);
    compute = [&, x, phi](int N) { return single_layer(fs, domain, phi, x, N); };
    ref_n = 4 * sizes.back();
  } else if (operation == "boundary_kernel_K") {
    const Point x = c + 3.0 * R * e1;
    const HomogeneousKernel k = gradient_kernel(fs, 0);
    compute = [&, x, k](int N) {
      const auto rule = boundary_rule(domain, N);
      Complex s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        s += rule.weights[i] * k.value(x - rule.nodes[i]) * rule.normals[i](0) * f(rule.nodes[i]);
      }
      return s;
    };
    ref_n = 4 * sizes.back();
    spectral = true;
  } else {
    throw DomainError("unknown convergence operation '" + operation + "'");
  }

  VerificationReport r;
  r.name = "convergence";
  std::string ns;
  for (int N : sizes) ns += (ns.empty() ? "" : " ") + num(N);
  r.parameters = params({{"operation", operation}, {"fundsol", to_string(fs.kind())},
                         {"domain", domain.label()}, {"density", f.name}, {"N", ns}});
  const Complex reference = exact ? *exact : compute(ref_n);
  r.note(exact ? "reference_closed_form" : "reference_N" + num(ref_n), reference.real());
  const double floor = kPrecisionFloor * std::max(1.0, std::abs(reference));
  std::vector<double> err;
  for (int N : sizes) {
    err.push_back(std::abs(compute(N) - reference));
    r.note("error_N" + num(N), err.back());
  }
  double min_order = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  bool measured = false;
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    if (err[i] <= floor || err[i + 1] <= floor) continue;
    measured = true;
    const double order = std::log(err[i] / err[i + 1]) / std::log(double(sizes[i + 1]) / sizes[i]);
    min_order = std::min(min_order, order);
    min_ratio = std::min(min_ratio, err[i] / err[i + 1]);
    r.note("order_N" + num(sizes[i]) + "_N" + num(sizes[i + 1]), order);
  }
  if (measured) {
    if (spectral) {
      r.expect_ge("min_error_ratio", min_ratio, 10.0);
    } else {
      r.expect_ge("min_observed_order", min_order, 3.0);
    }
  }
  // The finest resolution must either have converged to the floor or still be
  // improving; a stalled error above the floor fails this row.
  r.expect_le("final_error", err.back(), std::max(floor, err[err.size() - 2]));
  r.runtime = seconds_since(start);
  return r;
}

VerificationReport check_seminorm_machinery(int n, int functions, int points, std::uint64_t seed) {
  const auto start = Clock::now();
  require_dim(n);
  if (functions < 1 || points < 4) throw DomainError("need at least one function and four points");
  VerificationReport r;
  r.name = "seminorm_machinery";
  r.parameters = params({{"n", num(n)}, {"functions", num(functions)}, {"points", num(points)},
                         {"seed", std::to_string(seed)}});

  constexpr double theta = 0.5;
  constexpr double theta_low = 0.25;
  const Modulus omega = Modulus::omega_theta(theta);
  const Modulus power_hi = Modulus::power(theta);
  const Modulus power_lo = Modulus::power(theta_low);
  const double r_theta = std::exp(-1.0 / theta);
  const double beta = theta - theta_low;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_point = [&] {
    Point p = Point::Zero(n);
    for (int i = 0; i < n; ++i) p(i) = unit(rng);
    return p;
  };

  double tail = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  double monotone = 0.0;
  for (int fi = 0; fi < functions; ++fi) {
    std::vector<Point> pts;
    for (int i = 0; i < points; ++i) pts.push_back(random_point());
    const Point anchor = random_point();
    const Point wave = random_point() * 8.0;
    const double expo = 0.3 + 0.7 * unit(rng);
    const double amp = 0.5 + 2.0 * unit(rng);
    const double phase = 2.0 * kPi * unit(rng);
    std::vector<Complex> vals;
    for (const auto& p : pts) {
      double v = 0.0;
      switch (fi % 3) {
        case 0: v = amp * std::sin(wave.dot(p) + phase); break;
        case 1: v = amp * std::pow((p - anchor).norm(), expo); break;
        default: v = amp * (std::pow((p - anchor).norm(), expo) + 0.2 * std::cos(wave.dot(p))); break;
      }
      vals.push_back(v);
    }
    double sup = 0.0;
    double diam = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sup = std::max(sup, std::abs(vals[i]));
      for (std::size_t k = i + 1; k < pts.size(); ++k) diam = std::max(diam, (pts[i] - pts[k]).norm());
    }
    for (const Modulus* m : {&omega, &power_hi, &power_lo}) {
      for (double a : {0.05, 0.2, 0.5}) {
        const double s = holder_seminorm(pts, vals, *m, SeparationBand{a});
        tail = std::max(tail, s / (2.0 * sup / (*m)(a)));
      }
    }
    const double s_omega = holder_seminorm(pts, vals, omega);
    const double s_hi = holder_seminorm(pts, vals, power_hi);
    const double s_lo = holder_seminorm(pts, vals, power_lo);
    const double c_upper = theta * std::max(1.0, std::pow(diam / r_theta, theta));
    const double c_lower = std::max(1.0 / (std::exp(1.0) * beta), std::exp(-beta / theta) / theta);
    upper = std::max(upper, s_omega / (c_upper * s_hi));
    lower = std::max(lower, s_lo / (c_lower * (s_omega + sup)));
    const std::size_t half = pts.size() / 2;
    const double s_half = holder_seminorm(std::span<const Point>(pts.data(), half),
                                          std::span<const Complex>(vals.data(), half), power_hi);
    monotone = std::max(monotone, s_half / s_hi);
  }
  const double slack = 1.0 + 1e-12;
  r.expect_le("tail_bound_ratio", tail, slack);
  r.expect_le("omega_vs_power_ratio", upper, slack);
  r.expect_le("power_low_vs_omega_ratio", lower, slack);
  r.expect_le("subset_vs_full_ratio", monotone, slack);
  r.runtime = seconds_since(start);
  return r;
}

}  // namespace volpot

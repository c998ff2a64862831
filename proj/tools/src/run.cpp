#include "volpot_cli/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

#include "volpot/potentials.hpp"
#include "volpot/schauder.hpp"

namespace volpot::cli {

namespace {

constexpr DefaultTolerance kDefaults[] = {
    {"pde_identity", "tol", "<=", 1e-3},
    {"pde_identity_exterior", "tol", "<=", 1e-6},
    {"transmission", "tol", "<=", 1e-6},
    {"transmission_negative", "tol", "<=", 1e-4},
    {"transmission_single_layer", "tol", "<=", 1e-8},
    {"derivative_recursion", "tol", "<=", 1e-5},
    {"integration_by_parts", "tol", "<=", 1e-4},
    {"integration_by_parts", "psi_tol", "<=", 1e-3},
    {"integration_by_parts_weak", "tol", "<=", 1e-4},
    {"integration_by_parts_weak", "psi_tol", "<=", 1e-6},
    {"maximal_bound", "variation_tol", "<=", 0.1},
    {"maximal_bound_control", "growth_factor", ">=", 0.9},
    {"hessian", "tol", "<=", 1e-5},
    {"hessian", "symmetry_tol", "<=", 1e-6},
    {"golden_G", "tol", "<=", 1e-6},
    {"negative_consistency", "tol", "<=", 1e-6},
    {"negative_consistency", "functional_tol", "<=", 1e-10},
    {"seminorm_machinery", "tol", "<=", 1e-12},
    {"modulus", "max_ratio", "<=", 5.0},
    {"converge", "min_order", ">=", 3.0},
    {"converge", "kernel_ratio", ">=", 10.0},
};

const std::map<std::string, int> kResolutions = {
    {"pde_identity", 48},          {"pde_identity_exterior", 48},
    {"transmission", 64},          {"transmission_negative", 64},
    {"transmission_single_layer", 64}, {"derivative_recursion", 48},
    {"integration_by_parts", 48},  {"integration_by_parts_weak", 48},
    {"maximal_bound", 48},         {"maximal_bound_control", 48},
    {"hessian", 64},               {"golden_G", 64},
    {"negative_consistency", 64},  {"seminorm_machinery", 64},
};

const std::set<std::string> kPresets = {"one", "x1", "x1sq", "abs_x1", "cos_k", "bump", "tabulated"};

const std::map<std::string, std::set<std::string>> kSectionKeys = {
    {"operator", {"kind", "dim", "kappa", "a2", "a1", "a0"}},
    {"fundsol", {"kind", "kappa"}},
    {"domain", {"kind", "center", "radius", "R", "axes", "a", "b", "coeffs", "rho_coeffs"}},
    {"density", {"name", "k", "path"}},
    {"eval", {"points", "N", "gradient"}},
    {"verify", {"checks", "seed", "h"}},
    {"converge", {"operations", "N", "kernel_N", "min_order", "kernel_ratio"}},
    {"modulus", {"density", "alpha", "scales", "N", "max_ratio"}},
    {"output", {"dir"}},
};

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string format_point(const Point& x) {
  std::string s = "(";
  for (int i = 0; i < x.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x(i));
    if (i > 0) s += " ";
    s += buf;
  }
  return s + ")";
}

Point to_point(const std::vector<double>& v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i)) = v[i];
  return p;
}

Vector unit(int n, int j) {
  Vector e = Vector::Zero(n);
  e(j) = 1.0;
  return e;
}

// Largest r with B(center, r) inside the domain.
double inner_radius(const Domain& d) {
  return d.kind() == DomainKind::ball ? d.radius() : d.boundary_distance(d.center());
}

std::vector<Point> interior_grid(const Domain& d) {
  const int n = d.dim();
  const double s = 0.3 * inner_radius(d);
  std::vector<Point> g;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      Vector v = Vector::Zero(n);
      v(0) = s * i;
      v(1) = s * j;
      g.push_back(d.center() + v);
    }
  }
  return g;
}

std::vector<Point> exterior_grid(const Domain& d) {
  std::vector<Point> g;
  const double R = 2.0 * d.radius();
  if (d.dim() == 2) {
    for (int k = 0; k < 9; ++k) {
      const double t = 0.1 + 2.0 * kPi * k / 9.0;
      g.push_back(d.center() + R * make_point(std::cos(t), std::sin(t)));
    }
  } else {
    for (const auto& b : boundary_samples(Domain::make_ball(3, make_point(0, 0, 0), 1.0), 9)) {
      g.push_back(d.center() + R * b);
    }
  }
  return g;
}

std::vector<Point> five_points(const Domain& d) {
  const double s = 0.3 * inner_radius(d);
  const int n = d.dim();
  return {d.center(), d.center() + s * unit(n, 0), d.center() - s * unit(n, 0),
          d.center() + s * unit(n, 1), d.center() - s * unit(n, 1)};
}

double sup_abs(const Domain& d, const Density& f) {
  double s = 0.0;
  for (const auto& p : closure_samples(d, d.dim() == 2 ? 16 : 8)) s = std::max(s, std::abs(f(p)));
  return s;
}

std::string describe(const RunConfig& rc, const Problem& p) {
  return "fundsol=" + std::string(to_string(p.fs.kind())) + ";domain=" + p.domain.label() +
         ";density=" + rc.density;
}

HomogeneousKernel even_zero_mean_kernel(int n) {
  HomogeneousKernel k;
  k.dim = n;
  k.degree = -n;
  k.name = "(z1^2-z2^2)/|z|^(n+2)";
  k.value = [n](const Point& z) {
    const double r2 = z.squaredNorm();
    return (z(0) * z(0) - z(1) * z(1)) / std::pow(r2, 0.5 * (n + 2));
  };
  k.gradient = [n](const Point& z) {
    const double r2 = z.squaredNorm();
    const double num = z(0) * z(0) - z(1) * z(1);
    const double den = std::pow(r2, 0.5 * (n + 2));
    Vector g = -(n + 2) * num / (den * r2) * z;
    g(0) += 2.0 * z(0) / den;
    g(1) -= 2.0 * z(1) / den;
    return g;
  };
  return k;
}

HomogeneousKernel radial_kernel(int n) {
  HomogeneousKernel k;
  k.dim = n;
  k.degree = -n;
  k.name = "|z|^-n";
  k.value = [n](const Point& z) { return std::pow(z.norm(), -n); };
  k.gradient = [n](const Point& z) {
    const double r2 = z.squaredNorm();
    return Vector(-n * std::pow(r2, -0.5 * n - 1.0) * z);
  };
  return k;
}

TwoPointKernel gradient_two_point(const FundamentalSolution& fs, int j) {
  TwoPointKernel K;
  K.name = "d" + std::to_string(j + 1) + "S(x-y)";
  K.value = [fs, j](const Point& x, const Point& y) { return Complex(fs.grad(x - y)(j)); };
  K.grad_y = [fs, j](const Point& x, const Point& y) {
    const Matrix h = fs.hess(x - y);
    CVector g(x.size());
    for (int i = 0; i < x.size(); ++i) g(i) = -h(i, j);
    return g;
  };
  return K;
}

TwoPointKernel value_two_point(const FundamentalSolution& fs) {
  TwoPointKernel K;
  K.name = "S(x-y)";
  K.value = [fs](const Point& x, const Point& y) { return Complex(fs.eval(x - y)); };
  K.grad_y = [fs](const Point& x, const Point& y) {
    return CVector((-fs.grad(x - y)).cast<Complex>());
  };
  return K;
}

NegativeExponentDensity x1_divergence_form(const Domain& d) {
  std::vector<Density> comps{density::constant(0.0), density::x1()};
  for (int j = 1; j < d.dim(); ++j) comps.push_back(density::constant(0.0));
  return make_negative_density(d, std::move(comps), 1.0);
}

const std::vector<double> kOffsets{1e-2, 1e-3, 1e-4};

VerificationReport hessian_check(const RunConfig& rc, const Problem& p, int N) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  r.name = "hessian";
  r.parameters = describe(rc, p) + ";N=" + std::to_string(N);
  const int n = p.domain.dim();
  const double scale = std::max(sup_abs(p.domain, p.f), 1e-300);
  const bool closed_form = p.fs.kind() == FundamentalKind::laplace &&
                           p.domain.kind() == DomainKind::ball && rc.density == "one";
  double residual = 0.0;
  double asym = 0.0;
  double vs_closed = 0.0;
  for (const auto& x : five_points(p.domain)) {
    const CMatrix H = volume_potential_hessian(p.fs, p.domain, p.f, x, N);
    Complex lhs = 0.0;
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) lhs += p.op.a2()(l, j) * H(l, j);
    }
    if (p.op.has_lower_order_terms()) {
      const CVector g = volume_potential_gradient(p.fs, p.domain, p.f, x, N);
      for (int j = 0; j < n; ++j) lhs += p.op.a1()(j) * g(j);
      lhs += p.op.a0() * volume_potential(p.fs, p.domain, p.f, x, N);
    }
    residual = std::max(residual, std::abs(lhs - p.f(x)) / scale);
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) {
        asym = std::max(asym, std::abs(H(l, j) - H(j, l)));
        if (closed_form) {
          vs_closed = std::max(vs_closed, std::abs(H(l, j) - (l == j ? 1.0 / n : 0.0)));
        }
      }
    }
  }
  r.expect_le("operator_residual", residual, rc.tolerance("hessian", "tol"));
  r.expect_le("asymmetry", asym, rc.tolerance("hessian", "symmetry_tol"));
  if (closed_form) r.expect_le("max_error_vs_identity_over_n", vs_closed, rc.tolerance("hessian", "tol"));
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

VerificationReport golden_check(const RunConfig& rc, const Problem& p, int N) {
  if (p.domain.dim() != 2 || p.domain.kind() != DomainKind::ball) {
    throw ConfigError("golden_G", 0, "golden_G needs a 2D ball domain");
  }
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  r.name = "golden_G";
  r.parameters = "kernel=z1/(2pi|z|^2);psi=(y1-c1)^2;domain=" + p.domain.label() +
                 ";N=" + std::to_string(N);
  const double c1 = p.domain.center()(0);
  Density psi;
  psi.name = "shifted_x1sq";
  psi.value = [c1](const Point& y) { return Complex((y(0) - c1) * (y(0) - c1)); };
  psi.gradient = [c1](const Point& y) {
    CVector g = CVector::Zero(y.size());
    g(0) = 2.0 * (y(0) - c1);
    return g;
  };
  const auto k = gradient_kernel(FundamentalSolution::laplace(2), 0);
  const Complex G = subtracted_integral_G(k, psi, 0, p.domain, p.domain.center(), N);
  const double R = p.domain.radius();
  r.note("G1", G.real());
  r.expect_le("abs_error_vs_minus_R2_over_8", std::abs(G - Complex(-R * R / 8.0)),
              rc.tolerance("golden_G", "tol"));
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

VerificationReport negative_consistency_check(const RunConfig& rc, const Problem& p, int N) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  r.name = "negative_consistency";
  r.parameters = "fundsol=" + std::string(to_string(p.fs.kind())) + ";domain=" + p.domain.label() +
                 ";nd=(0 y1 0);N=" + std::to_string(N);
  const auto nd = x1_divergence_form(p.domain);
  double diff = 0.0;
  for (const auto& x : five_points(p.domain)) {
    const Complex a = volume_potential_negative(p.fs, p.domain, nd, x, N);
    const Complex b = volume_potential(p.fs, p.domain, density::one(), x, N);
    diff = std::max(diff, std::abs(a - b));
  }
  std::vector<Density> plain{density::one()};
  for (int j = 0; j < p.domain.dim(); ++j) plain.push_back(density::constant(0.0));
  const auto nd_plain = make_negative_density(p.domain, std::move(plain), 1.0);
  const Complex I1 = integral_functional_I(p.domain, nd, N);
  const Complex I0 = integral_functional_I(p.domain, nd_plain, N);
  r.expect_le("max_potential_difference", diff, rc.tolerance("negative_consistency", "tol"));
  r.expect_le("functional_I_difference", std::abs(I1 - I0),
              rc.tolerance("negative_consistency", "functional_tol"));
  r.note("norm_bound", nd.norm_bound);
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

template <class Fn>
std::vector<VerificationReport> run_parallel(std::size_t count, int jobs, Fn&& task) {
  std::vector<VerificationReport> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  if (threads == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

std::span<const DefaultTolerance> default_tolerances() { return kDefaults; }

int default_resolution(const std::string& check) {
  const auto it = kResolutions.find(check);
  return it == kResolutions.end() ? 48 : it->second;
}

const std::vector<std::string>& default_checks() {
  static const std::vector<std::string> checks = {
      "pde_identity",         "pde_identity_exterior",     "transmission",
      "transmission_negative", "transmission_single_layer", "derivative_recursion",
      "integration_by_parts", "integration_by_parts_weak", "maximal_bound",
      "maximal_bound_control", "hessian",                  "negative_consistency",
      "seminorm_machinery"};
  return checks;
}

double RunConfig::tolerance(const std::string& check, const std::string& quantity) const {
  const auto it = tolerances.find(check);
  if (it != tolerances.end()) {
    const auto jt = it->second.find(quantity);
    if (jt != it->second.end()) return jt->second;
  }
  for (const auto& d : kDefaults) {
    if (check == d.check && quantity == d.quantity) return d.value;
  }
  throw ConfigError(check, 0, "no tolerance named " + quantity);
}

int RunConfig::resolution(const std::string& check) const {
  const auto it = resolutions.find(check);
  return it == resolutions.end() ? default_resolution(check) : it->second;
}

RunConfig read_run_config(const Config& cfg) {
  // Per-check sections accept N plus the quantities of the default table.
  std::map<std::string, std::set<std::string>> allowed = kSectionKeys;
  for (const auto& d : kDefaults) allowed[d.check].insert(d.quantity);
  for (const auto& [check, n] : kResolutions) allowed[check].insert("N");
  for (const auto& [key, entry] : cfg.entries()) {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    const auto it = allowed.find(section);
    if (it == allowed.end()) cfg.fail(key, "unknown section '" + section + "'");
    if (!it->second.count(name)) cfg.fail(key, "unknown key");
  }

  // Alternative spellings of the same key; setting both is an error.
  auto pick = [&](const std::string& key, const std::string& alt) {
    if (cfg.has(key) && cfg.has(alt)) cfg.fail(alt, "duplicates " + key);
    return cfg.has(alt) ? alt : key;
  };
  auto underscored = [](std::string s) {
    for (auto& c : s) c = c == '-' ? '_' : c;
    return s;
  };

  RunConfig rc;
  rc.dim = cfg.get_int("operator.dim", 2);
  if (rc.dim != 2 && rc.dim != 3) cfg.fail("operator.dim", "dimension must be 2 or 3");
  rc.operator_kind = underscored(cfg.get_string("operator.kind", rc.operator_kind));
  if (rc.operator_kind != "laplace" && rc.operator_kind != "modified_helmholtz" &&
      rc.operator_kind != "general") {
    cfg.fail("operator.kind", "unknown operator '" + rc.operator_kind +
                                  "' (laplace, modified_helmholtz, general)");
  }
  rc.kappa = cfg.get_double(pick("operator.kappa", "fundsol.kappa"), rc.kappa);
  if (rc.operator_kind == "modified_helmholtz" && !(rc.kappa > 0.0)) {
    cfg.fail("operator.kappa", "kappa must be positive");
  }
  for (const auto& row : cfg.get_tuples("operator.a2", rc.dim)) rc.a2.insert(rc.a2.end(), row.begin(), row.end());
  rc.a1 = cfg.get_doubles("operator.a1", {});
  if (cfg.has("operator.a0")) {
    // re or re,im
    const std::string text = cfg.get_string("operator.a0", "");
    const auto comma = text.find(',');
    const std::string re = text.substr(0, comma);
    const std::string im = comma == std::string::npos ? "0" : text.substr(comma + 1);
    try {
      std::size_t used_re = 0;
      std::size_t used_im = 0;
      const double a = std::stod(re, &used_re);
      const double b = std::stod(im, &used_im);
      if (re.find_first_not_of(" \t", used_re) != std::string::npos ||
          im.find_first_not_of(" \t", used_im) != std::string::npos) {
        throw std::invalid_argument(text);
      }
      rc.a0 = Complex(a, b);
    } catch (const std::exception&) {
      cfg.fail("operator.a0", "expected <re> or <re>,<im>");
    }
  }
  if (rc.operator_kind == "general") {
    if (rc.a2.size() != static_cast<std::size_t>(rc.dim * rc.dim)) {
      cfg.fail("operator.a2", "expected " + std::to_string(rc.dim * rc.dim) + " entries (row major)");
    }
    if (!rc.a1.empty() && rc.a1.size() != static_cast<std::size_t>(rc.dim)) {
      cfg.fail("operator.a1", "expected " + std::to_string(rc.dim) + " entries");
    }
  }
  rc.fundsol = underscored(cfg.get_string("fundsol.kind", rc.fundsol));
  if (rc.fundsol != "auto" && rc.fundsol != "laplace" && rc.fundsol != "principal" &&
      rc.fundsol != "modified_helmholtz") {
    cfg.fail("fundsol.kind", "unknown fundamental solution '" + rc.fundsol + "'");
  }

  rc.domain_kind = cfg.get_string("domain.kind", rc.domain_kind);
  if (rc.domain_kind == "star") rc.domain_kind = "cosine_star";
  if (rc.domain_kind != "ball" && rc.domain_kind != "ellipse" && rc.domain_kind != "cosine_star") {
    cfg.fail("domain.kind", "unknown domain '" + rc.domain_kind + "' (ball, ellipse, star)");
  }
  rc.center = cfg.get_doubles("domain.center", std::vector<double>(static_cast<std::size_t>(rc.dim), 0.0));
  if (rc.center.size() != static_cast<std::size_t>(rc.dim)) {
    cfg.fail("domain.center", "expected " + std::to_string(rc.dim) + " coordinates");
  }
  const std::string radius_key = pick("domain.radius", "domain.R");
  rc.radius = cfg.get_double(radius_key, rc.radius);
  if (!(rc.radius > 0.0)) cfg.fail(radius_key, "radius must be positive");
  rc.axes = cfg.get_doubles("domain.axes", {1.0, 0.5});
  if (cfg.has("domain.a") || cfg.has("domain.b")) {
    if (cfg.has("domain.axes")) cfg.fail("domain.axes", "set either axes or a and b");
    rc.axes = {cfg.get_double("domain.a", rc.axes[0]), cfg.get_double("domain.b", rc.axes[1])};
  }
  rc.coeffs = cfg.get_doubles(pick("domain.coeffs", "domain.rho_coeffs"), {1.0, 0.0, 0.0, 0.0, 0.0, 0.15});
  if (rc.domain_kind != "ball" && rc.dim != 2) cfg.fail("domain.kind", "star domains are planar");
  if (rc.domain_kind == "ellipse" &&
      (rc.axes.size() != 2 || !(rc.axes[0] > 0.0) || !(rc.axes[1] > 0.0))) {
    cfg.fail("domain.axes", "expected two positive semi-axes");
  }

  rc.density = cfg.get_string("density.name", rc.density);
  if (!kPresets.count(rc.density)) cfg.fail("density.name", "unknown density preset '" + rc.density + "'");
  rc.density_k = cfg.get_double("density.k", rc.density_k);
  rc.density_path = cfg.get_string("density.path", "");
  if (rc.density == "tabulated" && rc.density_path.empty()) {
    cfg.fail("density.name", "tabulated density needs density.path");
  }

  for (const auto& t : cfg.get_tuples("eval.points", rc.dim)) rc.eval_points.push_back(to_point(t));
  if (rc.eval_points.empty()) rc.eval_points.push_back(to_point(rc.center));
  rc.eval_N = cfg.get_int("eval.N", rc.eval_N);
  rc.eval_gradient = cfg.get_bool("eval.gradient", rc.eval_gradient);

  rc.checks = cfg.get_strings("verify.checks", default_checks());
  for (const auto& c : rc.checks) {
    if (!kResolutions.count(c)) cfg.fail("verify.checks", "unknown check '" + c + "'");
  }
  rc.fd_step = cfg.get_double("verify.h", rc.fd_step);
  if (!(rc.fd_step > 0.0)) cfg.fail("verify.h", "step must be positive");
  if (cfg.has("verify.seed")) {
    const auto s = cfg.get_string("verify.seed", "");
    try {
      std::size_t used = 0;
      rc.seed = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      cfg.fail("verify.seed", "expected an unsigned integer");
    }
  }

  for (const auto& d : kDefaults) {
    const std::string key = std::string(d.check) + "." + d.quantity;
    if (!cfg.has(key)) continue;
    const double v = cfg.get_double(key, d.value);
    if (!(v > 0.0)) cfg.fail(key, "tolerance must be positive");
    rc.tolerances[d.check][d.quantity] = v;
  }
  for (const auto& [check, n] : kResolutions) {
    const std::string key = check + ".N";
    if (!cfg.has(key)) continue;
    rc.resolutions[check] = cfg.get_int(key, n);
  }

  rc.operations = cfg.get_strings("converge.operations", rc.operations);
  const std::set<std::string> ops = {"volume_potential", "volume_potential_gradient",
                                     "single_layer_on_surface", "boundary_kernel_K"};
  for (const auto& o : rc.operations) {
    if (!ops.count(o)) cfg.fail("converge.operations", "unknown operation '" + o + "'");
  }
  rc.converge_N = cfg.get_ints("converge.N", rc.converge_N);
  rc.converge_kernel_N = cfg.get_ints("converge.kernel_N", rc.converge_kernel_N);
  if (rc.converge_N.size() < 2) cfg.fail("converge.N", "need at least two resolutions");
  if (rc.converge_kernel_N.size() < 2) cfg.fail("converge.kernel_N", "need at least two resolutions");

  rc.modulus_density = cfg.get_string("modulus.density", rc.modulus_density);
  if (!kPresets.count(rc.modulus_density) || rc.modulus_density == "tabulated") {
    cfg.fail("modulus.density", "unknown density preset '" + rc.modulus_density + "'");
  }
  rc.modulus_alpha = cfg.get_double("modulus.alpha", rc.modulus_alpha);
  if (!(rc.modulus_alpha > 0.0 && rc.modulus_alpha <= 1.0)) cfg.fail("modulus.alpha", "alpha must lie in (0, 1]");
  rc.modulus_scales = cfg.get_doubles("modulus.scales", rc.modulus_scales);
  if (rc.modulus_scales.size() < 2) cfg.fail("modulus.scales", "need at least two scales");
  for (double s : rc.modulus_scales) {
    if (!(s > 0.0)) cfg.fail("modulus.scales", "scales must be positive");
  }
  rc.modulus_N = cfg.get_int("modulus.N", rc.modulus_N);

  for (const auto& [key, entry] : cfg.entries()) {
    const bool scalar_N = key.size() > 2 && key.compare(key.size() - 2, 2, ".N") == 0 &&
                          key != "converge.N";
    if (scalar_N && cfg.get_int(key, 0) < 4) cfg.fail(key, "N must be at least 4");
  }
  for (const char* key : {"converge.N", "converge.kernel_N"}) {
    for (int v : cfg.get_ints(key, {})) {
      if (v < 4) cfg.fail(key, "N values must be at least 4");
    }
  }

  rc.output_dir = cfg.get_string("output.dir", rc.output_dir);
  return rc;
}

Problem build_problem(const RunConfig& rc) {
  const int n = rc.dim;
  OperatorCoefficients op = OperatorCoefficients::laplacian(n);
  if (rc.operator_kind == "modified_helmholtz") {
    op = OperatorCoefficients::modified_helmholtz(n, rc.kappa);
  } else if (rc.operator_kind == "general") {
    Matrix a2(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a2(i, j) = rc.a2[static_cast<std::size_t>(i * n + j)];
    }
    CVector a1 = CVector::Zero(n);
    for (std::size_t j = 0; j < rc.a1.size(); ++j) a1(static_cast<Eigen::Index>(j)) = rc.a1[j];
    op = OperatorCoefficients::make(a2, a1, rc.a0);
  }

  FundamentalSolution fs = FundamentalSolution::for_operator(op);
  if (rc.fundsol == "laplace") {
    fs = FundamentalSolution::laplace(n);
  } else if (rc.fundsol == "principal") {
    fs = FundamentalSolution::principal(op);
  } else if (rc.fundsol == "modified_helmholtz") {
    fs = FundamentalSolution::modified_helmholtz(n, rc.kappa);
  }

  const Point c = to_point(rc.center);
  Domain domain = rc.domain_kind == "ellipse"       ? Domain::make_ellipse(rc.axes[0], rc.axes[1], c)
                  : rc.domain_kind == "cosine_star" ? Domain::make_cosine_star(rc.coeffs, c)
                                                    : Domain::make_ball(n, c, rc.radius);

  Density f = rc.density == "tabulated" ? density::tabulated_csv(rc.density_path, n)
                                        : density::preset(rc.density, n, rc.density_k);
  return Problem{std::move(op), std::move(fs), std::move(domain), std::move(f)};
}

VerificationReport run_check(const std::string& check, const RunConfig& rc, const Problem& p) {
  const int N = rc.resolution(check);
  const int n = p.domain.dim();
  if (check == "pde_identity" || check == "pde_identity_exterior") {
    const bool ext = check == "pde_identity_exterior";
    auto r = check_pde_identity(p.fs, p.op, p.domain, p.f,
                                ext ? exterior_grid(p.domain) : interior_grid(p.domain), rc.fd_step, N,
                                rc.tolerance(check, "tol"));
    r.name = check;
    return r;
  }
  if (check == "transmission") {
    const auto samples = boundary_samples(p.domain, 32);
    auto r = check_transmission(
        "P[" + rc.density + "]", p.domain,
        [&](const Point& x) { return volume_potential(p.fs, p.domain, p.f, x, N); }, samples, kOffsets,
        rc.tolerance(check, "tol"));
    return r;
  }
  if (check == "transmission_negative") {
    const auto nd = x1_divergence_form(p.domain);
    const auto samples = boundary_samples(p.domain, 32);
    auto r = check_transmission(
        "P[(0 y1 0)]", p.domain,
        [&](const Point& x) { return volume_potential_negative(p.fs, p.domain, nd, x, N); }, samples,
        kOffsets, rc.tolerance(check, "tol"));
    r.name = check;
    return r;
  }
  if (check == "transmission_single_layer") {
    const auto samples = boundary_samples(p.domain, 32);
    const auto phi = density::trace(p.f);
    auto r = check_transmission(
        "v[" + rc.density + "]", p.domain,
        [&](const Point& x) { return single_layer(p.fs, p.domain, phi, x, N); }, samples, kOffsets,
        rc.tolerance(check, "tol"));
    r.name = check;
    return r;
  }
  if (check == "derivative_recursion") {
    auto grid = interior_grid(p.domain);
    for (const auto& x : exterior_grid(p.domain)) grid.push_back(x);
    return check_derivative_recursion(p.fs, p.domain, p.f, grid, N, rc.tolerance(check, "tol"));
  }
  if (check == "integration_by_parts" || check == "integration_by_parts_weak") {
    const bool weak = check == "integration_by_parts_weak";
    IntegrationByPartsOptions opt;
    opt.tol = rc.tolerance(check, "tol");
    opt.psi_tol = rc.tolerance(check, "psi_tol");
    if (weak) {
      opt.below_critical = true;
    } else if (p.fs.kind() != FundamentalKind::principal) {
      opt.psi_expected = 1.0 / n;
    }
    const Point x = p.domain.center() + 0.2 * inner_radius(p.domain) * unit(n, 0);
    auto r = check_integration_by_parts(weak ? value_two_point(p.fs) : gradient_two_point(p.fs, 0),
                                        p.domain, p.f, x, 0, N, opt);
    r.name = check;
    return r;
  }
  if (check == "maximal_bound" || check == "maximal_bound_control") {
    const bool control = check == "maximal_bound_control";
    MaximalBoundOptions opt;
    const std::vector<double> rhos{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<Point> xs{p.domain.center()};
    if (control) {
      opt.min_growth_per_decade =
          rc.tolerance(check, "growth_factor") * unit_sphere_measure(n) * std::log(10.0);
    } else {
      opt.variation_tol = rc.tolerance(check, "variation_tol");
      Vector off = Vector::Zero(n);
      off(0) = 0.4;
      off(1) = 0.2;
      xs.push_back(p.domain.center() + inner_radius(p.domain) * off);
    }
    auto r = check_maximal_bound(control ? radial_kernel(n) : even_zero_mean_kernel(n), p.domain, xs,
                                 rhos, N, opt);
    r.name = check;
    return r;
  }
  if (check == "hessian") return hessian_check(rc, p, N);
  if (check == "golden_G") return golden_check(rc, p, N);
  if (check == "negative_consistency") return negative_consistency_check(rc, p, N);
  if (check == "seminorm_machinery") {
    auto r = check_seminorm_machinery(n, 10, N, rc.seed);
    return r;
  }
  throw ConfigError("verify.checks", 0, "unknown check '" + check + "'");
}

std::vector<VerificationReport> run_verify(const RunConfig& rc, const Problem& p, int jobs) {
  return run_parallel(rc.checks.size(), jobs,
                      [&](std::size_t i) { return run_check(rc.checks[i], rc, p); });
}

std::vector<VerificationReport> run_converge(const RunConfig& rc, const Problem& p, int jobs) {
  return run_parallel(rc.operations.size(), jobs, [&](std::size_t i) {
    const auto& op = rc.operations[i];
    const auto& Ns = op == "boundary_kernel_K" ? rc.converge_kernel_N : rc.converge_N;
    auto r = convergence_study(op, p.fs, p.domain, p.f, Ns);
    // Thresholds from the configuration replace the study's defaults.
    for (auto& o : r.observed) {
      if (o.label == "min_observed_order") o.tolerance = rc.tolerance("converge", "min_order");
      if (o.label == "min_error_ratio") o.tolerance = rc.tolerance("converge", "kernel_ratio");
    }
    return r;
  });
}

std::vector<VerificationReport> run_modulus(const RunConfig& rc, const Problem& p) {
  auto opt = default_modulus_options(p.domain.dim());
  opt.scales = rc.modulus_scales;
  opt.N = rc.modulus_N;
  opt.max_ratio = rc.tolerance("modulus", "max_ratio");
  const Density f = density::preset(rc.modulus_density, p.domain.dim(), rc.density_k);
  return {modulus_experiment(p.fs, p.domain, f, rc.modulus_alpha, opt)};
}

std::vector<VerificationReport> run_eval(const RunConfig& rc, const Problem& p) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport r;
  r.name = "eval";
  r.parameters = describe(rc, p) + ";N=" + std::to_string(rc.eval_N);
  for (const auto& x : rc.eval_points) {
    if (x.size() != p.domain.dim()) throw ConfigError("eval.points", 0, "point dimension mismatch");
    const std::string at = "@" + format_point(x);
    const Complex u = volume_potential(p.fs, p.domain, p.f, x, rc.eval_N);
    r.note("u" + at, u.real());
    if (u.imag() != 0.0) r.note("u_imag" + at, u.imag());
    if (rc.eval_gradient) {
      const CVector g = volume_potential_gradient(p.fs, p.domain, p.f, x, rc.eval_N);
      for (int j = 0; j < g.size(); ++j) r.note("du" + std::to_string(j + 1) + at, g(j).real());
    }
  }
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {r};
}

int run(const std::string& subcommand, const RunOptions& options, std::ostream& out,
        std::ostream& err) {
  std::vector<VerificationReport> reports;
  std::string out_dir;
  try {
    if (subcommand != "eval" && subcommand != "verify" && subcommand != "converge" &&
        subcommand != "modulus") {
      err << "error: unknown subcommand '" << subcommand << "' (eval, verify, converge, modulus)\n";
      return kExitError;
    }
    if (options.jobs < 1) {
      err << "error: --jobs must be at least 1\n";
      return kExitError;
    }
    const Config cfg = Config::load(options.config_path);
    RunConfig rc = read_run_config(cfg);
    if (options.seed) rc.seed = *options.seed;
    out_dir = options.out_dir.value_or(rc.output_dir);
    const Problem problem = build_problem(rc);
    if (subcommand == "eval") {
      reports = run_eval(rc, problem);
    } else if (subcommand == "verify") {
      reports = run_verify(rc, problem, options.jobs);
    } else if (subcommand == "converge") {
      reports = run_converge(rc, problem, options.jobs);
    } else {
      reports = run_modulus(rc, problem);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitError;
  } catch (const volpot::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto path = std::filesystem::path(out_dir) / (subcommand + ".csv");
  std::ofstream csv(path);
  if (!csv) {
    err << "error: cannot write " << path.string() << "\n";
    return kExitError;
  }
  write_csv_header(csv);
  bool all_pass = true;
  for (const auto& r : reports) {
    write_csv(csv, r);
    all_pass = all_pass && r.pass();
    char line[160];
    std::snprintf(line, sizeof line, "%-5s %-28s %8.2f s\n", r.pass() ? "PASS" : "FAIL",
                  r.name.c_str(), r.runtime);
    out << line;
  }
  out << "wrote " << path.string() << "\n";
  return all_pass ? kExitPass : kExitCheckFailed;
}

void print_version(std::ostream& out) {
  out << "volpot " << VOLPOT_VERSION << "\n";
#if defined(__clang__)
  out << "compiler: clang " << __clang_major__ << "." << __clang_minor__ << "." << __clang_patchlevel__ << "\n";
#elif defined(__GNUC__)
  out << "compiler: gcc " << __GNUC__ << "." << __GNUC_MINOR__ << "." << __GNUC_PATCHLEVEL__ << "\n";
#endif
  out << "c++ standard: " << __cplusplus << "\n";
  out << "\ndefault tolerances\n";
  for (const auto& d : kDefaults) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-28s %-15s %s %s\n", d.check, d.quantity, d.comparison,
                  format_value(d.value).c_str());
    out << line;
  }
  out << "\ndefault resolutions\n";
  for (const auto& [check, n] : kResolutions) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-28s N = %d\n", check.c_str(), n);
    out << line;
  }
}

}  // namespace volpot::cli

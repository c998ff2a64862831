#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "volpot/density.hpp"
#include "volpot/geometry.hpp"
#include "volpot/types.hpp"

namespace volpot {

enum class ModulusKind { power, omega_theta, custom };

/// omega_theta(r) = r^theta |ln r| on (0, r_theta], constant beyond, with
/// r_theta = exp(-1/theta); omega_theta(0) = 0.
double omega_theta_eval(double theta, double r);

/// Result of sampling a modulus against the standing conditions: omega(0) = 0,
/// positive and nondecreasing, and sup omega(a t)/(a omega(t)) finite.
struct ModulusDiagnostics {
  double growth_ratio = 0.0;  // sampled sup of omega(a t)/(a omega(t)), a in [1, 100]
  std::vector<std::string> warnings;
};
ModulusDiagnostics check_modulus(const std::function<double(double)>& omega);

/// A modulus of continuity.
class Modulus {
 public:
  static Modulus power(double alpha);
  static Modulus omega_theta(double theta);
  /// Custom moduli are sampled against the standing conditions; violations
  /// are recorded in warnings() rather than rejected.
  static Modulus custom(std::function<double(double)> omega, std::string name = "custom");
  /// "power:<alpha>" or "omega:<theta>".
  static Modulus parse(const std::string& spec);

  double operator()(double r) const { return fn_(r); }
  ModulusKind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  Modulus(ModulusKind kind, double parameter, std::function<double(double)> fn, std::string name)
      : kind_(kind), parameter_(parameter), fn_(std::move(fn)), name_(std::move(name)) {}

  ModulusKind kind_;
  double parameter_;
  std::function<double(double)> fn_;
  std::string name_;
  std::vector<std::string> warnings_;
};

/// Pairs are restricted to separations in [min_separation, max_separation].
struct SeparationBand {
  double min_separation = 0.0;
  double max_separation = std::numeric_limits<double>::infinity();
};

/// max over distinct sample pairs of |f(x) - f(y)| / omega(|x - y|).
/// Throws InconsistentSampleError for a repeated point with differing values.
double holder_seminorm(std::span<const Point> points, std::span<const Complex> values,
                       const Modulus& omega, SeparationBand band = {});

/// Two sampled suprema bounding a kernel-class norm from below.
struct KernelClassNorm {
  double decay = 0.0;       // sup |x-y|^{s1} |K(x,y)|
  double regularity = 0.0;  // sup |x'-y|^{s2} / |x'-x''|^{s3} |K(x',y) - K(x'',y)|, |x'-y| >= 2|x'-x''|
  double total() const { return decay + regularity; }
};
KernelClassNorm kernel_class_norm(const std::function<Complex(const Point&, const Point&)>& K,
                                  std::span<const Point> X, std::span<const Point> Y, double s1,
                                  double s2, double s3);

/// Builds (f0, ..., fn) and computes norm_bound = sum_j (sup|f_j| + |f_j|_alpha)
/// on a fixed sample cloud of the closure of the domain.
NegativeExponentDensity make_negative_density(const Domain& domain, std::vector<Density> components,
                                              double alpha);

/// Sample cloud used for norm estimates: interior product-rule nodes and boundary nodes.
std::vector<Point> closure_samples(const Domain& domain, int N);

/// int_Omega f0 + int_{dOmega} sum_j nu_j f_j.
Complex integral_functional_I(const Domain& domain, const NegativeExponentDensity& nd, int N);

/// int_Omega f0 v + int_{dOmega} sum_j nu_j f_j v - sum_j int_Omega f_j d_j v.
Complex extension_pairing_E(const Domain& domain, const NegativeExponentDensity& nd,
                            const Density& v, int N);

/// int_Omega f v.
Complex canonical_pairing_J(const Domain& domain, const Density& f, const Density& v, int N);

/// Sample clouds as CSV rows x1,x2[,x3],value.
struct SampleCloud {
  std::vector<Point> points;
  std::vector<Complex> values;
};
SampleCloud read_samples_csv(const std::string& path, int n);
void write_samples_csv(const std::string& path, const SampleCloud& cloud);

}  // namespace volpot

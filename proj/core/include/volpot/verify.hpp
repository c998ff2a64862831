#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "volpot/density.hpp"
#include "volpot/fundsol.hpp"
#include "volpot/geometry.hpp"
#include "volpot/potentials.hpp"
#include "volpot/types.hpp"

namespace volpot {

enum class Comparison { le, ge, info };

struct Observation {
  std::string label;
  double value = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::le;

  bool pass() const;
};

/// Outcome of one verification check. pass() holds iff every observation
/// with a comparison lies within its tolerance. Runtime is reported but kept
/// out of the CSV so that reports are reproducible byte for byte.
struct VerificationReport {
  std::string name;
  std::string parameters;
  std::vector<Observation> observed;
  double runtime = 0.0;

  void expect_le(std::string label, double value, double tolerance);
  void expect_ge(std::string label, double value, double tolerance);
  void note(std::string label, double value);
  bool pass() const;
};

/// Columns: check,param,label,value,tolerance,pass
void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const VerificationReport& report);

/// Evaluates a field at a point; used where checks are agnostic of what is evaluated.
using FieldEvaluator = std::function<Complex(const Point&)>;

/// max over the grid of |P_fd[P_Omega f](x) - f(x)| / sup|f| for interior
/// points, and |P_fd[P_Omega f](x)| / sup|f| for exterior points.
/// Throws DomainError for grid points closer than 5h to the boundary.
VerificationReport check_pde_identity(const FundamentalSolution& fs, const OperatorCoefficients& op,
                                      const Domain& domain, const Density& f,
                                      std::span<const Point> grid, double h, int N, double tol);

/// Equally spaced boundary samples (2D) or a Fibonacci sphere lattice (3D).
std::vector<Point> boundary_samples(const Domain& domain, int count);

/// max over samples of |u+(y) - u-(y)| with each one-sided limit obtained by
/// quadratic extrapolation of u(y -+ delta nu) over the given offsets.
VerificationReport check_transmission(const std::string& name, const Domain& domain,
                                      const FieldEvaluator& u, std::span<const Point> samples,
                                      std::span<const double> offsets, double tol);

struct IntegrationByPartsOptions {
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  double tol = 1e-4;
  /// When set, |psi_j - expected| is checked against psi_tol.
  std::optional<double> psi_expected;
  /// When true, the kernel is weakly singular below order n-1 and |psi_j| <= psi_tol is checked.
  bool below_critical = false;
  double psi_tol = 1e-3;
};

/// Compares lim int_{Omega minus B(x,eps)} dK/dy_j phi dy with
///   -int K d_j phi + int_{dOmega} K phi nu_j + phi(x) psi_j,
/// where psi_j = lim eps^{n-1} int_{S} K(x, x - eps xi) xi_j dsigma(xi).
/// Both limits use two-point Richardson extrapolation on the last offsets.
VerificationReport check_integration_by_parts(const TwoPointKernel& K, const Domain& domain,
                                              const Density& phi, const Point& x, int j, int N,
                                              const IntegrationByPartsOptions& options);

struct MaximalBoundOptions {
  /// Relative variation over rho allowed for the sup (bounded case).
  double variation_tol = 0.1;
  /// Negative control: require growth of at least this much per decade of rho.
  std::optional<double> min_growth_per_decade;
};

/// Tabulates |int_{Omega minus B(x,rho)} k(x-y) dy| over x and rho for a
/// kernel homogeneous of degree -n. The variation of the sup over rho is
/// taken relative to max(sup, 1e-10 * sphere norm of k).
VerificationReport check_maximal_bound(const HomogeneousKernel& k, const Domain& domain,
                                       std::span<const Point> xs, std::span<const double> rhos, int N,
                                       const MaximalBoundOptions& options);

/// max over grid and j of |d_j P[phi] - (P[d_j phi] - v[nu_j phi])|.
VerificationReport check_derivative_recursion(const FundamentalSolution& fs, const Domain& domain,
                                              const Density& phi, std::span<const Point> grid,
                                              int N, double tol);

struct ModulusExperimentOptions {
  std::vector<double> scales{1e-4, 1e-3, 1e-2, 1e-1};
  /// Base points; pairs are (b, b + s d) for the directions below.
  std::vector<Point> bases;
  std::vector<Vector> directions;
  double max_ratio = 5.0;
  /// Seminorms below this are treated as zero.
  double floor = 1e-9;
  int N = 48;
};
/// Default base points straddle {y1 = 0}, the kink of |y1|.
ModulusExperimentOptions default_modulus_options(int n);

/// omega_1- and Lipschitz seminorms of each Hessian entry of P[f] per pair scale.
VerificationReport modulus_experiment(const FundamentalSolution& fs, const Domain& domain,
                                      const Density& f, double alpha,
                                      const ModulusExperimentOptions& options);

/// Observed convergence of one operation over increasing N.
/// Operations: volume_potential, volume_potential_gradient, single_layer_on_surface,
/// boundary_kernel_K.
VerificationReport convergence_study(const std::string& operation, const FundamentalSolution& fs,
                                     const Domain& domain, const Density& f,
                                     std::span<const int> Ns);

/// Sampled seminorm identities on random functions over random clouds in
/// [0,1]^n: the tail bound |f|_{omega, |x-y| >= a} <= 2 sup|f| / omega(a),
/// the orderings |f|_{omega_t} <= c |f|_{r^t} and
/// |f|_{r^t'} <= c' (|f|_{omega_t} + sup|f|) for t' < t with constants
/// fixed from t, t' and the cloud diameter, and monotonicity of the seminorm
/// under adding points. Ratios are reported against 1.
VerificationReport check_seminorm_machinery(int n, int functions, int points, std::uint64_t seed);

/// Errors below this (relative to max(1, |reference|)) are at the double precision floor.
inline constexpr double kPrecisionFloor = 1e-13;

}  // namespace volpot

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "volpot/density.hpp"
#include "volpot/fundsol.hpp"
#include "volpot/geometry.hpp"
#include "volpot/operators.hpp"
#include "volpot/verify.hpp"
#include "volpot_cli/config.hpp"

namespace volpot::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitError = 2;

/// One row of the default-tolerance table. Every entry can be overridden in
/// the configuration as <check>.<quantity> = value.
struct DefaultTolerance {
  const char* check;
  const char* quantity;
  const char* comparison;  // "<=" or ">="
  double value;
};
std::span<const DefaultTolerance> default_tolerances();

/// Default resolution N per check.
int default_resolution(const std::string& check);

/// Checks run by `verify` when verify.checks is absent.
const std::vector<std::string>& default_checks();

struct RunConfig {
  int dim = 2;
  std::string operator_kind = "laplace";  // laplace | modified_helmholtz | general; '-' reads as '_'
  double kappa = 1.0;
  std::vector<double> a2;  // row major, dim x dim
  std::vector<double> a1;
  Complex a0 = 0.0;
  std::string fundsol = "auto";  // auto | laplace | principal | modified_helmholtz

  std::string domain_kind = "ball";  // ball | ellipse | cosine_star (also spelled star)
  std::vector<double> center;
  double radius = 1.0;
  std::vector<double> axes;
  std::vector<double> coeffs;

  std::string density = "one";
  double density_k = 1.0;
  std::string density_path;

  std::vector<Point> eval_points;
  int eval_N = 64;
  bool eval_gradient = false;

  std::vector<std::string> checks;
  double fd_step = 1e-3;
  std::uint64_t seed = 20240601;
  std::map<std::string, std::map<std::string, double>> tolerances;
  std::map<std::string, int> resolutions;

  std::vector<std::string> operations{"volume_potential", "volume_potential_gradient",
                                      "single_layer_on_surface", "boundary_kernel_K"};
  std::vector<int> converge_N{8, 16, 32, 64};
  std::vector<int> converge_kernel_N{4, 8, 16, 32};

  std::string modulus_density = "abs_x1";
  double modulus_alpha = 1.0;
  std::vector<double> modulus_scales{1e-4, 1e-3, 1e-2, 1e-1};
  int modulus_N = 48;

  std::string output_dir = "results";

  double tolerance(const std::string& check, const std::string& quantity) const;
  int resolution(const std::string& check) const;
};

/// Validates keys and values; unknown keys, unknown presets, N < 4 and
/// non-positive tolerances are ConfigErrors.
RunConfig read_run_config(const Config& cfg);

/// The objects a configuration describes. Construction errors surface as volpot::Error.
struct Problem {
  OperatorCoefficients op;
  FundamentalSolution fs;
  Domain domain;
  Density f;
};
Problem build_problem(const RunConfig& rc);

/// Runs one named verify check.
VerificationReport run_check(const std::string& check, const RunConfig& rc, const Problem& p);

/// Reports of each subcommand, in configuration order; jobs > 1 runs
/// independent checks concurrently without changing the order.
std::vector<VerificationReport> run_verify(const RunConfig& rc, const Problem& p, int jobs);
std::vector<VerificationReport> run_converge(const RunConfig& rc, const Problem& p, int jobs);
std::vector<VerificationReport> run_modulus(const RunConfig& rc, const Problem& p);
std::vector<VerificationReport> run_eval(const RunConfig& rc, const Problem& p);

struct RunOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

/// Executes a subcommand (eval | verify | converge | modulus), writes
/// <out>/<subcommand>.csv and returns kExitPass, kExitCheckFailed or kExitError.
int run(const std::string& subcommand, const RunOptions& options, std::ostream& out,
        std::ostream& err);

/// Build information and the default-tolerance table.
void print_version(std::ostream& out);

}  // namespace volpot::cli

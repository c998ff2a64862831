#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "volpot/density.hpp"
#include "volpot/fundsol.hpp"
#include "volpot/geometry.hpp"
#include "volpot/types.hpp"

namespace volpot {

enum class Side { interior, exterior };

const char* to_string(Side side);

/// Kernel z -> k(z), positively homogeneous of the given degree, with its gradient.
struct HomogeneousKernel {
  int dim = 2;
  double degree = -1.0;
  std::function<double(const Point&)> value;
  std::function<Vector(const Point&)> gradient;
  std::string name;
};

/// k_{j,1} of a fundamental solution as a homogeneous kernel of degree -(n-1).
HomogeneousKernel gradient_kernel(const FundamentalSolution& fs, int j);

/// Sampled check that k is odd and homogeneous of degree -(n-1).
/// Throws DomainError naming the first violated property.
void require_odd_gradient_kernel(const HomogeneousKernel& k);

/// Two-point kernel K(x, y) with its gradient in y.
struct TwoPointKernel {
  std::function<Complex(const Point& x, const Point& y)> value;
  std::function<CVector(const Point& x, const Point& y)> grad_y;
  std::string name;
};

/// Integrand for boundary integrals: writes m values at (y, outward normal).
using BoundaryIntegrand = std::function<void(const Point& y, const Vector& normal, std::span<Complex>)>;

/// int_{dOmega} g(y) dsigma_y for x anywhere. Far from the boundary the
/// trapezoid (2D) or product sphere rule (3D) with resolution N is used; near
/// it the rule is adaptive about the closest boundary point; for x in the
/// boundary band the parameter is graded as t0 +- pi u^3 about x.
std::vector<Complex> boundary_integral(const Domain& domain, const Point& x, int N, int m,
                                       const BoundaryIntegrand& g);
Complex boundary_integral(const Domain& domain, const Point& x, int N,
                          const std::function<Complex(const Point&, const Vector&)>& g);

/// Volume rule suited to integrands singular at x: the polar rule about x
/// inside the domain and near it, the regular rule far outside. Rays are
/// clipped to support when given.
/// Throws NearBoundaryError for x in the boundary band.
VolumeQuadrature potential_rule(const Domain& domain, const Point& x, int N,
                                std::span<const Hyperplane> kinks = {},
                                const std::optional<Ball>& support = std::nullopt);

Complex volume_potential(const FundamentalSolution& fs, const Domain& domain, const Density& f,
                         const Point& x, int N);

CVector volume_potential_gradient(const FundamentalSolution& fs, const Domain& domain,
                                  const Density& f, const Point& x, int N);

/// int_Omega d_l k(x-y) (psi(y) - psi(x)) dy, l 0-based.
Complex subtracted_integral_G(const HomogeneousKernel& k, const Density& psi, int l,
                              const Domain& domain, const Point& x, int N);

/// int_{dOmega} k(x-y) mu(y) dsigma_y for x strictly on the given side.
Complex boundary_kernel_K(const HomogeneousKernel& k, const BoundaryDensity& mu,
                          const Domain& domain, const Point& x, Side side, int N);

/// Second derivatives of the volume potential at an interior point, entry
/// (l, j) = d_l d_j P[f](x), through the splitting
///   G_l[k_{j,1}, Ef](x) - Ef(x) K[k_{j,1}, nu_l](x) + int d_l k_{j,2}(x-y) f(y) dy.
CMatrix volume_potential_hessian(const FundamentalSolution& fs, const Domain& domain,
                                 const Density& f, const Point& x, int N);

/// int_{dOmega} S(x-y) phi(y) dsigma_y; defined for every x.
Complex single_layer(const FundamentalSolution& fs, const Domain& domain,
                     const BoundaryDensity& phi, const Point& x, int N);

/// Potential of f0 + sum_j d_j f_j:
///   int S f0 + sum_j int_{dOmega} S nu_j f_j + sum_j d_j int S f_j.
Complex volume_potential_negative(const FundamentalSolution& fs, const Domain& domain,
                                  const NegativeExponentDensity& nd, const Point& x, int N);

/// A compactly supported functional given by point masses.
struct DiscreteFunctional {
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::vector<Complex> values;
};

/// sum_i w_i v_i S(x - y_i). The support hull is taken as the smallest ball
/// about the node centroid containing all nodes; x must lie at least 1e-6
/// outside it.
Complex exterior_field(const FundamentalSolution& fs, const DiscreteFunctional& tau,
                       const Point& x);

/// Volume potential restricted to one side of the boundary.
class PotentialField {
 public:
  PotentialField(FundamentalSolution fs, Domain domain, Side side, int N);

  Side side() const { return side_; }
  int resolution() const { return n_; }
  const Domain& domain() const { return domain_; }
  const FundamentalSolution& fundamental_solution() const { return fs_; }

  /// Throws DomainError when x lies on the other side.
  Complex value(const Density& f, const Point& x) const;
  CVector gradient(const Density& f, const Point& x) const;
  Complex value(const NegativeExponentDensity& nd, const Point& x) const;

 private:
  void check_side(const Point& x) const;

  FundamentalSolution fs_;
  Domain domain_;
  Side side_;
  int n_;
};

}  // namespace volpot

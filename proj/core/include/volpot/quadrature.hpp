#pragma once

#include <functional>
#include <span>
#include <vector>

namespace volpot::quad {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes on [-1, 1]. Rules are computed once per
/// order and cached; the returned reference stays valid for the program run.
const Rule1D& gauss_legendre(int n);

/// Maps a [-1,1] rule onto [a,b] and appends to out.
void append_mapped(const Rule1D& rule, double a, double b, std::vector<double>& nodes,
                   std::vector<double>& weights);

/// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
struct KronrodPair {
  std::span<const double> kronrod_nodes;    // 15 nodes, ascending
  std::span<const double> kronrod_weights;  // 15 weights
  std::span<const double> gauss_weights;    // weights for the odd-indexed nodes
};
const KronrodPair& gauss_kronrod_15();

/// A panel [a, b] in an adaptive partition.
struct Panel {
  double a;
  double b;
};

/// Adaptive bisection of [a, b] driven by the Gauss/Kronrod discrepancy of a
/// vector-valued proxy function. Returns the accepted panels in order.
/// Breakpoints inside (a, b) are honored as initial panel boundaries.
/// A panel is accepted when every proxy component satisfies
///   |K15 - G7| <= tol * (b - a) / (b0 - a0)
/// or when its width drops below min_width.
std::vector<Panel> adaptive_partition(
    const std::function<void(double, std::span<double>)>& proxy, int proxy_size, double a,
    double b, std::span<const double> breakpoints, int initial_panels, double tol,
    double min_width);

/// Adaptive Gauss-Kronrod integration of an m-component real function.
/// Bisects the panel with the largest discrepancy until the summed
/// discrepancy is below max(abs_tol, rel_tol * sum of integrals of |f_c|),
/// or the panel budget runs out.
std::vector<double> integrate_adaptive_vec(const std::function<void(double, std::span<double>)>& f,
                                           int m, double a, double b,
                                           std::span<const double> breakpoints, double abs_tol,
                                           double rel_tol, int max_depth = 48);

}  // namespace volpot::quad

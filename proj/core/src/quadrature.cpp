#include "volpot/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <queue>

#include "volpot/types.hpp"

namespace volpot::quad {

namespace {

Rule1D compute_gauss_legendre(int n) {
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

constexpr std::array<double, 15> kKronrodNodes = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

constexpr std::array<double, 15> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

// Gauss weights at Kronrod indices 1, 3, ..., 13.
constexpr std::array<double, 7> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

std::vector<double> initial_cuts(double a, double b, std::span<const double> breakpoints,
                                 int initial_panels) {
  std::vector<double> cuts;
  const int m = std::max(1, initial_panels);
  for (int i = 0; i <= m; ++i) cuts.push_back(a + (b - a) * i / m);
  for (double bp : breakpoints) {
    if (bp > a && bp < b) cuts.push_back(bp);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double u, double v) { return std::abs(u - v) <= 1e-15 * (b - a); }),
             cuts.end());
  return cuts;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule1D>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<Rule1D>(compute_gauss_legendre(n))).first;
  }
  return *it->second;
}

void append_mapped(const Rule1D& rule, double a, double b, std::vector<double>& nodes,
                   std::vector<double>& weights) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    nodes.push_back(mid + half * rule.nodes[i]);
    weights.push_back(half * rule.weights[i]);
  }
}

const KronrodPair& gauss_kronrod_15() {
  static const KronrodPair pair{kKronrodNodes, kKronrodWeights, kGaussWeights};
  return pair;
}

constexpr double kHuge = std::numeric_limits<double>::max();
constexpr double kNoiseRate = 1e-8;

std::vector<Panel> adaptive_partition(
    const std::function<void(double, std::span<double>)>& proxy, int proxy_size, double a,
    double b, std::span<const double> breakpoints, int initial_panels, double tol,
    double min_width) {
  const double total = b - a;
  std::vector<double> values(static_cast<std::size_t>(15 * proxy_size));
  std::vector<Panel> accepted;

  // rate = max |K - G| over components, i.e. error per unit width. A rate
  // that stops shrinking under bisection while already tiny is rounding noise.
  std::function<void(double, double, double)> refine = [&](double lo, double hi,
                                                           double parent_rate) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < 15; ++i) {
      proxy(mid + half * kKronrodNodes[i],
            std::span<double>(values.data() + static_cast<std::size_t>(i * proxy_size),
                              static_cast<std::size_t>(proxy_size)));
    }
    bool ok = true;
    double rate = 0.0;
    for (int c = 0; c < proxy_size; ++c) {
      double kr = 0.0;
      double ga = 0.0;
      for (int i = 0; i < 15; ++i) kr += kKronrodWeights[i] * values[i * proxy_size + c];
      for (int i = 0; i < 7; ++i) ga += kGaussWeights[i] * values[(2 * i + 1) * proxy_size + c];
      const double diff = std::abs(kr - ga);
      if (!(diff * half <= tol * (hi - lo) / total)) ok = false;
      rate = std::max(rate, std::isfinite(diff) ? diff : kHuge);
    }
    const bool stagnant = rate > 0.7 * parent_rate && rate <= kNoiseRate;
    if (ok || stagnant || (hi - lo) < min_width) {
      accepted.push_back({lo, hi});
      return;
    }
    refine(lo, mid, rate);
    refine(mid, hi, rate);
  };

  const auto cuts = initial_cuts(a, b, breakpoints, initial_panels);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) refine(cuts[i], cuts[i + 1], kHuge);
  return accepted;
}

std::vector<double> integrate_adaptive_vec(const std::function<void(double, std::span<double>)>& f,
                                           int m, double a, double b,
                                           std::span<const double> breakpoints, double abs_tol,
                                           double rel_tol, int max_depth) {
  const auto size = static_cast<std::size_t>(m);
  std::vector<double> result(size, 0.0);
  const double total = b - a;
  if (total == 0.0) return result;
  std::vector<double> buf(size);

  struct Piece {
    double lo, hi;
    int depth;
    double err;
    std::vector<double> value;
  };
  // Kronrod values, plus the discrepancy against Gauss and the integral of |f|.
  double abs_total = 0.0;
  auto estimate = [&](double lo, double hi, int depth) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    Piece p{lo, hi, depth, 0.0, std::vector<double>(size, 0.0)};
    std::vector<double> gauss(size, 0.0);
    for (int i = 0; i < 15; ++i) {
      std::fill(buf.begin(), buf.end(), 0.0);
      f(mid + half * kKronrodNodes[i], buf);
      for (std::size_t c = 0; c < size; ++c) {
        p.value[c] += kKronrodWeights[i] * buf[c];
        if (i % 2 == 1) gauss[c] += kGaussWeights[i / 2] * buf[c];
        if (depth == 0) abs_total += half * kKronrodWeights[i] * std::abs(buf[c]);
      }
    }
    for (std::size_t c = 0; c < size; ++c) {
      p.value[c] *= half;
      const double d = std::abs(p.value[c] - half * gauss[c]);
      p.err = std::max(p.err, std::isfinite(d) ? d : kHuge);
    }
    return p;
  };

  auto cmp = [](const Piece& l, const Piece& r) { return l.err < r.err; };
  std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> queue(cmp);
  std::vector<Piece> done;
  double err_sum = 0.0;
  const auto cuts = initial_cuts(a, b, breakpoints, 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto p = estimate(cuts[i], cuts[i + 1], 0);
    err_sum += p.err;
    queue.push(std::move(p));
  }
  const double tol = std::max(abs_tol, rel_tol * abs_total);
  constexpr std::size_t kMaxPieces = 8192;
  while (!queue.empty() && err_sum > tol && queue.size() + done.size() < kMaxPieces) {
    Piece p = queue.top();
    queue.pop();
    if (p.depth >= max_depth) {
      done.push_back(std::move(p));
      continue;
    }
    const double mid = 0.5 * (p.lo + p.hi);
    auto left = estimate(p.lo, mid, p.depth + 1);
    auto right = estimate(mid, p.hi, p.depth + 1);
    err_sum += left.err + right.err - p.err;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }
  for (; !queue.empty(); queue.pop()) done.push_back(queue.top());
  for (const auto& p : done) {
    for (std::size_t c = 0; c < size; ++c) result[c] += p.value[c];
  }
  return result;
}

}  // namespace volpot::quad

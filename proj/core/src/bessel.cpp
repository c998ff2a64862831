#include "volpot/bessel.hpp"

#include <cmath>
#include <limits>

#include "volpot/types.hpp"

namespace volpot::bessel {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr int kMaxSeriesTerms = 200;

void require_positive(double x) {
  if (!(x > 0.0)) throw SingularPointError("modified Bessel K requires x > 0");
}

// sum_{k>=1} H_k q^k / (k!)^2 with q = x^2/4
double k0_series_tail(double q) {
  double term = 1.0;  // q^k/(k!)^2
  double harmonic = 0.0;
  double sum = 0.0;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    const double add = harmonic * term;
    sum += add;
    if (add < 1e-17 * sum) break;
  }
  return sum;
}

// sum_{k>=0} (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
double k1_series_sum(double q) {
  double term = 1.0;      // q^k/(k!(k+1)!)
  double psi1 = -kEulerGamma;       // psi(k+1)
  double psi2 = 1.0 - kEulerGamma;  // psi(k+2)
  double sum = (psi1 + psi2) * term;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    psi1 += 1.0 / k;
    psi2 += 1.0 / (k + 1);
    const double add = (psi1 + psi2) * term;
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// exp(x) * int_0^inf exp(-x cosh t) cosh(nu t) dt for nu in {0, 1}.
double k_scaled_integral(double x, int nu) {
  constexpr double h = 0.125;
  double sum = 0.5;  // t = 0: exp(-x (cosh 0 - 1)) * cosh(0)
  for (int i = 1; i < 4000; ++i) {
    const double t = i * h;
    const double s = std::sinh(0.5 * t);
    const double decay = std::exp(-2.0 * x * s * s);  // exp(-x (cosh t - 1))
    const double term = nu == 0 ? decay : decay * std::cosh(t);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return h * sum;
}

}  // namespace

double i0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double i1(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return 0.5 * x * sum;
}

double k0(double x) {
  require_positive(x);
  if (x <= kSeriesLimit) {
    const double q = 0.25 * x * x;
    return -(std::log(0.5 * x) + kEulerGamma) * i0(x) + k0_series_tail(q);
  }
  return std::exp(-x) * k_scaled_integral(x, 0);
}

double k1(double x) {
  require_positive(x);
  if (x <= kSeriesLimit) {
    const double q = 0.25 * x * x;
    return 1.0 / x + std::log(0.5 * x) * i1(x) - 0.25 * x * k1_series_sum(q);
  }
  return std::exp(-x) * k_scaled_integral(x, 1);
}

double x_k1_minus_one(double x) {
  require_positive(x);
  if (x <= kSeriesLimit) {
    const double q = 0.25 * x * x;
    return x * std::log(0.5 * x) * i1(x) - q * k1_series_sum(q);
  }
  return x * k1(x) - 1.0;
}

}  // namespace volpot::bessel

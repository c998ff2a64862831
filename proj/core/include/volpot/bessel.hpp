#pragma once

namespace volpot::bessel {

// Modified Bessel functions of integer order 0 and 1 for real x > 0.
//
// I0, I1 use their power series. K0, K1 use the logarithmic power series for
// x <= kSeriesLimit and, above it, the integral representation
//   K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
// evaluated with the trapezoidal rule, which converges geometrically because
// the integrand is entire and decays doubly exponentially.

inline constexpr double kSeriesLimit = 2.0;

double i0(double x);
double i1(double x);
double k0(double x);
double k1(double x);

/// x*K1(x) - 1 without cancellation for small x.
double x_k1_minus_one(double x);

}  // namespace volpot::bessel

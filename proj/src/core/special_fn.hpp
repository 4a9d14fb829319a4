#pragma once

// Scalar kernels: the Gaussian tail function phi, the two-barrier reflection
// series and the first-exit-time density. Everything here is a pure function
// of its arguments and safe to call concurrently.

#include "core/errors.hpp"

namespace gcap {

struct SeriesConfig {
    double tol = 1e-12;        // absolute truncation tolerance
    long max_terms = 1000000;  // cap on the symmetric index window
    void validate() const;
};

// phi(x) = 2/sqrt(2 pi) * int_x^inf exp(-r^2/2) dr, strictly decreasing,
// phi(-inf) = 2, phi(0) = 1, phi(inf) = 0. Input must be finite.
double phi(double x);

// phi'(x) = -sqrt(2/pi) exp(-x^2/2)  (<= 0 everywhere)
double phi_prime(double x);

// phi''(x) = x*sqrt(2/pi) exp(-x^2/2) = -x*phi'(x)
double phi_second(double x);

struct SeriesResult {
    double value;
    long terms; // largest |i| included in the symmetric partial sum
};

// P(first exit of sigma_bar*W from (b,l) by time t | W_0 = x), b < x < l.
// Reflection series truncated at the smallest I with both the current term
// pair and the Gaussian remainder bound below cfg.tol. The value is clamped
// to [0,1] when the overshoot is below cfg.tol; a larger overshoot raises
// NumericalError. Hitting the cap raises ConvergenceError.
SeriesResult exit_probability_series(double x, double b, double l, double t,
                                     double sigma_bar,
                                     const SeriesConfig &cfg = {});

// Worst-case probability of {B_T in {b,l}} under sigma_under = 0; equals the
// exit series started at x = 0. The i = 0 pair enters with sign +1
// (sgn(0) = +1 by convention, and that pair dominates the sum).
SeriesResult two_barrier_series(double b, double l, double t, double sigma_bar,
                                const SeriesConfig &cfg = {});

// Density at time s > 0 of the first exit time of sigma_bar*W from (b,l),
// started at x in (b,l). Truncated under the same discipline as the series.
double hitting_density(double s, double x, double b, double l,
                       double sigma_bar, const SeriesConfig &cfg = {});

} // namespace gcap

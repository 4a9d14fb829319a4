#pragma once

// Monte Carlo over the representation family of controlled martingales
// X_t = int_0^t v_s dW_s with v_s in [sigma_under, sigma_bar]. Two built-in
// strategies: constant volatility (terminal law sampled exactly) and the
// bang-bang barrier strategy (v = sigma_bar until the exit of (b,l), then 0)
// whose hitting probability attains the two-point capacity.

#include <cstdint>
#include <functional>
#include <string>

#include "core/capacity.hpp"

namespace gcap {

struct McConfig {
    long n_paths = 100000;
    double dt = 1e-3;
    std::uint64_t seed = 0;
    bool bridge_correction = true;
    int n_threads = 0; // 0: auto

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample std / sqrt(n_paths)
    long n_paths = 0;
    bool coarse_dt_warning = false;
};

struct Strategy {
    enum class Kind { constant, bang_bang_barrier };
    Kind kind = Kind::constant;
    double sigma = 0.0; // constant
    double b = 0.0, l = 0.0; // bang-bang barriers, b < 0 < l

    static Strategy constant(double sigma);
    static Strategy bang_bang(double b, double l);
    void validate(const CapacityParams &p) const;
};

// P(first exit of sigma_bar*W from (b,l) <= T) by Euler stepping with
// per-step barrier checks; with bridge_correction on, surviving steps also
// register a crossing with the one-sided Brownian-bridge probability.
// Bit-identical results for identical (config, parameters), independent of
// thread count. Sets coarse_dt_warning when dt > (min(|b|,l)/sigma_bar)^2/100.
McEstimate simulate_hitting_probability(double b, double l,
                                        const CapacityParams &p,
                                        const McConfig &cfg);

// E[payoff(X_T)] under the given strategy. Constant strategies sample the
// exact Gaussian terminal law (no Euler error); sigma = 0 returns payoff(0)
// with zero standard error. Bang-bang paths freeze exactly at the barrier.
McEstimate simulate_payoff(const Strategy &strategy,
                           const std::function<double(double)> &payoff,
                           double horizon, const CapacityParams &p,
                           const McConfig &cfg);

std::string mc_record_json(const McEstimate &e, const McConfig &cfg,
                           const Strategy &strategy);

} // namespace gcap

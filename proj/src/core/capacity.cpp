#include "core/capacity.hpp"

#include <cmath>

namespace gcap {

void CapacityParams::validate() const {
    if (!std::isfinite(sigma_bar) || !(sigma_bar > 0.0))
        throw ValidationError("sigma_bar must be > 0");
    if (!std::isfinite(sigma_under) || sigma_under < 0.0 ||
        sigma_under > sigma_bar)
        throw ValidationError("sigma_under must lie in [0, sigma_bar]");
    if (!std::isfinite(horizon) || !(horizon > 0.0))
        throw ValidationError("horizon T must be > 0");
    series.validate();
}

void CapacityParams::require_degenerate() const {
    if (sigma_under != 0.0)
        throw UnsupportedError(
            "closed-form capacity requires sigma_under = 0");
}

CapacityResult capacity_of(const BorelSetSpec &spec, const CapacityParams &p) {
    p.validate();
    p.require_degenerate();

    CapacityResult r;
    r.cls = classify(spec);
    switch (r.cls.case_tag) {
    case SetCase::empty:
        // c(emptyset) = sup_P P(emptyset) = 0; flagged, not an error.
        r.value = 0.0;
        r.empty_set = true;
        return r;
    case SetCase::full_if_rho_zero:
        r.value = 1.0;
        return r;
    case SetCase::one_sided:
        r.value = phi(r.cls.rho / (p.sigma_bar * std::sqrt(p.horizon)));
        return r;
    case SetCase::two_sided: {
        // Every two-sided set routes through the two-point formula:
        // c({B_T in A}) = c({B_T in {-rho_minus, rho_plus}}).
        const SeriesResult sr = two_barrier_series(
            -r.cls.rho_minus, r.cls.rho_plus, p.horizon, p.sigma_bar, p.series);
        r.value = sr.value;
        r.series_terms = sr.terms;
        return r;
    }
    }
    throw Error(ErrorCode::internal, "unreachable set case");
}

double u_n(long n, double t, double x, double b, double l,
           const CapacityParams &p) {
    p.validate();
    p.require_degenerate();
    if (n < 1)
        throw ValidationError("u_n: n must be >= 1");
    if (!std::isfinite(t) || t < 0.0)
        throw ValidationError("u_n: t must be >= 0");
    if (!std::isfinite(x))
        throw ValidationError("u_n: x must be finite");
    if (!std::isfinite(b) || !std::isfinite(l) || b >= 0.0 || l <= 0.0)
        throw ValidationError("u_n: barriers must satisfy b < 0 < l");

    const double tau = 1.0 / static_cast<double>(n) + t;
    if (x > b && x < l)
        return exit_probability_series(x, b, l, tau, p.sigma_bar, p.series)
            .value;
    const double dist = std::min(std::abs(b - x), std::abs(l - x));
    return phi(dist / (p.sigma_bar * std::sqrt(tau)));
}

double capacity_point(double a, const CapacityParams &p) {
    p.validate();
    p.require_degenerate();
    if (!std::isfinite(a))
        throw ValidationError("capacity_point: a must be finite");
    return phi(std::abs(a) / (p.sigma_bar * std::sqrt(p.horizon)));
}

double capacity_ray(double a, RayDir dir, const CapacityParams &p) {
    (void)dir; // c({B_T >= |a|}) = c({B_T <= -|a|}) = c({B_T = a})
    return capacity_point(a, p);
}

} // namespace gcap

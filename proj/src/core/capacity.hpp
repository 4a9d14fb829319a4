#pragma once

// Closed-form capacities c({B_T in A}) in the degenerate regime
// sigma_under = 0, by the trichotomy on rho(A), rho(A+), rho(A-):
//   rho = 0      -> 1
//   one-sided    -> phi(rho / (sigma_bar sqrt(T)))
//   two-sided    -> two-barrier series at (-rho_minus, rho_plus)
// plus the explicit solutions u_n whose n->inf limit at (T,0) is the
// two-point capacity.

#include "core/borel_set.hpp"
#include "core/special_fn.hpp"

namespace gcap {

struct CapacityParams {
    double sigma_bar = 1.0;
    double sigma_under = 0.0;
    double horizon = 1.0; // T
    SeriesConfig series{};

    void validate() const;
    // Closed-form capacity operations exist only for sigma_under = 0.
    void require_degenerate() const;
};

struct CapacityResult {
    double value = 0.0;
    SetClassification cls{};
    long series_terms = 0; // 0 unless the two-sided series was used
    bool empty_set = false;
};

CapacityResult capacity_of(const BorelSetSpec &spec, const CapacityParams &p);

// u_n(t,x) for n >= 1, b < 0 < l: the exit series at effective time 1/n + t
// on (b,l), and phi(min distance / (sigma_bar sqrt(1/n + t))) outside.
double u_n(long n, double t, double x, double b, double l,
           const CapacityParams &p);

// c({B_T = a}) = c({B_T >= |a|}) = c({B_T <= -|a|}) = phi(|a|/(sigma sqrt T))
double capacity_point(double a, const CapacityParams &p);

enum class RayDir { ge, le };
double capacity_ray(double a, RayDir dir, const CapacityParams &p);

} // namespace gcap

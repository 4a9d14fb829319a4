#pragma once

// Explicit monotone finite differences for the fully nonlinear heat equation
//   d_t u = G(d_xx u),  G(a) = (sigma_bar^2 a+ - sigma_under^2 a-) / 2,
// and the two-step evaluator for payoffs of finitely many increments.
// The scheme is monotone under the CFL bound dt <= dx^2 / sigma_bar^2, which
// is what drives convergence to the viscosity solution.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "core/capacity.hpp"

namespace gcap {

enum class BoundaryMode { dirichlet_initial, dirichlet_fixed };

struct GridConfig {
    double x_min = -8.0, x_max = 8.0; // must straddle 0
    double dx = 5e-3;
    double dt = 0.0; // 0: auto = 0.8 * dx^2 / sigma_bar^2
    BoundaryMode boundary = BoundaryMode::dirichlet_initial;
    double boundary_left = 0.0, boundary_right = 0.0;
    long snapshot_stride = 0; // 0: auto (~256 stored levels); <0: ends only

    std::size_t n_nodes() const;
    std::vector<double> axis() const;
    double resolve_dt(double sigma_bar) const;
    void validate(double sigma_bar) const;
};

struct GridSolution {
    GridConfig config;
    std::vector<double> times;                // stored levels, times[0] = 0
    std::vector<std::vector<double>> values;  // values[k][j] = u(t_k, x_j)

    double value_at(std::size_t level, double x) const; // linear interp in x
    double final_at(double x) const;
    void write_csv(std::ostream &os) const; // "t,x,u" rows
    std::string summary_json() const;       // u at x = 0 per stored level
};

// Steps sampled initial data to `horizon` (dt is shrunk so that horizon is an
// integer number of steps). Throws NumericalError if the iteration leaves the
// finite range mid-run.
GridSolution solve(std::span<const double> initial, double horizon,
                   const CapacityParams &p, const GridConfig &g);
GridSolution solve(const std::function<double(double)> &initial,
                   double horizon, const CapacityParams &p,
                   const GridConfig &g);

// E^[payoff(B_t - B_s)] = u(t - s, 0)
double g_expectation_1step(const std::function<double(double)> &payoff,
                           double s, double t, const CapacityParams &p,
                           const GridConfig &g);

struct PayoffSpec {
    std::vector<double> time_points; // 0 < t_1 < ... < t_n
    std::function<double(std::span<const double>)> fn; // n increments
    double lip_bound = 0.0;
    double sup_bound = 0.0;
};

// Backward recursion: phi_{k-1}(x_1..x_{k-1}) = E^[phi_k(x_1.., increment)],
// one 1-d solve per conditioning node, conditioning grid = solver grid.
// Supports n <= 3; declared bounds are spot-checked on sampled arguments.
double g_expectation_multistep(const PayoffSpec &spec, const CapacityParams &p,
                               const GridConfig &g);

struct ResidualRegion {
    double t0, t1, x0, x1;
    std::size_t nt = 21, nx = 41;
};

// Max of |d_t u - G(d_xx u)| over the sampled region, central differences of
// step h. exclude_x lists kink lines that must stay at least 2h away.
double residual_check(const std::function<double(double, double)> &u,
                      const ResidualRegion &region, const CapacityParams &p,
                      double h = 1e-3, std::span<const double> exclude_x = {});

} // namespace gcap

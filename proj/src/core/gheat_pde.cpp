#include "core/gheat_pde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "core/parallel.hpp"

namespace gcap {

std::size_t GridConfig::n_nodes() const {
    return static_cast<std::size_t>(std::llround((x_max - x_min) / dx)) + 1;
}

std::vector<double> GridConfig::axis() const {
    const std::size_t n = n_nodes();
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j)
        xs[j] = x_min + static_cast<double>(j) * dx;
    return xs;
}

double GridConfig::resolve_dt(double sigma_bar) const {
    if (dt > 0.0)
        return dt;
    return 0.8 * dx * dx / (sigma_bar * sigma_bar);
}

void GridConfig::validate(double sigma_bar) const {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) ||
        !(x_min < 0.0 && 0.0 < x_max))
        throw ValidationError("grid must satisfy x_min < 0 < x_max");
    if (!std::isfinite(dx) || !(dx > 0.0))
        throw ValidationError("grid dx must be > 0");
    if (n_nodes() < 3)
        throw ValidationError("grid needs at least 3 nodes");
    const double dt_eff = resolve_dt(sigma_bar);
    if (!std::isfinite(dt_eff) || !(dt_eff > 0.0))
        throw ValidationError("grid dt must be > 0");
    // explicit-scheme monotonicity (CFL): dt <= dx^2 / sigma_bar^2
    if (dt_eff > dx * dx / (sigma_bar * sigma_bar) * (1.0 + 1e-12))
        throw ValidationError("CFL violated: need dt <= dx^2 / sigma_bar^2");
    if (boundary != BoundaryMode::dirichlet_initial &&
        boundary != BoundaryMode::dirichlet_fixed)
        throw ValidationError("unknown boundary mode");
}

double GridSolution::value_at(std::size_t level, double x) const {
    if (level >= values.size())
        throw ValidationError("solution level out of range");
    if (!(x >= config.x_min && x <= config.x_max))
        throw ValidationError("x outside the grid");
    const auto &u = values[level];
    const double pos = (x - config.x_min) / config.dx;
    const auto j = static_cast<std::size_t>(pos);
    if (j + 1 >= u.size())
        return u.back();
    const double w = pos - static_cast<double>(j);
    if (w < 1e-12)
        return u[j];
    return (1.0 - w) * u[j] + w * u[j + 1];
}

double GridSolution::final_at(double x) const {
    return value_at(values.size() - 1, x);
}

void GridSolution::write_csv(std::ostream &os) const {
    os << "t,x,u\n";
    const auto xs = config.axis();
    for (std::size_t k = 0; k < times.size(); ++k)
        for (std::size_t j = 0; j < xs.size(); ++j)
            os << times[k] << ',' << xs[j] << ',' << values[k][j] << '\n';
}

std::string GridSolution::summary_json() const {
    nlohmann::json j;
    j["x_min"] = config.x_min;
    j["x_max"] = config.x_max;
    j["dx"] = config.dx;
    j["times"] = times;
    auto &u0 = j["u_at_zero"] = nlohmann::json::array();
    for (std::size_t k = 0; k < values.size(); ++k)
        u0.push_back(value_at(k, 0.0));
    return j.dump();
}

GridSolution solve(std::span<const double> initial, double horizon,
                   const CapacityParams &p, const GridConfig &g) {
    p.validate();
    g.validate(p.sigma_bar);
    const std::size_t n = g.n_nodes();
    if (initial.size() != n)
        throw ValidationError("initial data size does not match the grid");
    for (double v : initial)
        if (!std::isfinite(v))
            throw ValidationError("initial data must be finite");
    if (!std::isfinite(horizon) || !(horizon > 0.0))
        throw ValidationError("horizon must be > 0");

    const double dt_req = g.resolve_dt(p.sigma_bar);
    const auto steps = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(std::ceil(horizon / dt_req - 1e-9))));
    const double dt = horizon / static_cast<double>(steps);

    std::size_t stride;
    if (g.snapshot_stride > 0)
        stride = static_cast<std::size_t>(g.snapshot_stride);
    else if (g.snapshot_stride < 0)
        stride = steps + 1; // ends only
    else
        stride = std::max<std::size_t>(1, steps / 256);

    const double cp = 0.5 * p.sigma_bar * p.sigma_bar * dt / (g.dx * g.dx);
    const double cm = 0.5 * p.sigma_under * p.sigma_under * dt / (g.dx * g.dx);

    std::vector<double> u(initial.begin(), initial.end());
    std::vector<double> un(n);
    if (g.boundary == BoundaryMode::dirichlet_fixed) {
        u.front() = g.boundary_left;
        u.back() = g.boundary_right;
    }
    un.front() = u.front();
    un.back() = u.back();

    GridSolution sol;
    sol.config = g;
    sol.times.push_back(0.0);
    sol.values.push_back(u);

    for (std::size_t k = 1; k <= steps; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const double d2 = u[j - 1] - 2.0 * u[j] + u[j + 1];
            const double w = u[j] + cp * std::max(d2, 0.0) +
                             cm * std::min(d2, 0.0);
            un[j] = w;
            acc += w;
        }
        if (!std::isfinite(acc))
            throw NumericalError("solve: non-finite values at step " +
                                 std::to_string(k));
        u.swap(un);
        if (k % stride == 0 || k == steps) {
            sol.times.push_back(static_cast<double>(k) * dt);
            sol.values.push_back(u);
        }
    }
    return sol;
}

GridSolution solve(const std::function<double(double)> &initial,
                   double horizon, const CapacityParams &p,
                   const GridConfig &g) {
    g.validate(p.sigma_bar);
    const auto xs = g.axis();
    std::vector<double> u0(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j)
        u0[j] = initial(xs[j]);
    return solve(std::span<const double>(u0), horizon, p, g);
}

namespace {

// Final value at x = 0 without keeping snapshots.
double solve_value_at_zero(std::span<const double> initial, double horizon,
                           const CapacityParams &p, const GridConfig &g) {
    GridConfig lean = g;
    lean.snapshot_stride = -1;
    return solve(initial, horizon, p, lean).final_at(0.0);
}

} // namespace

double g_expectation_1step(const std::function<double(double)> &payoff,
                           double s, double t, const CapacityParams &p,
                           const GridConfig &g) {
    if (!std::isfinite(s) || !std::isfinite(t) || !(s < t))
        throw ValidationError("g_expectation_1step needs s < t");
    if (s < 0.0)
        throw ValidationError("g_expectation_1step needs s >= 0");
    g.validate(p.sigma_bar);
    const auto xs = g.axis();
    std::vector<double> u0(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j)
        u0[j] = payoff(xs[j]);
    return solve_value_at_zero(u0, t - s, p, g);
}

namespace {

void spot_check_bounds(const PayoffSpec &spec, const GridConfig &g) {
    if (!(spec.sup_bound >= 0.0) || !std::isfinite(spec.sup_bound))
        throw ValidationError("payoff sup_bound must be finite and >= 0");
    if (!(spec.lip_bound >= 0.0) || !std::isfinite(spec.lip_bound))
        throw ValidationError("payoff lip_bound must be finite and >= 0");
    const std::size_t n = spec.time_points.size();
    // deterministic low-discrepancy-ish probe points over the grid box
    const double span = g.x_max - g.x_min;
    std::vector<double> a(n), b(n);
    for (int probe = 0; probe < 24; ++probe) {
        for (std::size_t d = 0; d < n; ++d) {
            const double fa = std::fmod(0.137 + 0.61803398875 * (probe + 1) *
                                                    static_cast<double>(d + 1),
                                        1.0);
            const double fb = std::fmod(0.459 + 0.75487766625 * (probe + 1) *
                                                    static_cast<double>(d + 1),
                                        1.0);
            a[d] = g.x_min + fa * span;
            b[d] = g.x_min + fb * span;
        }
        const double va = spec.fn(a), vb = spec.fn(b);
        if (!std::isfinite(va) || !std::isfinite(vb))
            throw ValidationError("payoff returned a non-finite value");
        if (std::abs(va) > spec.sup_bound * (1.0 + 1e-9) + 1e-12 ||
            std::abs(vb) > spec.sup_bound * (1.0 + 1e-9) + 1e-12)
            throw ValidationError("payoff violates its declared sup bound");
        double dist = 0.0;
        for (std::size_t d = 0; d < n; ++d)
            dist += std::abs(a[d] - b[d]);
        if (std::abs(va - vb) > spec.lip_bound * dist * (1.0 + 1e-9) + 1e-12)
            throw ValidationError("payoff violates its declared Lipschitz bound");
    }
}

} // namespace

double g_expectation_multistep(const PayoffSpec &spec, const CapacityParams &p,
                               const GridConfig &g) {
    p.validate();
    g.validate(p.sigma_bar);
    const std::size_t n = spec.time_points.size();
    if (n < 1)
        throw ValidationError("payoff needs at least one time point");
    if (n > 3)
        throw UnsupportedError("multistep supports at most 3 time points");
    if (!spec.fn)
        throw ValidationError("payoff function is empty");
    double prev = 0.0;
    for (double t : spec.time_points) {
        if (!std::isfinite(t) || !(t > prev))
            throw ValidationError("time points must satisfy 0 < t1 < ... < tn");
        prev = t;
    }
    spot_check_bounds(spec, g);

    const auto xs = g.axis();
    const std::size_t m = xs.size();

    if (n == 1) {
        return g_expectation_1step(
            [&](double x) {
                const double args[1] = {x};
                return spec.fn(std::span<const double>(args, 1));
            },
            0.0, spec.time_points[0], p, g);
    }

    if (n == 2) {
        const double dt2 = spec.time_points[1] - spec.time_points[0];
        std::vector<double> phi1(m);
        parallel_for(m, 0, [&](std::size_t j) {
            std::vector<double> u0(m);
            for (std::size_t k = 0; k < m; ++k) {
                const double args[2] = {xs[j], xs[k]};
                u0[k] = spec.fn(std::span<const double>(args, 2));
            }
            phi1[j] = solve_value_at_zero(u0, dt2, p, g);
        });
        return solve_value_at_zero(phi1, spec.time_points[0], p, g);
    }

    // n == 3
    const double dt3 = spec.time_points[2] - spec.time_points[1];
    const double dt2 = spec.time_points[1] - spec.time_points[0];
    std::vector<double> phi2(m * m);
    parallel_for(m * m, 0, [&](std::size_t idx) {
        const std::size_t j1 = idx / m, j2 = idx % m;
        std::vector<double> u0(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double args[3] = {xs[j1], xs[j2], xs[k]};
            u0[k] = spec.fn(std::span<const double>(args, 3));
        }
        phi2[idx] = solve_value_at_zero(u0, dt3, p, g);
    });
    std::vector<double> phi1(m);
    parallel_for(m, 0, [&](std::size_t j1) {
        std::span<const double> row(phi2.data() + j1 * m, m);
        phi1[j1] = solve_value_at_zero(row, dt2, p, g);
    });
    return solve_value_at_zero(phi1, spec.time_points[0], p, g);
}

double residual_check(const std::function<double(double, double)> &u,
                      const ResidualRegion &region, const CapacityParams &p,
                      double h, std::span<const double> exclude_x) {
    p.validate();
    if (!u)
        throw ValidationError("residual_check: u is empty");
    if (!(h > 0.0) || !std::isfinite(h))
        throw ValidationError("residual_check: h must be > 0");
    if (!(region.t0 < region.t1) || !(region.x0 < region.x1))
        throw ValidationError("residual_check: degenerate region");
    if (!(region.t0 - h > 0.0))
        throw ValidationError("residual_check: region must satisfy t0 > h");
    if (region.nt < 1 || region.nx < 1)
        throw ValidationError("residual_check: need at least one sample");
    for (double e : exclude_x)
        if (e >= region.x0 - 2.0 * h && e <= region.x1 + 2.0 * h)
            throw ValidationError(
                "residual_check: region touches an excluded line");

    const double s2p = 0.5 * p.sigma_bar * p.sigma_bar;
    const double s2m = 0.5 * p.sigma_under * p.sigma_under;
    double worst = 0.0;
    for (std::size_t i = 0; i < region.nt; ++i) {
        const double t =
            region.nt == 1
                ? 0.5 * (region.t0 + region.t1)
                : region.t0 + (region.t1 - region.t0) * static_cast<double>(i) /
                                  static_cast<double>(region.nt - 1);
        for (std::size_t j = 0; j < region.nx; ++j) {
            const double x =
                region.nx == 1
                    ? 0.5 * (region.x0 + region.x1)
                    : region.x0 + (region.x1 - region.x0) *
                                      static_cast<double>(j) /
                                      static_cast<double>(region.nx - 1);
            const double ut = (u(t + h, x) - u(t - h, x)) / (2.0 * h);
            const double uxx =
                (u(t, x - h) - 2.0 * u(t, x) + u(t, x + h)) / (h * h);
            if (!std::isfinite(ut) || !std::isfinite(uxx))
                throw NumericalError("residual_check: non-finite derivative");
            const double gval =
                s2p * std::max(uxx, 0.0) + s2m * std::min(uxx, 0.0);
            worst = std::max(worst, std::abs(ut - gval));
        }
    }
    return worst;
}

} // namespace gcap

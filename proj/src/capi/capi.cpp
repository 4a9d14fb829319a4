// extern-C surface of the shared library. Exceptions from the core are
// translated into status codes; the message of the most recent failure is
// kept per thread for gcap_last_error().

#include "gcap/gcap.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <span>
#include <string>

#include "core/borel_set.hpp"
#include "core/capacity.hpp"
#include "core/control_mc.hpp"
#include "core/gheat_pde.hpp"
#include "core/special_fn.hpp"

struct gcap_set {
    gcap::BorelSetSpec spec; // stored normalized
};

struct gcap_solution {
    gcap::GridSolution sol;
};

namespace {

thread_local std::string t_last_error;

gcap_status fail(gcap_status code, const char *msg) {
    t_last_error = msg ? msg : "";
    return code;
}

gcap_status from_error(const gcap::Error &e) {
    t_last_error = e.what();
    switch (e.code()) {
    case gcap::ErrorCode::validation: return GCAP_ERR_VALIDATION;
    case gcap::ErrorCode::convergence: return GCAP_ERR_CONVERGENCE;
    case gcap::ErrorCode::unsupported: return GCAP_ERR_UNSUPPORTED;
    case gcap::ErrorCode::numerical: return GCAP_ERR_NUMERICAL;
    case gcap::ErrorCode::internal: return GCAP_ERR_INTERNAL;
    }
    return GCAP_ERR_INTERNAL;
}

// Runs fn, mapping exceptions to statuses and clearing the error on success.
template <typename Fn>
gcap_status guarded(Fn &&fn) {
    try {
        fn();
        t_last_error.clear();
        return GCAP_OK;
    } catch (const gcap::Error &e) {
        return from_error(e);
    } catch (const std::bad_alloc &) {
        t_last_error = "out of memory";
        return GCAP_ERR_INTERNAL;
    } catch (const std::exception &e) {
        t_last_error = e.what();
        return GCAP_ERR_INTERNAL;
    }
}

gcap::SeriesConfig series_config(double tol, long max_terms) {
    gcap::SeriesConfig cfg;
    cfg.tol = tol;
    cfg.max_terms = max_terms;
    return cfg;
}

gcap::CapacityParams to_core(const gcap_params *p) {
    if (!p)
        throw gcap::ValidationError("params is null");
    gcap::CapacityParams cp;
    cp.sigma_bar = p->sigma_bar;
    cp.sigma_under = p->sigma_under;
    cp.horizon = p->horizon;
    cp.series = series_config(p->series_tol, p->series_max_terms);
    return cp;
}

gcap::GridConfig to_core(const gcap_grid_config *g) {
    if (!g)
        throw gcap::ValidationError("grid config is null");
    gcap::GridConfig gc;
    gc.x_min = g->x_min;
    gc.x_max = g->x_max;
    gc.dx = g->dx;
    gc.dt = g->dt;
    gc.boundary = g->boundary == GCAP_BOUNDARY_DIRICHLET_FIXED
                      ? gcap::BoundaryMode::dirichlet_fixed
                      : gcap::BoundaryMode::dirichlet_initial;
    gc.boundary_left = g->boundary_left;
    gc.boundary_right = g->boundary_right;
    gc.snapshot_stride = g->snapshot_stride;
    return gc;
}

gcap::McConfig to_core(const gcap_mc_config *c) {
    if (!c)
        throw gcap::ValidationError("mc config is null");
    gcap::McConfig mc;
    mc.n_paths = c->n_paths;
    mc.dt = c->dt;
    mc.seed = c->seed;
    mc.bridge_correction = c->bridge_correction != 0;
    mc.n_threads = c->n_threads;
    return mc;
}

gcap::Strategy to_core(const gcap_strategy *s) {
    if (!s)
        throw gcap::ValidationError("strategy is null");
    switch (s->kind) {
    case GCAP_STRATEGY_CONSTANT:
        return gcap::Strategy::constant(s->sigma);
    case GCAP_STRATEGY_BANG_BANG_BARRIER:
        return gcap::Strategy::bang_bang(s->b, s->l);
    default:
        throw gcap::ValidationError("unknown strategy kind");
    }
}

gcap_classification to_c(const gcap::SetClassification &c) {
    gcap_classification out;
    out.case_tag = static_cast<int>(c.case_tag);
    out.rho = c.rho;
    out.rho_plus = c.rho_plus;
    out.rho_minus = c.rho_minus;
    out.side = static_cast<int>(c.side);
    return out;
}

char *dup_string(const std::string &s) {
    char *buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return buf;
}

template <typename T>
void require_out(T *out) {
    if (!out)
        throw gcap::ValidationError("out pointer is null");
}

} // namespace

extern "C" {

const char *gcap_status_str(gcap_status s) {
    switch (s) {
    case GCAP_OK: return "ok";
    case GCAP_ERR_VALIDATION: return "validation error";
    case GCAP_ERR_CONVERGENCE: return "convergence error";
    case GCAP_ERR_UNSUPPORTED: return "unsupported regime";
    case GCAP_ERR_NUMERICAL: return "numerical error";
    case GCAP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char *gcap_version_string(void) { return "gcap 1.0.0"; }

const char *gcap_last_error(void) { return t_last_error.c_str(); }

void gcap_params_default(gcap_params *p) {
    if (!p)
        return;
    p->sigma_bar = 1.0;
    p->sigma_under = 0.0;
    p->horizon = 1.0;
    p->series_tol = 1e-12;
    p->series_max_terms = 1000000;
}

gcap_status gcap_phi(double x, double *out) {
    return guarded([&] {
        require_out(out);
        *out = gcap::phi(x);
    });
}

gcap_status gcap_phi_prime(double x, double *out) {
    return guarded([&] {
        require_out(out);
        *out = gcap::phi_prime(x);
    });
}

gcap_status gcap_phi_second(double x, double *out) {
    return guarded([&] {
        require_out(out);
        *out = gcap::phi_second(x);
    });
}

gcap_status gcap_two_barrier_series(double b, double l, double t,
                                    double sigma_bar, double tol,
                                    long max_terms, double *out,
                                    long *out_terms) {
    return guarded([&] {
        require_out(out);
        const auto r =
            gcap::two_barrier_series(b, l, t, sigma_bar,
                                     series_config(tol, max_terms));
        *out = r.value;
        if (out_terms)
            *out_terms = r.terms;
    });
}

gcap_status gcap_hitting_density(double s, double x, double b, double l,
                                 double sigma_bar, double tol, long max_terms,
                                 double *out) {
    return guarded([&] {
        require_out(out);
        *out = gcap::hitting_density(s, x, b, l, sigma_bar,
                                     series_config(tol, max_terms));
    });
}

gcap_status gcap_set_parse_json(const char *json, gcap_set **out) {
    return guarded([&] {
        require_out(out);
        if (!json)
            throw gcap::ValidationError("set JSON is null");
        auto *s = new gcap_set{gcap::parse_set_json(json)};
        *out = s;
    });
}

gcap_status gcap_set_to_json(const gcap_set *s, char **out) {
    return guarded([&] {
        require_out(out);
        if (!s)
            throw gcap::ValidationError("set handle is null");
        *out = dup_string(gcap::set_to_json(s->spec));
    });
}

gcap_status gcap_set_union(const gcap_set *a, const gcap_set *b,
                           gcap_set **out) {
    return guarded([&] {
        require_out(out);
        if (!a || !b)
            throw gcap::ValidationError("set handle is null");
        *out = new gcap_set{gcap::set_union(a->spec, b->spec)};
    });
}

gcap_status gcap_set_classify(const gcap_set *s, gcap_classification *out) {
    return guarded([&] {
        require_out(out);
        if (!s)
            throw gcap::ValidationError("set handle is null");
        *out = to_c(gcap::classify(s->spec));
    });
}

void gcap_set_free(gcap_set *s) { delete s; }

const char *gcap_case_str(int case_tag) {
    return gcap::to_string(static_cast<gcap::SetCase>(case_tag));
}

const char *gcap_side_str(int side) {
    return gcap::to_string(static_cast<gcap::SetSide>(side));
}

void gcap_string_free(char *s) { delete[] s; }

gcap_status gcap_capacity(const gcap_set *s, const gcap_params *p,
                          gcap_capacity_result *out) {
    return guarded([&] {
        require_out(out);
        if (!s)
            throw gcap::ValidationError("set handle is null");
        const auto r = gcap::capacity_of(s->spec, to_core(p));
        out->value = r.value;
        out->cls = to_c(r.cls);
        out->series_terms = r.series_terms;
        out->empty_set = r.empty_set ? 1 : 0;
    });
}

gcap_status gcap_u_n(long n, double t, double x, double b, double l,
                     const gcap_params *p, double *out) {
    return guarded([&] {
        require_out(out);
        *out = gcap::u_n(n, t, x, b, l, to_core(p));
    });
}

gcap_status gcap_capacity_point(double a, const gcap_params *p, double *out) {
    return guarded([&] {
        require_out(out);
        *out = gcap::capacity_point(a, to_core(p));
    });
}

gcap_status gcap_capacity_ray(double a, int direction, const gcap_params *p,
                              double *out) {
    return guarded([&] {
        require_out(out);
        if (direction != GCAP_RAY_GE && direction != GCAP_RAY_LE)
            throw gcap::ValidationError("unknown ray direction");
        *out = gcap::capacity_ray(a,
                                  direction == GCAP_RAY_GE
                                      ? gcap::RayDir::ge
                                      : gcap::RayDir::le,
                                  to_core(p));
    });
}

void gcap_grid_config_default(gcap_grid_config *g) {
    if (!g)
        return;
    g->x_min = -8.0;
    g->x_max = 8.0;
    g->dx = 5e-3;
    g->dt = 0.0;
    g->boundary = GCAP_BOUNDARY_DIRICHLET_INITIAL;
    g->boundary_left = 0.0;
    g->boundary_right = 0.0;
    g->snapshot_stride = 0;
}

namespace {

// geometry-only checks; dt/CFL are validated at solve time against sigma_bar
void check_grid_geometry(const gcap::GridConfig &gc) {
    if (!std::isfinite(gc.x_min) || !std::isfinite(gc.x_max) ||
        !(gc.x_min < 0.0 && 0.0 < gc.x_max))
        throw gcap::ValidationError("grid must satisfy x_min < 0 < x_max");
    if (!std::isfinite(gc.dx) || !(gc.dx > 0.0))
        throw gcap::ValidationError("grid dx must be > 0");
}

} // namespace

gcap_status gcap_grid_n_nodes(const gcap_grid_config *g, size_t *out) {
    return guarded([&] {
        require_out(out);
        const auto gc = to_core(g);
        check_grid_geometry(gc);
        *out = gc.n_nodes();
    });
}

gcap_status gcap_grid_axis(const gcap_grid_config *g, double *xs, size_t cap) {
    return guarded([&] {
        if (!xs)
            throw gcap::ValidationError("axis buffer is null");
        const auto gc = to_core(g);
        check_grid_geometry(gc);
        const auto axis = gc.axis();
        if (cap < axis.size())
            throw gcap::ValidationError("axis buffer too small");
        std::copy(axis.begin(), axis.end(), xs);
    });
}

gcap_status gcap_pde_solve(const double *initial, size_t n, double horizon,
                           const gcap_params *p, const gcap_grid_config *g,
                           gcap_solution **out) {
    return guarded([&] {
        require_out(out);
        if (!initial)
            throw gcap::ValidationError("initial data is null");
        auto sol = gcap::solve(std::span<const double>(initial, n), horizon,
                               to_core(p), to_core(g));
        *out = new gcap_solution{std::move(sol)};
    });
}

void gcap_solution_free(gcap_solution *s) { delete s; }

gcap_status gcap_solution_n_levels(const gcap_solution *s, size_t *out) {
    return guarded([&] {
        require_out(out);
        if (!s)
            throw gcap::ValidationError("solution handle is null");
        *out = s->sol.values.size();
    });
}

gcap_status gcap_solution_n_nodes(const gcap_solution *s, size_t *out) {
    return guarded([&] {
        require_out(out);
        if (!s)
            throw gcap::ValidationError("solution handle is null");
        *out = s->sol.config.n_nodes();
    });
}

gcap_status gcap_solution_times(const gcap_solution *s, double *buf,
                                size_t cap) {
    return guarded([&] {
        if (!s || !buf)
            throw gcap::ValidationError("null argument");
        if (cap < s->sol.times.size())
            throw gcap::ValidationError("times buffer too small");
        std::copy(s->sol.times.begin(), s->sol.times.end(), buf);
    });
}

gcap_status gcap_solution_level(const gcap_solution *s, size_t level,
                                double *buf, size_t cap) {
    return guarded([&] {
        if (!s || !buf)
            throw gcap::ValidationError("null argument");
        if (level >= s->sol.values.size())
            throw gcap::ValidationError("solution level out of range");
        const auto &u = s->sol.values[level];
        if (cap < u.size())
            throw gcap::ValidationError("level buffer too small");
        std::copy(u.begin(), u.end(), buf);
    });
}

gcap_status gcap_solution_value(const gcap_solution *s, size_t level, double x,
                                double *out) {
    return guarded([&] {
        require_out(out);
        if (!s)
            throw gcap::ValidationError("solution handle is null");
        const size_t lvl =
            level == static_cast<size_t>(-1) ? s->sol.values.size() - 1 : level;
        *out = s->sol.value_at(lvl, x);
    });
}

gcap_status gcap_solution_write_csv(const gcap_solution *s, const char *path) {
    return guarded([&] {
        if (!s || !path)
            throw gcap::ValidationError("null argument");
        std::ofstream os(path);
        if (!os)
            throw gcap::ValidationError(std::string("cannot open ") + path);
        s->sol.write_csv(os);
        if (!os)
            throw gcap::Error(gcap::ErrorCode::internal, "csv write failed");
    });
}

gcap_status gcap_solution_summary_json(const gcap_solution *s, char **out) {
    return guarded([&] {
        require_out(out);
        if (!s)
            throw gcap::ValidationError("solution handle is null");
        *out = dup_string(s->sol.summary_json());
    });
}

gcap_status gcap_g_expectation_1step(gcap_payoff1 payoff, void *ctx, double s,
                                     double t, const gcap_params *p,
                                     const gcap_grid_config *g, double *out) {
    return guarded([&] {
        require_out(out);
        if (!payoff)
            throw gcap::ValidationError("payoff callback is null");
        *out = gcap::g_expectation_1step(
            [payoff, ctx](double x) { return payoff(x, ctx); }, s, t,
            to_core(p), to_core(g));
    });
}

gcap_status gcap_g_expectation_multistep(gcap_payoff_n payoff, void *ctx,
                                         const double *time_points, size_t n,
                                         double lip_bound, double sup_bound,
                                         const gcap_params *p,
                                         const gcap_grid_config *g,
                                         double *out) {
    return guarded([&] {
        require_out(out);
        if (!payoff || !time_points)
            throw gcap::ValidationError("null argument");
        gcap::PayoffSpec spec;
        spec.time_points.assign(time_points, time_points + n);
        spec.lip_bound = lip_bound;
        spec.sup_bound = sup_bound;
        // called concurrently from the conditioning-node solves
        spec.fn = [payoff, ctx](std::span<const double> xs) {
            return payoff(xs.data(), xs.size(), ctx);
        };
        *out = gcap::g_expectation_multistep(spec, to_core(p), to_core(g));
    });
}

gcap_status gcap_residual_check(gcap_fn_tx u, void *ctx, double t0, double t1,
                                double x0, double x1, size_t nt, size_t nx,
                                double h, const double *exclude_x,
                                size_t n_exclude, const gcap_params *p,
                                double *out) {
    return guarded([&] {
        require_out(out);
        if (!u)
            throw gcap::ValidationError("u callback is null");
        gcap::ResidualRegion region{t0, t1, x0, x1, nt, nx};
        std::span<const double> excl;
        if (exclude_x && n_exclude > 0)
            excl = std::span<const double>(exclude_x, n_exclude);
        *out = gcap::residual_check(
            [u, ctx](double t, double x) { return u(t, x, ctx); }, region,
            to_core(p), h, excl);
    });
}

void gcap_mc_config_default(gcap_mc_config *c) {
    if (!c)
        return;
    c->n_paths = 100000;
    c->dt = 1e-3;
    c->seed = 0;
    c->bridge_correction = 1;
    c->n_threads = 0;
}

gcap_status gcap_mc_hitting(double b, double l, const gcap_params *p,
                            const gcap_mc_config *c, gcap_mc_estimate *out) {
    return guarded([&] {
        require_out(out);
        const auto e =
            gcap::simulate_hitting_probability(b, l, to_core(p), to_core(c));
        out->mean = e.mean;
        out->std_error = e.std_error;
        out->n_paths = e.n_paths;
        out->coarse_dt_warning = e.coarse_dt_warning ? 1 : 0;
    });
}

gcap_status gcap_mc_payoff(const gcap_strategy *strategy, gcap_payoff1 payoff,
                           void *ctx, double horizon, const gcap_params *p,
                           const gcap_mc_config *c, gcap_mc_estimate *out) {
    return guarded([&] {
        require_out(out);
        if (!payoff)
            throw gcap::ValidationError("payoff callback is null");
        const auto e = gcap::simulate_payoff(
            to_core(strategy),
            [payoff, ctx](double x) { return payoff(x, ctx); }, horizon,
            to_core(p), to_core(c));
        out->mean = e.mean;
        out->std_error = e.std_error;
        out->n_paths = e.n_paths;
        out->coarse_dt_warning = e.coarse_dt_warning ? 1 : 0;
    });
}

gcap_status gcap_mc_record_json(const gcap_mc_estimate *e,
                                const gcap_mc_config *c,
                                const gcap_strategy *strategy, char **out) {
    return guarded([&] {
        require_out(out);
        if (!e)
            throw gcap::ValidationError("estimate is null");
        gcap::McEstimate ce;
        ce.mean = e->mean;
        ce.std_error = e->std_error;
        ce.n_paths = e->n_paths;
        ce.coarse_dt_warning = e->coarse_dt_warning != 0;
        *out = dup_string(
            gcap::mc_record_json(ce, to_core(c), to_core(strategy)));
    });
}

} // extern "C"

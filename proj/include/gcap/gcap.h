/* gcap - worst-case probabilities of Brownian terminal events under
 * volatility uncertainty [0, sigma_bar]: closed-form reflection series,
 * nonlinear heat-equation solver And controlled-martingale Monte Carlo.
 *
 * Plain C interface over the C++ core. All functions return a gcap_status;
 * results go through out-parameters or opaque handles. Handles must be
 * released with the matching *_free function. Error messages for the most
 * recent failure on the calling thread are available via gcap_last_error().
 */
#ifndef GCAP_H
#define GCAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GCAP_API __declspec(dllexport)
#else
#define GCAP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gcap_status {
    GCAP_OK = 0,
    GCAP_ERR_VALIDATION = 2,  /* bad input (domain, spec, config) */
    GCAP_ERR_CONVERGENCE = 3, /* series truncation cap hit before tolerance */
    GCAP_ERR_UNSUPPORTED = 4, /* regime outside the implemented closed forms */
    GCAP_ERR_NUMERICAL = 5,   /* blow-up / internal consistency failure */
    GCAP_ERR_INTERNAL = 6
} gcap_status;

GCAP_API const char *gcap_status_str(gcap_status s);
GCAP_API const char *gcap_version_string(void);

/* Message describing the most recent error on this thread ("" if none).
 * The pointer stays valid until the next gcap_* call on the same thread. */
GCAP_API const char *gcap_last_error(void);

/* ------------------------------------------------------------------ */
/* Model parameters                                                    */
/* ------------------------------------------------------------------ */

typedef struct gcap_params {
    double sigma_bar;       /* > 0 */
    double sigma_under;     /* in [0, sigma_bar]; closed forms need 0 */
    double horizon;         /* T > 0 */
    double series_tol;      /* absolute truncation tolerance, > 0 */
    long series_max_terms;  /* >= 1 */
} gcap_params;

/* sigma_bar=1, sigma_under=0, horizon=1, tol=1e-12, max_terms=1e6 */
GCAP_API void gcap_params_default(gcap_params *p);

/* ------------------------------------------------------------------ */
/* Scalar kernels                                                      */
/* ------------------------------------------------------------------ */

/* phi(x) = 2/sqrt(2*pi) * integral_x^inf exp(-r^2/2) dr, in [0,2]. */
GCAP_API gcap_status gcap_phi(double x, double *out);
GCAP_API gcap_status gcap_phi_prime(double x, double *out);
GCAP_API gcap_status gcap_phi_second(double x, double *out);

/* Worst-case probability of {B_T in {b,l}} (= first-exit probability of
 * sigma_bar*W from (b,l) by time t). out_terms receives the largest |i|
 * summed before truncation. */
GCAP_API gcap_status gcap_two_barrier_series(double b, double l, double t,
                                             double sigma_bar, double tol,
                                             long max_terms, double *out,
                                             long *out_terms);

/* Density of the first exit time of sigma_bar*W, started at x, from (b,l). */
GCAP_API gcap_status gcap_hitting_density(double s, double x, double b,
                                          double l, double sigma_bar,
                                          double tol, long max_terms,
                                          double *out);

/* ------------------------------------------------------------------ */
/* Borel sets (finite unions of intervals and points)                  */
/* ------------------------------------------------------------------ */

typedef struct gcap_set gcap_set; /* opaque; stores the normalized form */

typedef enum gcap_case {
    GCAP_SET_EMPTY = 0,
    GCAP_SET_FULL_IF_RHO_ZERO = 1,
    GCAP_SET_ONE_SIDED = 2,
    GCAP_SET_TWO_SIDED = 3
} gcap_case;

typedef enum gcap_side {
    GCAP_SIDE_NONE = 0,
    GCAP_SIDE_NONNEG = 1,
    GCAP_SIDE_NONPOS = 2,
    GCAP_SIDE_MIXED = 3
} gcap_side;

typedef struct gcap_classification {
    int case_tag;      /* gcap_case */
    double rho;        /* inf |x| over the set */
    double rho_plus;   /* inf {x : x in A, x >= 0}, +inf if empty */
    double rho_minus;  /* inf {-x : x in A, x <= 0}, +inf if empty */
    int side;          /* gcap_side */
} gcap_classification;

/* JSON: {"intervals": [[lo, hi, "closed|open", "closed|open"], ...],
 *        "points": [x, ...]}  with "-inf"/"inf" string endpoints.
 * The parsed set is validated and normalized. */
GCAP_API gcap_status gcap_set_parse_json(const char *json, gcap_set **out);
GCAP_API gcap_status gcap_set_to_json(const gcap_set *s, char **out);
GCAP_API gcap_status gcap_set_union(const gcap_set *a, const gcap_set *b,
                                    gcap_set **out);
GCAP_API gcap_status gcap_set_classify(const gcap_set *s,
                                       gcap_classification *out);
GCAP_API void gcap_set_free(gcap_set *s);

GCAP_API const char *gcap_case_str(int case_tag);
GCAP_API const char *gcap_side_str(int side);

/* Frees strings returned through char** out-parameters. */
GCAP_API void gcap_string_free(char *s);

/* ------------------------------------------------------------------ */
/* Capacities (closed forms, sigma_under = 0)                          */
/* ------------------------------------------------------------------ */

typedef struct gcap_capacity_result {
    double value;
    gcap_classification cls;
    long series_terms;   /* 0 unless the two-sided series was used */
    int empty_set;       /* 1: capacity of the empty event, value 0 */
} gcap_capacity_result;

GCAP_API gcap_status gcap_capacity(const gcap_set *s, const gcap_params *p,
                                   gcap_capacity_result *out);

/* u_n(t,x) for barriers b < 0 < l: the explicit solution whose n->inf
 * limit at (T,0) is the two-point capacity. */
GCAP_API gcap_status gcap_u_n(long n, double t, double x, double b, double l,
                              const gcap_params *p, double *out);

GCAP_API gcap_status gcap_capacity_point(double a, const gcap_params *p,
                                         double *out);

typedef enum gcap_ray { GCAP_RAY_GE = 0, GCAP_RAY_LE = 1 } gcap_ray;
GCAP_API gcap_status gcap_capacity_ray(double a, int direction,
                                       const gcap_params *p, double *out);

/* ------------------------------------------------------------------ */
/* Nonlinear heat equation  d_t u = G(d_xx u)                          */
/* G(a) = (sigma_bar^2 a+ - sigma_under^2 a-)/2                        */
/* ------------------------------------------------------------------ */

typedef enum gcap_boundary {
    GCAP_BOUNDARY_DIRICHLET_INITIAL = 0, /* boundary frozen at initial data */
    GCAP_BOUNDARY_DIRICHLET_FIXED = 1    /* boundary_left/right values */
} gcap_boundary;

typedef struct gcap_grid_config {
    double x_min, x_max;   /* x_min < 0 < x_max */
    double dx;             /* > 0 */
    double dt;             /* 0: auto = 0.8*dx^2/sigma_bar^2 */
    int boundary;          /* gcap_boundary */
    double boundary_left, boundary_right;
    /* 0: auto (~256 stored levels); k>0: every k steps; <0: ends only */
    long snapshot_stride;
} gcap_grid_config;

GCAP_API void gcap_grid_config_default(gcap_grid_config *g);
GCAP_API gcap_status gcap_grid_n_nodes(const gcap_grid_config *g, size_t *out);
/* Fills xs[0..n_nodes-1] with node coordinates. */
GCAP_API gcap_status gcap_grid_axis(const gcap_grid_config *g, double *xs,
                                    size_t cap);

typedef struct gcap_solution gcap_solution; /* opaque */

/* Explicit monotone time stepping from sampled initial data (one value per
 * grid node) up to `horizon`. */
GCAP_API gcap_status gcap_pde_solve(const double *initial, size_t n,
                                    double horizon, const gcap_params *p,
                                    const gcap_grid_config *g,
                                    gcap_solution **out);

GCAP_API void gcap_solution_free(gcap_solution *s);
GCAP_API gcap_status gcap_solution_n_levels(const gcap_solution *s,
                                            size_t *out);
GCAP_API gcap_status gcap_solution_n_nodes(const gcap_solution *s,
                                           size_t *out);
GCAP_API gcap_status gcap_solution_times(const gcap_solution *s, double *buf,
                                         size_t cap);
GCAP_API gcap_status gcap_solution_level(const gcap_solution *s, size_t level,
                                         double *buf, size_t cap);
/* Linear interpolation in x at the given stored level; level = (size_t)-1
 * addresses the final level. */
GCAP_API gcap_status gcap_solution_value(const gcap_solution *s, size_t level,
                                         double x, double *out);
/* CSV dump "t,x,u" of all stored levels. */
GCAP_API gcap_status gcap_solution_write_csv(const gcap_solution *s,
                                             const char *path);
/* JSON summary: u at x=0 per stored time level. */
GCAP_API gcap_status gcap_solution_summary_json(const gcap_solution *s,
                                                char **out);

/* Callbacks must be pure functions of their arguments: the evaluators may
 * invoke them concurrently from worker threads. */
typedef double (*gcap_payoff1)(double x, void *ctx);
typedef double (*gcap_payoff_n)(const double *increments, size_t n, void *ctx);
typedef double (*gcap_fn_tx)(double t, double x, void *ctx);

/* E^[payoff(B_t - B_s)] via one solve, read at x = 0. */
GCAP_API gcap_status gcap_g_expectation_1step(gcap_payoff1 payoff, void *ctx,
                                              double s, double t,
                                              const gcap_params *p,
                                              const gcap_grid_config *g,
                                              double *out);

/* E^[payoff(B_t1, B_t2 - B_t1, ...)] by backward recursion over at most
 * three time points. lip_bound/sup_bound are spot-checked. */
GCAP_API gcap_status gcap_g_expectation_multistep(
    gcap_payoff_n payoff, void *ctx, const double *time_points, size_t n,
    double lip_bound, double sup_bound, const gcap_params *p,
    const gcap_grid_config *g, double *out);

/* Max of |d_t u - G(d_xx u)| over an nt-by-nx sample of [t0,t1]x[x0,x1],
 * central differences with step h. Fails if any of exclude_x[] lies within
 * 2h of [x0,x1]. */
GCAP_API gcap_status gcap_residual_check(gcap_fn_tx u, void *ctx, double t0,
                                         double t1, double x0, double x1,
                                         size_t nt, size_t nx, double h,
                                         const double *exclude_x,
                                         size_t n_exclude,
                                         const gcap_params *p, double *out);

/* ------------------------------------------------------------------ */
/* Monte Carlo over controlled martingales  X_t = int_0^t v_s dW_s     */
/* ------------------------------------------------------------------ */

typedef struct gcap_mc_config {
    long n_paths;            /* >= 1 */
    double dt;               /* Euler step, > 0 */
    uint64_t seed;
    int bridge_correction;   /* per-step Brownian-bridge crossing check */
    int n_threads;           /* 0: auto */
} gcap_mc_config;

GCAP_API void gcap_mc_config_default(gcap_mc_config *c);

typedef struct gcap_mc_estimate {
    double mean;
    double std_error;
    long n_paths;
    int coarse_dt_warning;   /* dt coarse relative to barrier distance */
} gcap_mc_estimate;

typedef enum gcap_strategy_kind {
    GCAP_STRATEGY_CONSTANT = 0,
    GCAP_STRATEGY_BANG_BANG_BARRIER = 1
} gcap_strategy_kind;

typedef struct gcap_strategy {
    int kind;        /* gcap_strategy_kind */
    double sigma;    /* constant: in [sigma_under, sigma_bar] */
    double b, l;     /* bang-bang: v = sigma_bar until exit of (b,l), then 0 */
} gcap_strategy;

/* P(first exit of sigma_bar*W from (b,l) <= T), the bang-bang estimate of
 * the two-point capacity. Deterministic given (config, parameters). */
GCAP_API gcap_status gcap_mc_hitting(double b, double l, const gcap_params *p,
                                     const gcap_mc_config *c,
                                     gcap_mc_estimate *out);

GCAP_API gcap_status gcap_mc_payoff(const gcap_strategy *strategy,
                                    gcap_payoff1 payoff, void *ctx,
                                    double horizon, const gcap_params *p,
                                    const gcap_mc_config *c,
                                    gcap_mc_estimate *out);

/* {"mean":..,"std_error":..,"n_paths":..,"seed":..,"dt":..,"strategy":..} */
GCAP_API gcap_status gcap_mc_record_json(const gcap_mc_estimate *e,
                                         const gcap_mc_config *c,
                                         const gcap_strategy *strategy,
                                         char **out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GCAP_H */

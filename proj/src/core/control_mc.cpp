#include "core/control_mc.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace gcap {

namespace {

constexpr std::size_t kBlock = 16384;

// Welford accumulator; identical values stay exact (d == 0 throughout),
// so frozen strategies report a zero standard error bit-for-bit.
struct RunningStats {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const RunningStats &o) {
        if (o.n == 0)
            return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double d = o.mean - mean;
        const double nt = static_cast<double>(n) + static_cast<double>(o.n);
        m2 += o.m2 + d * d * static_cast<double>(n) *
                         static_cast<double>(o.n) / nt;
        mean += d * static_cast<double>(o.n) / nt;
        n += o.n;
    }

    McEstimate estimate() const {
        McEstimate e;
        e.n_paths = n;
        e.mean = mean;
        if (n > 1) {
            const double var = std::max(m2, 0.0) / static_cast<double>(n - 1);
            e.std_error = std::sqrt(var / static_cast<double>(n));
        }
        return e;
    }
};

struct StepPlan {
    std::size_t steps;
    double dt;
};

StepPlan plan_steps(double horizon, double dt_requested) {
    const auto steps = static_cast<std::size_t>(std::max<long long>(
        1, std::llround(std::ceil(horizon / dt_requested - 1e-12))));
    return {steps, horizon / static_cast<double>(steps)};
}

// One bang-bang path: sigma_bar*W frozen exactly at the first barrier it
// crosses. Returns the terminal value; *hit reports whether it froze.
double bang_bang_path(Xoshiro256pp &rng, const NormalSampler &normal,
                      const StepPlan &plan, double b, double l,
                      double sigma_bar, bool bridge, bool *hit) {
    const double sdt = sigma_bar * std::sqrt(plan.dt);
    const double inv = 1.0 / (sigma_bar * sigma_bar * plan.dt);
    // products of barrier distances above this make the bridge-crossing
    // probability < exp(-45); skip the exp and the uniform draw there
    const double cutoff = 22.5 / inv;

    double x = 0.0;
    for (std::size_t k = 0; k < plan.steps; ++k) {
        const double xn = x + sdt * normal(rng);
        if (xn <= b) {
            *hit = true;
            return b;
        }
        if (xn >= l) {
            *hit = true;
            return l;
        }
        if (bridge) {
            const double prod_lo = (x - b) * (xn - b);
            const double prod_hi = (l - x) * (l - xn);
            double p_lo = 0.0, p_hi = 0.0;
            if (prod_lo < cutoff)
                p_lo = std::exp(-2.0 * prod_lo * inv);
            if (prod_hi < cutoff)
                p_hi = std::exp(-2.0 * prod_hi * inv);
            const double pc = p_lo + p_hi;
            if (pc > 0.0) {
                const double u = rng.uniform01();
                if (u < pc) {
                    *hit = true;
                    return u < p_lo ? b : l;
                }
            }
        }
        x = xn;
    }
    *hit = false;
    return x;
}

template <typename PerPath>
void run_blocks(long n_paths, int n_threads, std::uint64_t seed,
                PerPath &&per_path, std::vector<RunningStats> &out) {
    const auto total = static_cast<std::size_t>(n_paths);
    const std::size_t n_blocks = (total + kBlock - 1) / kBlock;
    out.assign(n_blocks, {});
    parallel_for(n_blocks, n_threads, [&](std::size_t blk) {
        const NormalSampler normal;
        const std::size_t lo = blk * kBlock;
        const std::size_t hi = std::min(lo + kBlock, total);
        RunningStats stats;
        for (std::size_t pid = lo; pid < hi; ++pid) {
            auto rng = Xoshiro256pp::for_path(seed, pid);
            stats.add(per_path(rng, normal));
        }
        out[blk] = stats;
    });
}

McEstimate reduce_blocks(const std::vector<RunningStats> &blocks) {
    RunningStats total;
    for (const auto &blk : blocks) // fixed order: thread-count independent
        total.merge(blk);
    return total.estimate();
}

void require_barriers(double b, double l) {
    if (!std::isfinite(b) || !std::isfinite(l) || b >= 0.0 || l <= 0.0)
        throw ValidationError("barriers must satisfy b < 0 < l");
}

} // namespace

void McConfig::validate() const {
    if (n_paths < 1)
        throw ValidationError("n_paths must be >= 1");
    if (!std::isfinite(dt) || !(dt > 0.0))
        throw ValidationError("mc dt must be > 0");
    if (n_threads < 0)
        throw ValidationError("n_threads must be >= 0");
}

Strategy Strategy::constant(double sigma) {
    Strategy s;
    s.kind = Kind::constant;
    s.sigma = sigma;
    return s;
}

Strategy Strategy::bang_bang(double b, double l) {
    Strategy s;
    s.kind = Kind::bang_bang_barrier;
    s.b = b;
    s.l = l;
    return s;
}

void Strategy::validate(const CapacityParams &p) const {
    switch (kind) {
    case Kind::constant:
        if (!std::isfinite(sigma) || sigma < p.sigma_under ||
            sigma > p.sigma_bar)
            throw ValidationError(
                "constant strategy sigma must lie in [sigma_under, sigma_bar]");
        return;
    case Kind::bang_bang_barrier:
        require_barriers(b, l);
        // the post-exit leg holds v = 0, only admissible when sigma_under = 0
        if (p.sigma_under != 0.0)
            throw ValidationError(
                "bang-bang strategy requires sigma_under = 0");
        return;
    }
    throw ValidationError("unknown strategy kind");
}

McEstimate simulate_hitting_probability(double b, double l,
                                        const CapacityParams &p,
                                        const McConfig &cfg) {
    p.validate();
    cfg.validate();
    require_barriers(b, l);

    const StepPlan plan = plan_steps(p.horizon, cfg.dt);
    const double sigma = p.sigma_bar;
    std::vector<RunningStats> blocks;
    run_blocks(cfg.n_paths, cfg.n_threads, cfg.seed,
               [&](Xoshiro256pp &rng, const NormalSampler &normal) {
                   bool hit = false;
                   bang_bang_path(rng, normal, plan, b, l, sigma,
                                  cfg.bridge_correction, &hit);
                   return hit ? 1.0 : 0.0;
               },
               blocks);
    McEstimate e = reduce_blocks(blocks);
    const double near = std::min(-b, l) / sigma;
    e.coarse_dt_warning = cfg.dt > near * near / 100.0;
    return e;
}

McEstimate simulate_payoff(const Strategy &strategy,
                           const std::function<double(double)> &payoff,
                           double horizon, const CapacityParams &p,
                           const McConfig &cfg) {
    p.validate();
    cfg.validate();
    strategy.validate(p);
    if (!payoff)
        throw ValidationError("payoff is empty");
    if (!std::isfinite(horizon) || !(horizon > 0.0))
        throw ValidationError("horizon must be > 0");

    if (strategy.kind == Strategy::Kind::constant) {
        if (strategy.sigma == 0.0) {
            // frozen path: every sample equals payoff(0)
            McEstimate e;
            e.mean = payoff(0.0);
            e.std_error = 0.0;
            e.n_paths = cfg.n_paths;
            if (!std::isfinite(e.mean))
                throw NumericalError("payoff(0) is not finite");
            return e;
        }
        // exact terminal law N(0, sigma^2 T); no Euler discretization
        const double scale = strategy.sigma * std::sqrt(horizon);
        std::vector<RunningStats> blocks;
        run_blocks(cfg.n_paths, cfg.n_threads, cfg.seed,
                   [&](Xoshiro256pp &rng, const NormalSampler &normal) {
                       return payoff(scale * normal(rng));
                   },
                   blocks);
        return reduce_blocks(blocks);
    }

    const StepPlan plan = plan_steps(horizon, cfg.dt);
    const double sigma = p.sigma_bar;
    std::vector<RunningStats> blocks;
    run_blocks(cfg.n_paths, cfg.n_threads, cfg.seed,
               [&](Xoshiro256pp &rng, const NormalSampler &normal) {
                   bool hit = false;
                   const double xT =
                       bang_bang_path(rng, normal, plan, strategy.b,
                                      strategy.l, sigma,
                                      cfg.bridge_correction, &hit);
                   return payoff(xT);
               },
               blocks);
    McEstimate e = reduce_blocks(blocks);
    const double near = std::min(-strategy.b, strategy.l) / sigma;
    e.coarse_dt_warning = cfg.dt > near * near / 100.0;
    return e;
}

std::string mc_record_json(const McEstimate &e, const McConfig &cfg,
                           const Strategy &strategy) {
    nlohmann::json j;
    j["mean"] = e.mean;
    j["std_error"] = e.std_error;
    j["n_paths"] = e.n_paths;
    j["seed"] = cfg.seed;
    j["dt"] = cfg.dt;
    j["bridge_correction"] = cfg.bridge_correction;
    if (e.coarse_dt_warning)
        j["coarse_dt_warning"] = true;
    nlohmann::json s;
    if (strategy.kind == Strategy::Kind::constant) {
        s["kind"] = "constant";
        s["sigma"] = strategy.sigma;
    } else {
        s["kind"] = "bang_bang_barrier";
        s["b"] = strategy.b;
        s["l"] = strategy.l;
    }
    j["strategy"] = s;
    return j.dump();
}

} // namespace gcap

#pragma once

// Deterministic per-path random streams. Each path derives its own
// xoshiro256++ state from disjoint chunks of one splitmix64 stream, so
// estimates are a pure function of (seed, path index) no matter how paths
// are scheduled across threads. The normal sampler is a 256-layer ziggurat
// with the exact Gaussian tail.

#include <cmath>
#include <cstdint>
#include <limits>

#include "core/errors.hpp"

namespace gcap {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(SplitMix64 seeder) {
        for (auto &w : s_)
            w = seeder.next();
    }

    static Xoshiro256pp for_path(std::uint64_t master_seed,
                                 std::uint64_t path_index) {
        // Paths p and p+1 take splitmix outputs {4p+1..4p+4} and
        // {4p+5..4p+8}: disjoint state words from one master stream.
        return Xoshiro256pp(
            SplitMix64(master_seed + 0x9E3779B97F4A7C15ULL * (4 * path_index)));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1)
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform on (0,1], safe under log()
    double uniform01_pos() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

namespace detail {

struct ZigguratTables {
    static constexpr int kLayers = 256;
    static constexpr double kR = 3.6541528853610088;

    // hot data: one 16-byte record per layer (w carries the base-strip
    // proposal width q at index 0)
    struct Layer {
        double w;     // proposal width
        double ratio; // immediate-accept threshold on |u|
    };
    Layer layer[kLayers];
    double x[kLayers]; // strip widths, x[0] = 0
    double f[kLayers]; // exp(-x^2/2) at strip boundaries

    ZigguratTables() {
        const double fr = std::exp(-0.5 * kR * kR);
        // area of every strip: base rectangle plus the exact Gaussian tail
        const double v =
            kR * fr + std::sqrt(M_PI / 2.0) * std::erfc(kR / std::sqrt(2.0));
        const double q = v / fr;
        x[kLayers - 1] = kR;
        f[kLayers - 1] = fr;
        for (int i = kLayers - 1; i >= 2; --i) {
            x[i - 1] = std::sqrt(-2.0 * std::log(v / x[i] + f[i]));
            f[i - 1] = std::exp(-0.5 * x[i - 1] * x[i - 1]);
        }
        x[0] = 0.0;
        f[0] = 1.0;
        // The recursion must close at the top strip; otherwise R/v are wrong.
        if (std::abs(x[1] * (1.0 - f[1]) - v) > 1e-10 * v)
            throw Error(ErrorCode::internal, "ziggurat constants inconsistent");
        layer[0] = {q, kR / q};
        for (int i = 1; i < kLayers; ++i)
            layer[i] = {x[i], x[i - 1] / x[i]};
    }
};

inline const ZigguratTables &ziggurat_tables() {
    static const ZigguratTables t;
    return t;
}

} // namespace detail

// Standard normal sampler; construct once, then roughly 98% of draws cost a
// single 64-bit word. Copyable and stateless apart from the table pointer.
class NormalSampler {
public:
    NormalSampler() : t_(&detail::ziggurat_tables()) {}

    double operator()(Xoshiro256pp &rng) const {
        for (;;) {
            const std::uint64_t bits = rng.next();
            const int k = static_cast<int>(bits & 255);
            // signed 53-bit mantissa: u in [-1,1), sign from the top bit
            const double u =
                static_cast<double>(static_cast<std::int64_t>(bits) >> 11) *
                0x1.0p-52;
            const auto &L = t_->layer[k];
            if (std::abs(u) < L.ratio)
                return u * L.w;
            const double r = slow_path(rng, k, u);
            if (!std::isnan(r))
                return r;
        }
    }

private:
    double slow_path(Xoshiro256pp &rng, int k, double u) const {
        if (k == 0) {
            // exact Gaussian tail beyond R
            const double sign = u < 0.0 ? -1.0 : 1.0;
            for (;;) {
                const double e1 =
                    -std::log(rng.uniform01_pos()) / detail::ZigguratTables::kR;
                const double e2 = -std::log(rng.uniform01_pos());
                if (e2 + e2 >= e1 * e1)
                    return sign * (detail::ZigguratTables::kR + e1);
            }
        }
        const double x = u * t_->x[k];
        const double y =
            t_->f[k] + rng.uniform01() * (t_->f[k - 1] - t_->f[k]);
        if (y <= std::exp(-0.5 * x * x))
            return x;
        return std::numeric_limits<double>::quiet_NaN(); // retry
    }

    const detail::ZigguratTables *t_;
};

// Convenience wrapper for one-off draws.
inline double normal(Xoshiro256pp &rng) {
    static thread_local NormalSampler sampler;
    return sampler(rng);
}

} // namespace gcap

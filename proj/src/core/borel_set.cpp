#include "core/borel_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace gcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_point(const Interval &iv) { return iv.lo == iv.hi; }

void validate_interval(const Interval &iv) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi))
        throw ValidationError("interval endpoint is NaN");
    if (iv.lo > iv.hi)
        throw ValidationError("interval has lo > hi");
    if (iv.lo == iv.hi) {
        if (!std::isfinite(iv.lo))
            throw ValidationError("degenerate interval at infinity");
        if (!iv.lo_closed || !iv.hi_closed)
            throw ValidationError("empty interval: lo == hi with open end");
    }
}

// Infinite endpoints are necessarily open; drop meaningless flags.
Interval canon_flags(Interval iv) {
    if (iv.lo == -kInf)
        iv.lo_closed = false;
    if (iv.hi == kInf)
        iv.hi_closed = false;
    return iv;
}

} // namespace

const char *to_string(SetCase c) {
    switch (c) {
    case SetCase::empty: return "EMPTY";
    case SetCase::full_if_rho_zero: return "FULL_IF_RHO_ZERO";
    case SetCase::one_sided: return "ONE_SIDED";
    case SetCase::two_sided: return "TWO_SIDED";
    }
    return "?";
}

const char *to_string(SetSide s) {
    switch (s) {
    case SetSide::none: return "none";
    case SetSide::nonneg: return "nonneg";
    case SetSide::nonpos: return "nonpos";
    case SetSide::mixed: return "mixed";
    }
    return "?";
}

void validate(const BorelSetSpec &spec) {
    for (const auto &iv : spec.intervals)
        validate_interval(iv);
    for (double p : spec.points)
        if (!std::isfinite(p))
            throw ValidationError("set point must be finite");
}

BorelSetSpec normalize(const BorelSetSpec &spec) {
    validate(spec);

    // Points become degenerate closed intervals so one merge pass covers
    // absorption, endpoint closing and bridging.
    std::vector<Interval> all;
    all.reserve(spec.intervals.size() + spec.points.size());
    for (const auto &iv : spec.intervals)
        all.push_back(canon_flags(iv));
    for (double p : spec.points)
        all.push_back({p, p, true, true});

    std::sort(all.begin(), all.end(), [](const Interval &a, const Interval &b) {
        if (a.lo != b.lo)
            return a.lo < b.lo;
        if (a.lo_closed != b.lo_closed)
            return a.lo_closed; // closed endpoint starts earlier
        return a.hi < b.hi;
    });

    std::vector<Interval> merged;
    for (const auto &iv : all) {
        if (!merged.empty()) {
            Interval &last = merged.back();
            const bool overlaps = iv.lo < last.hi;
            const bool touches =
                iv.lo == last.hi && (last.hi_closed || iv.lo_closed);
            if (overlaps || touches) {
                if (iv.hi > last.hi) {
                    last.hi = iv.hi;
                    last.hi_closed = iv.hi_closed;
                } else if (iv.hi == last.hi) {
                    last.hi_closed = last.hi_closed || iv.hi_closed;
                }
                continue;
            }
        }
        merged.push_back(iv);
    }

    BorelSetSpec out;
    for (const auto &iv : merged) {
        if (is_point(iv))
            out.points.push_back(iv.lo);
        else
            out.intervals.push_back(iv);
    }
    return out;
}

SetClassification classify(const BorelSetSpec &spec) {
    validate(spec);

    SetClassification c;
    if (spec.empty()) {
        c.case_tag = SetCase::empty;
        c.rho = c.rho_plus = c.rho_minus = kInf;
        c.side = SetSide::none;
        return c;
    }

    double rp = kInf; // inf{x : x in A, x >= 0}
    double rm = kInf; // inf{-x : x in A, x <= 0}
    bool has_pos = false, has_neg = false;

    for (const auto &iv : spec.intervals) {
        if (iv.hi > 0.0) {
            has_pos = true;
            rp = std::min(rp, std::max(iv.lo, 0.0));
        } else if (iv.hi == 0.0 && iv.hi_closed) {
            rp = std::min(rp, 0.0);
        }
        if (iv.lo < 0.0) {
            has_neg = true;
            rm = std::min(rm, std::max(-iv.hi, 0.0));
        } else if (iv.lo == 0.0 && iv.lo_closed) {
            rm = std::min(rm, 0.0);
        }
    }
    for (double p : spec.points) {
        if (p > 0.0) {
            has_pos = true;
            rp = std::min(rp, p);
        } else if (p < 0.0) {
            has_neg = true;
            rm = std::min(rm, -p);
        } else {
            rp = std::min(rp, 0.0);
            rm = std::min(rm, 0.0);
        }
    }

    c.rho_plus = rp;
    c.rho_minus = rm;
    c.rho = std::min(rp, rm);
    c.side = !has_neg ? SetSide::nonneg
                      : (!has_pos ? SetSide::nonpos : SetSide::mixed);

    if (c.rho == 0.0)
        c.case_tag = SetCase::full_if_rho_zero;
    else if (c.side == SetSide::mixed)
        c.case_tag = SetCase::two_sided;
    else
        c.case_tag = SetCase::one_sided;
    return c;
}

BorelSetSpec set_union(const BorelSetSpec &a, const BorelSetSpec &b) {
    BorelSetSpec joined = a;
    joined.intervals.insert(joined.intervals.end(), b.intervals.begin(),
                            b.intervals.end());
    joined.points.insert(joined.points.end(), b.points.begin(),
                         b.points.end());
    return normalize(joined);
}

namespace {

double parse_endpoint(const nlohmann::json &j) {
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf")
            return kInf;
        if (s == "-inf")
            return -kInf;
        throw ValidationError("unknown endpoint sentinel '" + s + "'");
    }
    throw ValidationError("interval endpoint must be a number or \"±inf\"");
}

bool parse_flag(const nlohmann::json &j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "closed")
            return true;
        if (s == "open")
            return false;
    }
    throw ValidationError("endpoint flag must be \"closed\" or \"open\"");
}

nlohmann::json endpoint_json(double v) {
    if (v == kInf)
        return "inf";
    if (v == -kInf)
        return "-inf";
    return v;
}

} // namespace

BorelSetSpec parse_set_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("set JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ValidationError("set JSON must be an object");

    BorelSetSpec spec;
    if (j.contains("intervals")) {
        if (!j["intervals"].is_array())
            throw ValidationError("\"intervals\" must be an array");
        for (const auto &item : j["intervals"]) {
            if (!item.is_array() || item.size() != 4)
                throw ValidationError(
                    "interval must be [lo, hi, \"closed|open\", \"closed|open\"]");
            spec.intervals.push_back({parse_endpoint(item[0]),
                                      parse_endpoint(item[1]),
                                      parse_flag(item[2]), parse_flag(item[3])});
        }
    }
    if (j.contains("points")) {
        if (!j["points"].is_array())
            throw ValidationError("\"points\" must be an array");
        for (const auto &item : j["points"]) {
            if (!item.is_number())
                throw ValidationError("set point must be a finite number");
            spec.points.push_back(item.get<double>());
        }
    }
    return normalize(spec);
}

std::string set_to_json(const BorelSetSpec &spec) {
    nlohmann::json j;
    j["intervals"] = nlohmann::json::array();
    for (const auto &iv : spec.intervals)
        j["intervals"].push_back({endpoint_json(iv.lo), endpoint_json(iv.hi),
                                  iv.lo_closed ? "closed" : "open",
                                  iv.hi_closed ? "closed" : "open"});
    j["points"] = spec.points;
    return j.dump();
}

} // namespace gcap

#pragma once

// Borel subsets of R represented as finite unions of intervals and points.
// This covers every set the closed-form capacity depends on: the capacity of
// {B_T in A} is a function of the infima rho(A), rho(A+), rho(A-) only.

#include <string>
#include <vector>

#include "core/errors.hpp"

namespace gcap {

struct Interval {
    double lo = 0.0, hi = 0.0;       // -inf/+inf allowed, then the flag is open
    bool lo_closed = true, hi_closed = true;
};

struct BorelSetSpec {
    std::vector<Interval> intervals;
    std::vector<double> points;

    bool empty() const { return intervals.empty() && points.empty(); }
};

enum class SetCase { empty, full_if_rho_zero, one_sided, two_sided };
enum class SetSide { none, nonneg, nonpos, mixed };

struct SetClassification {
    SetCase case_tag = SetCase::empty;
    double rho = 0.0;        // inf{|x| : x in A}
    double rho_plus = 0.0;   // inf{x : x in A, x >= 0}, +inf if no such x
    double rho_minus = 0.0;  // inf{-x : x in A, x <= 0}, +inf if no such x
    SetSide side = SetSide::none;
};

const char *to_string(SetCase c);
const char *to_string(SetSide s);

// Throws ValidationError on NaN endpoints, lo > hi, empty intervals
// (lo == hi with an open end), or non-finite points.
void validate(const BorelSetSpec &spec);

// Canonical form: intervals sorted, pairwise disjoint and non-adjacent,
// points deduplicated and not contained in (or adjacent to) any interval.
// Idempotent. Points bridging two open intervals are merged away.
BorelSetSpec normalize(const BorelSetSpec &spec);

// Classification by the infima rho, rho_plus, rho_minus. Open endpoints count
// toward the infima (approximating sequences inside A reach them), so the
// result is insensitive to normalization.
SetClassification classify(const BorelSetSpec &spec);

BorelSetSpec set_union(const BorelSetSpec &a, const BorelSetSpec &b);

// {"intervals": [[lo, hi, "closed|open", "closed|open"], ...],
//  "points": [x, ...]}  with "-inf"/"inf" string sentinels.
BorelSetSpec parse_set_json(const std::string &text);
std::string set_to_json(const BorelSetSpec &spec);

} // namespace gcap

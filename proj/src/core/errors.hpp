#pragma once

#include <stdexcept>
#include <string>

namespace gcap {

enum class ErrorCode {
    validation = 2,
    convergence = 3,
    unsupported = 4,
    numerical = 5,
    internal = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string &msg)
        : Error(ErrorCode::validation, msg) {}
};

struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string &msg)
        : Error(ErrorCode::unsupported, msg) {}
};

// Truncation cap reached before the tolerance; carries the partial sum and
// the last remainder bound so callers can inspect how far the sum got.
struct ConvergenceError : Error {
    ConvergenceError(const std::string &msg, double partial, double bound,
                     long terms)
        : Error(ErrorCode::convergence, msg), partial_sum(partial),
          tail_bound(bound), terms_used(terms) {}
    double partial_sum;
    double tail_bound;
    long terms_used;
};

struct NumericalError : Error {
    explicit NumericalError(const std::string &msg)
        : Error(ErrorCode::numerical, msg) {}
};

} // namespace gcap

#pragma once

#include <limits>
#include <span>
#include <string>

#include "biknn/error.hpp"

namespace biknn {

/// Exponent of a Minkowski norm: a real p >= 1, or infinity (Chebyshev).
class PNorm {
public:
    constexpr PNorm() = default;
    explicit PNorm(double p) : p_(p) {
        if (!(p >= 1.0)) throw ParamError("p-norm exponent must be >= 1 or inf");
    }
    static PNorm infinity() { return PNorm(std::numeric_limits<double>::infinity()); }
    /// Accepts "inf"/"infinity" or a number >= 1.
    static PNorm parse(const std::string& text);

    double p() const { return p_; }
    bool is_infinity() const { return p_ == std::numeric_limits<double>::infinity(); }
    std::string to_string() const;

    friend bool operator==(PNorm, PNorm) = default;

private:
    double p_ = 2.0;
};

/// (sum_j |a_j - b_j|^p)^(1/p); max_j |a_j - b_j| for p = inf.
double minkowski(std::span<const double> a, std::span<const double> b, PNorm p);

/// Norm of a vector, same conventions as `minkowski` against the origin.
double pnorm(std::span<const double> v, PNorm p);

}  // namespace biknn

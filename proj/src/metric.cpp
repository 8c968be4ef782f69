#include "biknn/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace biknn {

namespace {

// Accumulates per-coordinate absolute gaps into the norm. Shared by
// minkowski() and pnorm() so both round identically.
template <typename Gap>
double accumulate_norm(std::size_t d, Gap gap, PNorm p) {
    if (p.is_infinity()) {
        double m = 0.0;
        for (std::size_t j = 0; j < d; ++j) m = std::max(m, gap(j));
        return m;
    }
    const double e = p.p();
    double s = 0.0;
    if (e == 1.0) {
        for (std::size_t j = 0; j < d; ++j) s += gap(j);
        return s;
    }
    if (e == 2.0) {
        for (std::size_t j = 0; j < d; ++j) {
            double g = gap(j);
            s += g * g;
        }
        return std::sqrt(s);
    }
    for (std::size_t j = 0; j < d; ++j) s += std::pow(gap(j), e);
    return std::pow(s, 1.0 / e);
}

}  // namespace

PNorm PNorm::parse(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ParamError("invalid p-norm '" + text + "'");
    }
    if (used != text.size()) throw ParamError("invalid p-norm '" + text + "'");
    return PNorm(v);
}

std::string PNorm::to_string() const {
    if (is_infinity()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", p_);
    return buf;
}

double minkowski(std::span<const double> a, std::span<const double> b, PNorm p) {
    if (a.size() != b.size()) throw ParamError("minkowski: dimension mismatch");
    return accumulate_norm(a.size(), [&](std::size_t j) { return std::abs(a[j] - b[j]); }, p);
}

double pnorm(std::span<const double> v, PNorm p) {
    return accumulate_norm(v.size(), [&](std::size_t j) { return std::abs(v[j]); }, p);
}

}  // namespace biknn

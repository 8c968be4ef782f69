#pragma once

// Brute-force reference implementations used as test oracles. Nothing here
// calls into the library's search, ECDF, MCD or metric code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "biknn/matrix.hpp"

namespace oracle {

// Minkowski distance straight from the definition, coordinates summed in order.
inline double distance(std::span<const double> a, std::span<const double> b, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
        return m;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double g = std::abs(a[j] - b[j]);
        s += p == 1.0 ? g : (p == 2.0 ? g * g : std::pow(g, p));
    }
    return p == 1.0 ? s : (p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p));
}

struct Hit {
    std::size_t id;
    double distance;
};

// Exhaustive scan; ties by id. `skip` drops one stored id.
inline std::vector<Hit> knn(const biknn::Matrix& pts, std::span<const double> x, std::size_t k, double p,
                            std::optional<std::size_t> skip = std::nullopt) {
    std::vector<Hit> all;
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        if (skip && *skip == i) continue;
        all.push_back({i, distance(x, pts.row(i), p)});
    }
    std::sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    });
    all.resize(std::min(k, all.size()));
    return all;
}

// Count of training values <= x, divided by n.
inline double ecdf(std::span<const double> column, double x) {
    std::size_t c = 0;
    for (double v : column) c += v <= x;
    return static_cast<double>(c) / static_cast<double>(column.size());
}

inline std::vector<double> column(const biknn::Matrix& m, std::size_t j) {
    std::vector<double> c(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) c[i] = m(i, j);
    return c;
}

inline std::vector<double> project(const biknn::Matrix& train, std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = ecdf(column(train, j), x[j]);
    return out;
}

inline double agg_max(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// (k_e, k_p) with max aggregation, chained from the brute-force kNN and
// counting ECDF. `self` excludes that training row.
inline std::pair<double, double> anomaly(const biknn::Matrix& train, std::span<const double> x, std::size_t k,
                                         double p1, double p2, std::optional<std::size_t> self) {
    auto hits = knn(train, x, k, p1, self);
    auto px = project(train, x);
    std::vector<double> de, dp;
    for (const auto& h : hits) {
        de.push_back(h.distance);
        auto pj = project(train, train.row(h.id));
        dp.push_back(distance(px, pj, p2));
    }
    return {agg_max(de), agg_max(dp)};
}

// Pairwise Mann-Whitney count.
inline double auc(std::span<const double> s, std::span<const int> y) {
    std::uint64_t fav = 0, ties = 0, P = 0, N = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i]) ++P; else ++N;
        if (!y[i]) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j]) continue;
            if (s[i] > s[j]) ++fav;
            else if (s[i] == s[j]) ++ties;
        }
    }
    return (static_cast<double>(fav) + 0.5 * static_cast<double>(ties)) /
           (static_cast<double>(P) * static_cast<double>(N));
}

// Determinant of the 1/h covariance of a 2D subset.
inline double cov_det(std::span<const std::array<double, 2>> pts, const std::vector<std::size_t>& subset) {
    double mx = 0, my = 0;
    for (auto i : subset) mx += pts[i][0], my += pts[i][1];
    const double h = static_cast<double>(subset.size());
    mx /= h, my /= h;
    double sxx = 0, sxy = 0, syy = 0;
    for (auto i : subset) {
        double dx = pts[i][0] - mx, dy = pts[i][1] - my;
        sxx += dx * dx, sxy += dx * dy, syy += dy * dy;
    }
    sxx /= h, sxy /= h, syy /= h;
    return sxx * syy - sxy * sxy;
}

struct McdOptimum {
    double det = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();  // best det of any other subset
    std::vector<std::size_t> support;
};

// Recursive enumeration of all C(m, h) subsets.
inline McdOptimum mcd(std::span<const std::array<double, 2>> pts, std::size_t h) {
    McdOptimum best;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == h) {
            double d = cov_det(pts, cur);
            if (d < best.det) {
                best.second = best.det;
                best.det = d;
                best.support = cur;
            } else if (d < best.second) {
                best.second = d;
            }
            return;
        }
        for (std::size_t i = start; i + (h - cur.size()) <= pts.size(); ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return best;
}

}  // namespace oracle

#include "biknn/robust_cov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "biknn/error.hpp"
#include "biknn/random.hpp"

namespace biknn {

namespace {

// Adds a ridge to a (near) singular scatter so it can be inverted.
Sym2 regularized(Sym2 cov, bool* was_singular = nullptr) {
    bool singular = !(cov.det() >= kSingularDet);
    if (singular) {
        double tr = cov.trace();
        double eps = tr > 0.0 ? 1e-9 * tr / 2.0 : 1e-9;
        cov.xx += eps;
        cov.yy += eps;
    }
    if (was_singular) *was_singular = singular;
    return cov;
}

struct Candidate {
    double det;
    std::vector<std::size_t> support;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
    return a.det < b.det || (a.det == b.det && a.support < b.support);
}

double subset_det(std::span<const Vec2> points, std::span<const std::size_t> subset) {
    return subset_moments(points, subset).cov.det();
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

double Sym2::min_eigenvalue() const {
    double half_tr = 0.5 * (xx + yy);
    double diff = 0.5 * (xx - yy);
    return half_tr - std::sqrt(diff * diff + xy * xy);
}

double Sym2::inverse_quadratic(const Vec2& u) const {
    double q = (yy * u[0] * u[0] - 2.0 * xy * u[0] * u[1] + xx * u[1] * u[1]) / det();
    return q > 0.0 ? q : 0.0;
}

double chi2_2_median() { return 2.0 * std::numbers::ln2; }

SubsetMoments subset_moments(std::span<const Vec2> points, std::span<const std::size_t> subset) {
    SubsetMoments m;
    if (subset.empty()) return m;
    const double h = static_cast<double>(subset.size());
    for (auto i : subset) {
        m.mean[0] += points[i][0];
        m.mean[1] += points[i][1];
    }
    m.mean[0] /= h;
    m.mean[1] /= h;
    for (auto i : subset) {
        double dx = points[i][0] - m.mean[0];
        double dy = points[i][1] - m.mean[1];
        m.cov.xx += dx * dx;
        m.cov.xy += dx * dy;
        m.cov.yy += dy * dy;
    }
    m.cov.xx /= h;
    m.cov.xy /= h;
    m.cov.yy /= h;
    return m;
}

std::size_t mcd_subset_size(std::size_t m, std::optional<double> support_fraction) {
    std::size_t h = (m + 3) / 2;
    if (support_fraction) {
        if (!(*support_fraction > 0.5 && *support_fraction <= 1.0)) {
            throw ParamError("support_fraction must lie in (0.5, 1]");
        }
        auto from_fraction = static_cast<std::size_t>(std::floor(static_cast<double>(m) * *support_fraction));
        h = std::max(h, from_fraction);
    }
    return std::min(h, m);
}

std::vector<std::size_t> c_step(std::span<const Vec2> points, std::span<const std::size_t> subset,
                                std::size_t h) {
    if (h < 3) throw ParamError("c_step: subset size must be at least 3");
    if (h > points.size()) throw ParamError("c_step: subset size exceeds point count");
    for (auto i : subset) {
        if (i >= points.size()) throw ParamError("c_step: subset index out of range");
    }
    auto mom = subset_moments(points, subset);
    Sym2 cov = regularized(mom.cov);
    std::vector<std::pair<double, std::size_t>> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        Vec2 u{points[i][0] - mom.mean[0], points[i][1] - mom.mean[1]};
        d2[i] = {cov.inverse_quadratic(u), i};
    }
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(h - 1), d2.end());
    std::vector<std::size_t> out(h);
    for (std::size_t t = 0; t < h; ++t) out[t] = d2[t].second;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> refine(std::span<const Vec2> points, std::vector<std::size_t> subset,
                                std::size_t max_iterations, std::vector<double>* dets) {
    std::sort(subset.begin(), subset.end());
    double det = subset_det(points, subset);
    if (dets) dets->assign(1, det);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        auto next = c_step(points, subset);
        if (next == subset) break;
        double next_det = subset_det(points, next);
        if (dets) dets->push_back(next_det);
        bool small_change = std::abs(det - next_det) < 1e-12 * std::max(det, 1e-300);
        subset = std::move(next);
        det = next_det;
        if (small_change) break;
    }
    return subset;
}

std::vector<std::size_t> exact_mcd_support(std::span<const Vec2> points, std::size_t h) {
    const std::size_t m = points.size();
    if (m > 20) throw ParamError("exact MCD is limited to 20 points");
    if (h < 3 || h > m) throw ParamError("exact MCD: invalid subset size");
    std::vector<std::size_t> comb(h);
    for (std::size_t i = 0; i < h; ++i) comb[i] = i;
    Candidate best{std::numeric_limits<double>::infinity(), {}};
    while (true) {
        double det = subset_det(points, comb);
        if (det < best.det) best = {det, comb};
        // Next combination in lexicographic order.
        std::size_t i = h;
        while (i > 0 && comb[i - 1] == m - h + (i - 1)) --i;
        if (i == 0) break;
        ++comb[i - 1];
        for (std::size_t j = i; j < h; ++j) comb[j] = comb[j - 1] + 1;
    }
    return best.support;
}

RobustLocationScatter fast_mcd(std::span<const Vec2> points, const McdOptions& options) {
    const std::size_t m = points.size();
    if (m < 5) throw DataError("MCD needs at least 5 points, got " + std::to_string(m));
    for (const auto& p : points) {
        if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw DataError("MCD: non-finite point");
    }
    const std::size_t h = mcd_subset_size(m, options.support_fraction);

    std::vector<std::size_t> support;
    if (options.mode == McdMode::Exact) {
        support = exact_mcd_support(points, h);
    } else {
        Rng rng(options.seed);
        std::vector<std::size_t> pool(m);
        std::vector<Candidate> candidates;
        candidates.reserve(options.n_starts);
        for (std::size_t s = 0; s < options.n_starts; ++s) {
            for (std::size_t i = 0; i < m; ++i) pool[i] = i;
            // Partial Fisher-Yates: pool[0..size) is the random start subset.
            auto draw = [&](std::size_t pos) {
                std::size_t j = pos + uniform_index(rng, m - pos);
                std::swap(pool[pos], pool[j]);
            };
            std::size_t size = 0;
            for (; size < 3; ++size) draw(size);
            while (size < m &&
                   !(subset_moments(points, std::span(pool).first(size)).cov.det() >= kSingularDet)) {
                draw(size++);
            }
            std::vector<std::size_t> start(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
            auto sub = c_step(points, start, h);
            sub = c_step(points, sub);
            candidates.push_back({subset_det(points, sub), std::move(sub)});
        }
        std::sort(candidates.begin(), candidates.end(), candidate_less);
        candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                     [](const Candidate& a, const Candidate& b) {
                                         return a.support == b.support;
                                     }),
                         candidates.end());
        Candidate best{std::numeric_limits<double>::infinity(), {}};
        for (std::size_t c = 0; c < std::min(options.n_refine, candidates.size()); ++c) {
            auto sub = refine(points, candidates[c].support, options.max_iterations);
            Candidate cand{subset_det(points, sub), std::move(sub)};
            if (best.support.empty() || candidate_less(cand, best)) best = std::move(cand);
        }
        support = std::move(best.support);
    }

    RobustLocationScatter out;
    auto mom = subset_moments(points, support);
    out.center = mom.mean;
    out.raw_determinant = mom.cov.det();
    Sym2 cov = regularized(mom.cov, &out.degenerate);
    out.support.assign(m, false);
    for (auto i : support) out.support[i] = true;

    std::vector<double> d2(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec2 u{points[i][0] - mom.mean[0], points[i][1] - mom.mean[1]};
        d2[i] = cov.inverse_quadratic(u);
    }
    double factor = median_of(std::move(d2)) / chi2_2_median();
    if (factor > 0.0 && std::isfinite(factor)) {
        cov.xx *= factor;
        cov.xy *= factor;
        cov.yy *= factor;
    }
    out.scatter = regularized(cov);
    return out;
}

double mahalanobis(const RobustLocationScatter& ls, const Vec2& v) {
    Vec2 u{v[0] - ls.center[0], v[1] - ls.center[1]};
    return std::sqrt(ls.scatter.inverse_quadratic(u));
}

}  // namespace biknn

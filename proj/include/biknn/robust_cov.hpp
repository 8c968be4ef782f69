#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace biknn {

using Vec2 = std::array<double, 2>;

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;

    double det() const { return xx * yy - xy * xy; }
    double trace() const { return xx + yy; }
    double min_eigenvalue() const;
    /// Quadratic form u^T A^{-1} u for u = v - center.
    double inverse_quadratic(const Vec2& u) const;
    std::array<double, 4> row_major() const { return {xx, xy, xy, yy}; }
};

/// Median of the chi-squared distribution with 2 degrees of freedom, 2 ln 2.
double chi2_2_median();

/// Covariance-determinant threshold below which a scatter is regularized.
inline constexpr double kSingularDet = 1e-24;

enum class McdMode { Fast, Exact };

struct McdOptions {
    std::optional<double> support_fraction;  // in (0.5, 1]
    std::uint64_t seed = 0;
    McdMode mode = McdMode::Fast;
    std::size_t n_starts = 500;
    std::size_t n_refine = 10;
    std::size_t max_iterations = 100;
};

/// Robust centre and scatter of the 2D anomaly points.
struct RobustLocationScatter {
    Vec2 center{};
    Sym2 scatter;                 // consistency-rescaled, SPD
    std::vector<bool> support;    // membership in the optimal h-subset
    double raw_determinant = 0.0; // det of the support's unscaled covariance
    bool degenerate = false;      // support covariance was (near) singular
};

/// Mean and (1/h-normalized) covariance of `subset`.
struct SubsetMoments {
    Vec2 mean{};
    Sym2 cov;
};
SubsetMoments subset_moments(std::span<const Vec2> points, std::span<const std::size_t> subset);

/// MCD subset size: max(floor(m * fraction), floor((m + 3) / 2)), capped at m;
/// floor((m + 3) / 2) when no fraction is given.
std::size_t mcd_subset_size(std::size_t m, std::optional<double> support_fraction);

/// One concentration step: fit mean/covariance on `subset`, return the `h`
/// points closest in Mahalanobis distance (sorted ids, ties by id). Never
/// increases the covariance determinant.
std::vector<std::size_t> c_step(std::span<const Vec2> points, std::span<const std::size_t> subset,
                                std::size_t h);
inline std::vector<std::size_t> c_step(std::span<const Vec2> points,
                                       std::span<const std::size_t> subset) {
    return c_step(points, subset, subset.size());
}

/// Repeated C-steps from `subset` until the support stops changing, the
/// relative determinant change falls under 1e-12, or `max_iterations` pass.
/// `dets`, when given, receives the determinant after every step (starting
/// with the input subset's).
std::vector<std::size_t> refine(std::span<const Vec2> points, std::vector<std::size_t> subset,
                                std::size_t max_iterations, std::vector<double>* dets = nullptr);

/// Minimum covariance determinant estimate (FastMCD or exhaustive search).
RobustLocationScatter fast_mcd(std::span<const Vec2> points, const McdOptions& options = {});

/// Exhaustive MCD support (sorted ids), lexicographically smallest among
/// equal-determinant subsets. m <= 20 only.
std::vector<std::size_t> exact_mcd_support(std::span<const Vec2> points, std::size_t h);

double mahalanobis(const RobustLocationScatter& ls, const Vec2& v);

}  // namespace biknn

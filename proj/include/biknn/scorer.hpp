#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biknn/anomaly_space.hpp"
#include "biknn/dataset.hpp"
#include "biknn/robust_cov.hpp"

namespace biknn {

struct BiknnParams {
    std::size_t k = 30;
    PNorm p1{2.0};
    PNorm p2{2.0};
    Aggregator agg_e = Aggregator::Max;
    Aggregator agg_p = Aggregator::Max;
    double w1 = 1.0;
    double w2 = 0.25;
    PNorm wp{2.0};
    double mu = 0.5;
    std::optional<double> support_fraction;
    std::uint64_t seed = 0;
    McdMode mcd_mode = McdMode::Fast;

    /// Throws ParamError when an invariant is violated.
    void validate() const;
    SpaceConfig space_config() const { return {k, p1, p2, agg_e, agg_p}; }
};

/// Named weightings of (w1, w2, mu); other fields keep their defaults.
///   knn    = (1, 0, 0)      classical kth-NN distance
///   biknn1 = (1, 0.25, 0.5)
///   biknn2 = (0.5, 0.5, 0.5)
///   biknn3 = (0, 1, 0)      density anomaly only
BiknnParams preset(const std::string& name);
std::vector<std::string> preset_names();

/// Components of the combined score for one anomaly point.
struct ScoreParts {
    double mahalanobis = 0.0;  // M
    double weighted = 0.0;     // W = ||(w1 k_e, w2 k_p)||_wp
    double combined = 0.0;     // S = mu M + (1 - mu) W
};

/// Fitted bilateral kNN estimator. Immutable after construction; safe to share
/// across threads.
class BiknnModel {
public:
    static BiknnModel fit(const Matrix& train, const BiknnParams& params);
    static BiknnModel fit(const Dataset& train, const BiknnParams& params) {
        return fit(train.features(), params);
    }

    /// Reassembles a model from stored parts (used when loading JSON).
    BiknnModel(AnomalySpace space, std::vector<AnomalyPoint> train_space, RobustLocationScatter robust,
               BiknnParams params);

    const BiknnParams& params() const { return params_; }
    const AnomalySpace& space() const { return space_; }
    const Matrix& training_points() const { return space_.index().points(); }
    const std::vector<AnomalyPoint>& train_space() const { return train_space_; }
    const RobustLocationScatter& robust() const { return robust_; }
    std::size_t dim() const { return space_.index().dim(); }

    /// Coordinates of an unseen point (all training points are neighbour candidates).
    AnomalyPoint anomaly_coords(std::span<const double> x) const;
    ScoreParts score_parts(const AnomalyPoint& v) const;

    double score_point(std::span<const double> x) const;
    std::vector<double> score_all(const Matrix& points) const;
    std::vector<double> score_all(const Dataset& ds) const { return score_all(ds.features()); }
    /// Scores of the training rows from their stored self-excluded coordinates.
    std::vector<double> train_scores() const;

    /// Scores on a resolution x resolution lattice spanning [mins, maxs]
    /// inclusive, row-major with x varying fastest. 2D models only.
    std::vector<double> score_grid(std::array<double, 2> mins, std::array<double, 2> maxs,
                                   std::size_t resolution) const;

private:
    AnomalySpace space_;
    std::vector<AnomalyPoint> train_space_;
    RobustLocationScatter robust_;
    BiknnParams params_;
};

/// The (n - n_outliers)-th smallest score; scores strictly above it are
/// predicted outliers, so ties at the threshold may flag fewer than n_outliers.
double decision_threshold(std::span<const double> scores, std::size_t n_outliers);

}  // namespace biknn

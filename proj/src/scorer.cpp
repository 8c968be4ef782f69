#include "biknn/scorer.hpp"

#include <algorithm>
#include <cmath>

#include "biknn/error.hpp"
#include "biknn/parallel.hpp"

namespace biknn {

void BiknnParams::validate() const {
    if (k == 0) throw ParamError("k must be at least 1");
    if (!(mu >= 0.0 && mu <= 1.0)) throw ParamError("mu must lie in [0, 1]");
    if (!(w1 >= 0.0) || !(w2 >= 0.0) || !std::isfinite(w1) || !std::isfinite(w2)) {
        throw ParamError("w1 and w2 must be finite and non-negative");
    }
    if (w1 == 0.0 && w2 == 0.0 && mu < 1.0) {
        throw ParamError("w1 and w2 cannot both be zero unless mu = 1");
    }
    if (support_fraction && !(*support_fraction > 0.5 && *support_fraction <= 1.0)) {
        throw ParamError("support_fraction must lie in (0.5, 1]");
    }
}

BiknnParams preset(const std::string& name) {
    BiknnParams p;
    if (name == "knn") {
        p.w1 = 1.0, p.w2 = 0.0, p.mu = 0.0;
    } else if (name == "biknn1") {
        p.w1 = 1.0, p.w2 = 0.25, p.mu = 0.5;
    } else if (name == "biknn2") {
        p.w1 = 0.5, p.w2 = 0.5, p.mu = 0.5;
    } else if (name == "biknn3") {
        p.w1 = 0.0, p.w2 = 1.0, p.mu = 0.0;
    } else {
        throw ParamError("unknown preset '" + name + "' (expected knn, biknn1, biknn2 or biknn3)");
    }
    return p;
}

std::vector<std::string> preset_names() { return {"knn", "biknn1", "biknn2", "biknn3"}; }

BiknnModel::BiknnModel(AnomalySpace space, std::vector<AnomalyPoint> train_space,
                       RobustLocationScatter robust, BiknnParams params)
    : space_(std::move(space)),
      train_space_(std::move(train_space)),
      robust_(std::move(robust)),
      params_(params) {
    params_.validate();
    if (train_space_.size() != space_.index().size() || robust_.support.size() != train_space_.size()) {
        throw DataError("model parts disagree on the training size");
    }
}

BiknnModel BiknnModel::fit(const Matrix& train, const BiknnParams& params) {
    params.validate();
    const std::size_t n = train.rows();
    const std::size_t need = std::max<std::size_t>(params.k + 1, 5);
    if (n < need) {
        throw DataError("fit needs at least " + std::to_string(need) + " training points for k=" +
                        std::to_string(params.k) + ", got " + std::to_string(n));
    }
    AnomalySpace space(train, params.space_config());
    auto train_space = space.build();

    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = {train_space[i].k_e, train_space[i].k_p};
    McdOptions opts;
    opts.support_fraction = params.support_fraction;
    opts.seed = params.seed;
    opts.mode = params.mcd_mode;
    auto robust = fast_mcd(pts, opts);
    return BiknnModel(std::move(space), std::move(train_space), std::move(robust), params);
}

AnomalyPoint BiknnModel::anomaly_coords(std::span<const double> x) const {
    if (x.size() != dim()) {
        throw ParamError("point has dimension " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(dim()));
    }
    return space_.coords(x);
}

ScoreParts BiknnModel::score_parts(const AnomalyPoint& v) const {
    ScoreParts s;
    s.mahalanobis = mahalanobis(robust_, {v.k_e, v.k_p});
    const double weighted[2] = {params_.w1 * v.k_e, params_.w2 * v.k_p};
    s.weighted = pnorm(weighted, params_.wp);
    // Endpoints are returned exactly rather than through 0 * x arithmetic.
    if (params_.mu == 1.0) {
        s.combined = s.mahalanobis;
    } else if (params_.mu == 0.0) {
        s.combined = s.weighted;
    } else {
        s.combined = params_.mu * s.mahalanobis + (1.0 - params_.mu) * s.weighted;
    }
    return s;
}

double BiknnModel::score_point(std::span<const double> x) const {
    return score_parts(anomaly_coords(x)).combined;
}

std::vector<double> BiknnModel::score_all(const Matrix& points) const {
    if (points.cols() != dim()) {
        throw ParamError("data has dimension " + std::to_string(points.cols()) + ", model expects " +
                         std::to_string(dim()));
    }
    std::vector<double> out(points.rows());
    parallel_for(points.rows(), [&](std::size_t i) { out[i] = score_point(points.row(i)); });
    return out;
}

std::vector<double> BiknnModel::train_scores() const {
    std::vector<double> out(train_space_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = score_parts(train_space_[i]).combined;
    return out;
}

std::vector<double> BiknnModel::score_grid(std::array<double, 2> mins, std::array<double, 2> maxs,
                                           std::size_t resolution) const {
    if (dim() != 2) throw ParamError("score_grid requires a model fit on 2D data");
    if (resolution < 2) throw ParamError("grid resolution must be at least 2");
    if (!(mins[0] < maxs[0] && mins[1] < maxs[1])) {
        throw ParamError("grid bounds must satisfy min < max on both axes");
    }
    const double step_x = (maxs[0] - mins[0]) / static_cast<double>(resolution - 1);
    const double step_y = (maxs[1] - mins[1]) / static_cast<double>(resolution - 1);
    auto coord = [](double lo, double hi, double step, std::size_t i, std::size_t last) {
        return i == last ? hi : lo + step * static_cast<double>(i);
    };
    std::vector<double> out(resolution * resolution);
    parallel_for(out.size(), [&](std::size_t cell) {
        std::size_t r = cell / resolution, c = cell % resolution;
        const double xy[2] = {coord(mins[0], maxs[0], step_x, c, resolution - 1),
                              coord(mins[1], maxs[1], step_y, r, resolution - 1)};
        out[cell] = score_point(xy);
    });
    return out;
}

double decision_threshold(std::span<const double> scores, std::size_t n_outliers) {
    if (n_outliers == 0 || n_outliers >= scores.size()) {
        throw ParamError("n_outliers must lie in [1, n - 1]");
    }
    std::vector<double> sorted(scores.begin(), scores.end());
    auto nth = sorted.begin() + static_cast<std::ptrdiff_t>(scores.size() - n_outliers - 1);
    std::nth_element(sorted.begin(), nth, sorted.end());
    return *nth;
}

}  // namespace biknn

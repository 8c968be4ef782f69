#include "biknn/anomaly_space.hpp"

#include <algorithm>
#include <numeric>

#include "biknn/error.hpp"
#include "biknn/parallel.hpp"

namespace biknn {

Aggregator parse_aggregator(const std::string& name) {
    if (name == "max") return Aggregator::Max;
    if (name == "mean") return Aggregator::Mean;
    if (name == "median") return Aggregator::Median;
    throw ParamError("unknown aggregator '" + name + "' (expected max, mean or median)");
}

std::string to_string(Aggregator agg) {
    switch (agg) {
        case Aggregator::Max: return "max";
        case Aggregator::Mean: return "mean";
        case Aggregator::Median: return "median";
    }
    return "max";
}

double aggregate(std::span<const double> distances, Aggregator agg) {
    if (distances.empty()) throw ParamError("aggregate: no distances");
    switch (agg) {
        case Aggregator::Max:
            return *std::max_element(distances.begin(), distances.end());
        case Aggregator::Mean:
            return std::accumulate(distances.begin(), distances.end(), 0.0) /
                   static_cast<double>(distances.size());
        case Aggregator::Median: {
            std::vector<double> v(distances.begin(), distances.end());
            std::sort(v.begin(), v.end());
            std::size_t m = v.size() / 2;
            return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
        }
    }
    return 0.0;
}

double spatial_anomaly(const NeighborIndex& index, std::span<const double> x, std::size_t k,
                       Aggregator agg, bool exclude_self) {
    auto nb = index.query(x, k, exclude_self);
    std::vector<double> d(nb.size());
    for (std::size_t i = 0; i < nb.size(); ++i) d[i] = nb[i].distance;
    return aggregate(d, agg);
}

double density_anomaly(const NeighborIndex& index, const EcdfModel& ecdf, std::span<const double> x,
                       std::size_t k, Aggregator agg, PNorm p2, bool exclude_self) {
    if (ecdf.dim() != index.dim()) throw ParamError("density_anomaly: model dimension mismatch");
    auto nb = index.query(x, k, exclude_self);
    auto px = ecdf.project(x);
    std::vector<double> d(nb.size());
    for (std::size_t i = 0; i < nb.size(); ++i) {
        auto pj = ecdf.project(index.points().row(nb[i].id));
        d[i] = minkowski(px, pj, p2);
    }
    return aggregate(d, agg);
}

AnomalySpace::AnomalySpace(const Matrix& train, SpaceConfig config)
    : AnomalySpace(NeighborIndex(train, config.p1), EcdfModel(train), config) {}

AnomalySpace::AnomalySpace(NeighborIndex index, EcdfModel ecdf, SpaceConfig config)
    : index_(std::move(index)), ecdf_(std::move(ecdf)), config_(config) {
    validate();
    const Matrix& pts = index_.points();
    projected_ = Matrix(pts.rows(), pts.cols());
    for (std::size_t i = 0; i < pts.rows(); ++i) ecdf_.project_into(pts.row(i), projected_.row(i));
}

void AnomalySpace::validate() const {
    if (config_.k == 0) throw ParamError("k must be positive");
    if (ecdf_.dim() != index_.dim() || ecdf_.size() != index_.size()) {
        throw ParamError("AnomalySpace: index and ECDF were fit on different data");
    }
    if (!(index_.norm() == config_.p1)) throw ParamError("AnomalySpace: index norm differs from p1");
}

AnomalyPoint AnomalySpace::coords_from(std::span<const double> x,
                                       std::span<const Neighbor> neighbors) const {
    std::vector<double> de(neighbors.size()), dp(neighbors.size());
    std::vector<double> px(x.size());
    ecdf_.project_into(x, px);
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
        de[i] = neighbors[i].distance;
        dp[i] = minkowski(px, projected_.row(neighbors[i].id), config_.p2);
    }
    return {aggregate(de, config_.agg_e), aggregate(dp, config_.agg_p)};
}

AnomalyPoint AnomalySpace::coords(std::span<const double> x) const {
    auto nb = index_.query(x, config_.k, false);
    return coords_from(x, nb);
}

AnomalyPoint AnomalySpace::coords_stored(std::size_t id) const {
    auto nb = index_.query_stored(id, config_.k);
    return coords_from(index_.points().row(id), nb);
}

std::vector<AnomalyPoint> AnomalySpace::build(
    std::vector<std::vector<std::size_t>>* neighborhoods) const {
    const std::size_t n = index_.size();
    if (config_.k >= n) {
        throw DataError("k=" + std::to_string(config_.k) + " needs at least " +
                        std::to_string(config_.k + 1) + " training points, got " + std::to_string(n));
    }
    std::vector<AnomalyPoint> out(n);
    if (neighborhoods) neighborhoods->assign(n, {});
    parallel_for(n, [&](std::size_t i) {
        auto nb = index_.query_stored(i, config_.k);
        out[i] = coords_from(index_.points().row(i), nb);
        if (neighborhoods) {
            auto& ids = (*neighborhoods)[i];
            for (const auto& e : nb) ids.push_back(e.id);
        }
    });
    return out;
}

std::vector<AnomalyPoint> build_space(const Matrix& train, const SpaceConfig& config) {
    if (config.k >= train.rows()) {
        throw DataError("k=" + std::to_string(config.k) + " needs at least " +
                        std::to_string(config.k + 1) + " training points");
    }
    return AnomalySpace(train, config).build();
}

}  // namespace biknn

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "biknn/ecdf.hpp"
#include "biknn/knn.hpp"
#include "biknn/metric.hpp"

namespace biknn {

enum class Aggregator { Max, Mean, Median };

Aggregator parse_aggregator(const std::string& name);
std::string to_string(Aggregator agg);

/// Reduces a non-empty list of neighbour distances. Median of an even count
/// is the mean of the two middle values.
double aggregate(std::span<const double> distances, Aggregator agg);

/// One observation's position in the 2D anomaly space.
struct AnomalyPoint {
    double k_e = 0.0;  // spatial anomaly, original-space units
    double k_p = 0.0;  // density anomaly, ECDF-space units

    friend bool operator==(const AnomalyPoint&, const AnomalyPoint&) = default;
};

struct SpaceConfig {
    std::size_t k = 30;
    PNorm p1{2.0};  // original space
    PNorm p2{2.0};  // ECDF space
    Aggregator agg_e = Aggregator::Max;
    Aggregator agg_p = Aggregator::Max;
};

/// Aggregated original-space distance from `x` to its k nearest neighbours.
double spatial_anomaly(const NeighborIndex& index, std::span<const double> x, std::size_t k,
                       Aggregator agg, bool exclude_self);

/// Aggregated ECDF-space distance from P(x) to P(x_j), where the neighbours x_j
/// are found in the original space (the same set spatial_anomaly uses).
double density_anomaly(const NeighborIndex& index, const EcdfModel& ecdf, std::span<const double> x,
                       std::size_t k, Aggregator agg, PNorm p2, bool exclude_self);

/// Anomaly coordinates computed against a fixed training set. Training
/// projections are cached, so per-query cost is one kNN search plus k short
/// norm evaluations.
class AnomalySpace {
public:
    AnomalySpace(const Matrix& train, SpaceConfig config);
    AnomalySpace(NeighborIndex index, EcdfModel ecdf, SpaceConfig config);

    const NeighborIndex& index() const { return index_; }
    const EcdfModel& ecdf() const { return ecdf_; }
    const SpaceConfig& config() const { return config_; }

    /// Coordinates of an unseen point; every stored point is a candidate neighbour.
    AnomalyPoint coords(std::span<const double> x) const;
    /// Coordinates of stored point `id` with itself excluded from its neighbourhood.
    AnomalyPoint coords_stored(std::size_t id) const;
    /// Coordinates from an explicit neighbour list (the shared neighbourhood).
    AnomalyPoint coords_from(std::span<const double> x, std::span<const Neighbor> neighbors) const;

    /// Self-excluded coordinates for every stored point, in row order. When
    /// `neighborhoods` is non-null it receives each point's neighbour ids.
    std::vector<AnomalyPoint> build(std::vector<std::vector<std::size_t>>* neighborhoods = nullptr) const;

private:
    void validate() const;

    NeighborIndex index_;
    EcdfModel ecdf_;
    SpaceConfig config_;
    Matrix projected_;
};

/// Self-excluded anomaly space of a training matrix (requires k <= n - 1).
std::vector<AnomalyPoint> build_space(const Matrix& train, const SpaceConfig& config);

}  // namespace biknn

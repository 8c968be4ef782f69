#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "biknn/matrix.hpp"
#include "biknn/metric.hpp"

namespace biknn {

struct Neighbor {
    std::size_t id;
    double distance;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Result order: ascending distance, ties by ascending id.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

/// Exact k-nearest-neighbour index over a copy of the training points.
///
/// A kd-tree with axis-aligned bounding boxes per node; pruning uses the
/// Minkowski distance from the query to the box, which never exceeds the
/// distance to any point inside it, so results match an exhaustive scan
/// including the id tie rule.
class NeighborIndex {
public:
    NeighborIndex() = default;
    NeighborIndex(Matrix points, PNorm p);

    std::size_t size() const { return points_.rows(); }
    std::size_t dim() const { return points_.cols(); }
    PNorm norm() const { return p_; }
    const Matrix& points() const { return points_; }

    /// k nearest stored points to `x`. With `exclude_self`, one zero-distance
    /// copy (the lowest id among exact matches) is dropped from the result.
    std::vector<Neighbor> query(std::span<const double> x, std::size_t k, bool exclude_self) const;

    /// k nearest neighbours of stored point `id`, never returning `id` itself.
    std::vector<Neighbor> query_stored(std::size_t id, std::size_t k) const;

private:
    struct Node {
        std::size_t begin = 0, end = 0;  // range into order_
        std::size_t left = 0, right = 0; // child node ids; 0 means leaf
        std::vector<double> lo, hi;
    };

    std::size_t build_node(std::size_t begin, std::size_t end);
    std::vector<Neighbor> search(std::span<const double> x, std::size_t k,
                                 std::optional<std::size_t> skip) const;

    Matrix points_;
    PNorm p_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

NeighborIndex build_index(const Matrix& points, PNorm p);

}  // namespace biknn

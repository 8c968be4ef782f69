#include "biknn/knn.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

namespace biknn {

namespace {

constexpr std::size_t kLeafSize = 16;

}  // namespace

NeighborIndex::NeighborIndex(Matrix points, PNorm p) : points_(std::move(points)), p_(p) {
    if (points_.rows() == 0) throw ParamError("NeighborIndex: no points");
    order_.resize(points_.rows());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * points_.rows() / kLeafSize + 2);
    build_node(0, order_.size());
}

std::size_t NeighborIndex::build_node(std::size_t begin, std::size_t end) {
    const std::size_t d = points_.cols();
    std::size_t id = nodes_.size();
    nodes_.push_back({});
    Node node;
    node.begin = begin;
    node.end = end;
    node.lo.assign(d, std::numeric_limits<double>::infinity());
    node.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (std::size_t t = begin; t < end; ++t) {
        auto r = points_.row(order_[t]);
        for (std::size_t j = 0; j < d; ++j) {
            node.lo[j] = std::min(node.lo[j], r[j]);
            node.hi[j] = std::max(node.hi[j], r[j]);
        }
    }
    if (end - begin > kLeafSize) {
        std::size_t axis = 0;
        double spread = -1.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (node.hi[j] - node.lo[j] > spread) {
                spread = node.hi[j] - node.lo[j];
                axis = j;
            }
        }
        if (spread > 0.0) {
            std::size_t mid = begin + (end - begin) / 2;
            std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                             [&](std::size_t a, std::size_t b) {
                                 double va = points_(a, axis), vb = points_(b, axis);
                                 return va < vb || (va == vb && a < b);
                             });
            node.left = build_node(begin, mid);
            node.right = build_node(mid, end);
        }
    }
    nodes_[id] = std::move(node);
    return id;
}

std::vector<Neighbor> NeighborIndex::search(std::span<const double> x, std::size_t k,
                                            std::optional<std::size_t> skip) const {
    const std::size_t d = points_.cols();
    if (x.size() != d) {
        throw ParamError("knn query: dimension " + std::to_string(x.size()) + " != index dimension " +
                         std::to_string(d));
    }
    // Max-heap on (distance, id): top is the current worst kept neighbour.
    std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(&neighbor_less)> heap(&neighbor_less);
    std::vector<double> gap(d);

    auto box_distance = [&](const Node& node) {
        for (std::size_t j = 0; j < d; ++j) {
            double g = 0.0;
            if (x[j] < node.lo[j]) g = node.lo[j] - x[j];
            else if (x[j] > node.hi[j]) g = x[j] - node.hi[j];
            gap[j] = g;
        }
        return pnorm(gap, p_);
    };

    auto visit = [&](auto&& self, std::size_t node_id) -> void {
        const Node& node = nodes_[node_id];
        if (heap.size() == k && box_distance(node) > heap.top().distance) return;
        if (node.left == 0) {
            for (std::size_t t = node.begin; t < node.end; ++t) {
                std::size_t id = order_[t];
                if (skip && *skip == id) continue;
                Neighbor cand{id, minkowski(x, points_.row(id), p_)};
                if (heap.size() < k) {
                    heap.push(cand);
                } else if (neighbor_less(cand, heap.top())) {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }
        double dl = box_distance(nodes_[node.left]);
        double dr = box_distance(nodes_[node.right]);
        if (dl <= dr) {
            self(self, node.left);
            self(self, node.right);
        } else {
            self(self, node.right);
            self(self, node.left);
        }
    };
    visit(visit, 0);

    std::vector<Neighbor> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = heap.top();
        heap.pop();
    }
    return out;
}

std::vector<Neighbor> NeighborIndex::query(std::span<const double> x, std::size_t k,
                                           bool exclude_self) const {
    const std::size_t n = points_.rows();
    if (k == 0) throw ParamError("knn query: k must be positive");
    if (exclude_self ? k > n - 1 : k > n) {
        throw ParamError("knn query: k=" + std::to_string(k) + " out of range for " +
                         std::to_string(n) + " points" + (exclude_self ? " (self excluded)" : ""));
    }
    if (!exclude_self) return search(x, k, std::nullopt);
    auto res = search(x, k + 1, std::nullopt);
    if (res.front().distance == 0.0) {
        res.erase(res.begin());
    } else {
        res.pop_back();
    }
    return res;
}

std::vector<Neighbor> NeighborIndex::query_stored(std::size_t id, std::size_t k) const {
    const std::size_t n = points_.rows();
    if (id >= n) throw ParamError("knn query: stored id out of range");
    if (k == 0 || k > n - 1) {
        throw ParamError("knn query: k=" + std::to_string(k) + " out of range for " +
                         std::to_string(n) + " points (self excluded)");
    }
    return search(points_.row(id), k, id);
}

NeighborIndex build_index(const Matrix& points, PNorm p) { return NeighborIndex(points, p); }

}  // namespace biknn

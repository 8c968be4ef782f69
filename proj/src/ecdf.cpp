#include "biknn/ecdf.hpp"

#include <algorithm>
#include <string>

#include "biknn/error.hpp"

namespace biknn {

EcdfModel::EcdfModel(const Matrix& points) : n_(points.rows()) {
    if (points.rows() == 0 || points.cols() == 0) throw ParamError("EcdfModel: empty input");
    columns_.assign(points.cols(), std::vector<double>(points.rows()));
    for (std::size_t i = 0; i < points.rows(); ++i) {
        for (std::size_t j = 0; j < points.cols(); ++j) columns_[j][i] = points(i, j);
    }
    for (auto& c : columns_) std::sort(c.begin(), c.end());
}

EcdfModel::EcdfModel(std::vector<std::vector<double>> sorted_columns)
    : columns_(std::move(sorted_columns)) {
    if (columns_.empty() || columns_.front().empty()) throw ParamError("EcdfModel: empty input");
    n_ = columns_.front().size();
    for (const auto& c : columns_) {
        if (c.size() != n_) throw ParamError("EcdfModel: ragged columns");
        if (!std::is_sorted(c.begin(), c.end())) throw ParamError("EcdfModel: column not sorted");
    }
}

double EcdfModel::value(std::size_t j, double x) const {
    if (j >= columns_.size()) {
        throw ParamError("ecdf: dimension " + std::to_string(j) + " out of range");
    }
    const auto& c = columns_[j];
    auto count = std::upper_bound(c.begin(), c.end(), x) - c.begin();
    return static_cast<double>(count) / static_cast<double>(n_);
}

void EcdfModel::project_into(std::span<const double> x, std::span<double> out) const {
    if (x.size() != columns_.size() || out.size() != columns_.size()) {
        throw ParamError("ecdf project: dimension mismatch");
    }
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = value(j, x[j]);
}

std::vector<double> EcdfModel::project(std::span<const double> x) const {
    std::vector<double> out(x.size());
    project_into(x, out);
    return out;
}

}  // namespace biknn

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "biknn/matrix.hpp"

namespace biknn {

/// Per-dimension empirical CDFs of a training matrix.
///
/// F_j(x) = #{training values in column j that are <= x} / n, a right-continuous
/// step function; repeated values step by multiplicity / n. Queries below the
/// column minimum give 0, at or above the maximum give 1.
class EcdfModel {
public:
    EcdfModel() = default;
    explicit EcdfModel(const Matrix& points);
    EcdfModel(std::vector<std::vector<double>> sorted_columns);

    std::size_t dim() const { return columns_.size(); }
    std::size_t size() const { return n_; }
    const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }

    double value(std::size_t j, double x) const;

    /// Image of `x` in ECDF space: component j is value(j, x_j).
    std::vector<double> project(std::span<const double> x) const;
    void project_into(std::span<const double> x, std::span<double> out) const;

private:
    std::vector<std::vector<double>> columns_;
    std::size_t n_ = 0;
};

inline EcdfModel fit_ecdf(const Matrix& points) { return EcdfModel(points); }

}  // namespace biknn

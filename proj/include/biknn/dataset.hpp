#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biknn/matrix.hpp"

namespace biknn {

/// n x d matrix of finite features with optional 0/1 outlier labels (1 = outlier).
///
/// Construction validates the invariants: n >= 1, d >= 1, all entries finite,
/// labels (if any) have length n and values in {0, 1}.
class Dataset {
public:
    Dataset(Matrix features, std::optional<std::vector<int>> labels = std::nullopt,
            std::vector<std::string> feature_names = {});

    const Matrix& features() const { return features_; }
    const std::optional<std::vector<int>>& labels() const { return labels_; }
    const std::vector<std::string>& feature_names() const { return names_; }

    std::size_t size() const { return features_.rows(); }
    std::size_t dim() const { return features_.cols(); }
    bool labeled() const { return labels_.has_value(); }

    /// Rows `ids` in the given order, labels carried along.
    Dataset subset(std::span<const std::size_t> ids) const;

private:
    Matrix features_;
    std::optional<std::vector<int>> labels_;
    std::vector<std::string> names_;
};

/// Reads a headered, comma-separated numeric CSV. `label_column`, when given,
/// is removed from the features and parsed as exact "0"/"1" values.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = std::nullopt);

/// Parses CSV text already in memory; `source` names it in error messages.
Dataset parse_csv(const std::string& text,
                  const std::optional<std::string>& label_column = std::nullopt,
                  const std::string& source = "<memory>");

/// Writes features (17 significant digits, so reload is exact) and, if present,
/// a trailing `label` column.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded train/test partition of row indices. |train| = round(fraction * n).
/// With labels and `stratified`, per-class counts are apportioned by largest
/// remainder so the class proportions are kept as closely as the total allows.
SplitIndices split_indices(const Dataset& ds, double train_fraction, std::uint64_t seed,
                           bool stratified = true);

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed,
                                  bool stratified = true);

}  // namespace biknn

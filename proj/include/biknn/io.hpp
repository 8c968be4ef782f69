#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "biknn/classify.hpp"
#include "biknn/scorer.hpp"

namespace biknn {

inline constexpr const char* kModelFormat = "biknn-model/1";

/// Fixed-width number format used by every CSV export (9 significant digits).
std::string format_number(double v);

nlohmann::json params_to_json(const BiknnParams& p);
/// Overlays fields present in `j` on `base`; unknown keys are ignored.
BiknnParams params_from_json(const nlohmann::json& j, BiknnParams base = {});

/// Self-contained model document: params, robust centre/scatter, the training
/// anomaly space, ECDF columns and training matrix.
nlohmann::json model_to_json(const BiknnModel& model);
BiknnModel model_from_json(const nlohmann::json& j);
void save_model(const BiknnModel& model, const std::filesystem::path& path);
BiknnModel load_model(const std::filesystem::path& path);

/// `id,k_e,k_p`
std::string space_csv(std::span<const AnomalyPoint> space);
/// `id,k_e,k_p,type`
std::string classification_csv(std::span<const AnomalyPoint> space, std::span<const OutlierType> types);
/// `id,score`, or `id,score,is_outlier` when a threshold is given.
std::string scores_csv(std::span<const double> scores, std::optional<double> threshold = std::nullopt);
/// Two comment lines `# xmin xmax ymin ymax` and `# resolution`, then one CSV
/// row per grid row.
std::string grid_csv(std::span<const double> grid, std::array<double, 2> mins, std::array<double, 2> maxs,
                     std::size_t resolution);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace biknn

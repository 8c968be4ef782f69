#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "biknn/anomaly_space.hpp"

namespace biknn {

/// Region of the anomaly space split by one threshold per axis.
///   TypeI:   high spatial and high density anomaly
///   TypeII:  high spatial anomaly only
///   TypeIII: high density anomaly only
enum class OutlierType { Normal, TypeI, TypeII, TypeIII };

/// "normal", "I", "II", "III".
std::string to_string(OutlierType t);

struct AxisThresholds {
    double t_e = 0.0;
    double t_p = 0.0;
};

/// m-th largest k_e and m-th largest k_p. A coordinate is "above" when >= its
/// threshold, so all values tied at the threshold count as above.
AxisThresholds axis_thresholds(std::span<const AnomalyPoint> space, std::size_t m);

std::vector<OutlierType> classify(std::span<const AnomalyPoint> space, const AxisThresholds& t);
std::vector<OutlierType> classify(std::span<const AnomalyPoint> space, std::size_t m);

struct TypeCounts {
    std::size_t normal = 0, type_i = 0, type_ii = 0, type_iii = 0;
};
TypeCounts count_types(std::span<const OutlierType> types);

}  // namespace biknn

#include "biknn/classify.hpp"

#include <algorithm>
#include <functional>

#include "biknn/error.hpp"

namespace biknn {

std::string to_string(OutlierType t) {
    switch (t) {
        case OutlierType::Normal: return "normal";
        case OutlierType::TypeI: return "I";
        case OutlierType::TypeII: return "II";
        case OutlierType::TypeIII: return "III";
    }
    return "normal";
}

AxisThresholds axis_thresholds(std::span<const AnomalyPoint> space, std::size_t m) {
    if (m == 0 || m >= space.size()) {
        throw ParamError("number of outliers m must lie in [1, n - 1]");
    }
    auto mth_largest = [&](auto field) {
        std::vector<double> v(space.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = space[i].*field;
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m - 1), v.end(),
                         std::greater<>());
        return v[m - 1];
    };
    return {mth_largest(&AnomalyPoint::k_e), mth_largest(&AnomalyPoint::k_p)};
}

std::vector<OutlierType> classify(std::span<const AnomalyPoint> space, const AxisThresholds& t) {
    std::vector<OutlierType> out(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        bool spatial = space[i].k_e >= t.t_e;
        bool density = space[i].k_p >= t.t_p;
        out[i] = spatial ? (density ? OutlierType::TypeI : OutlierType::TypeII)
                         : (density ? OutlierType::TypeIII : OutlierType::Normal);
    }
    return out;
}

std::vector<OutlierType> classify(std::span<const AnomalyPoint> space, std::size_t m) {
    return classify(space, axis_thresholds(space, m));
}

TypeCounts count_types(std::span<const OutlierType> types) {
    TypeCounts c;
    for (auto t : types) {
        switch (t) {
            case OutlierType::Normal: ++c.normal; break;
            case OutlierType::TypeI: ++c.type_i; break;
            case OutlierType::TypeII: ++c.type_ii; break;
            case OutlierType::TypeIII: ++c.type_iii; break;
        }
    }
    return c;
}

}  // namespace biknn

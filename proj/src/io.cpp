#include "biknn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "biknn/error.hpp"

namespace biknn {

using nlohmann::json;

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

json norm_to_json(PNorm p) {
    if (p.is_infinity()) return "inf";
    return p.p();
}

PNorm norm_from_json(const json& j) {
    if (j.is_string()) return PNorm::parse(j.get<std::string>());
    return PNorm(j.get<double>());
}

}  // namespace

json params_to_json(const BiknnParams& p) {
    json j{{"k", p.k},
           {"p1", norm_to_json(p.p1)},
           {"p2", norm_to_json(p.p2)},
           {"agg_e", to_string(p.agg_e)},
           {"agg_p", to_string(p.agg_p)},
           {"w1", p.w1},
           {"w2", p.w2},
           {"wp", norm_to_json(p.wp)},
           {"mu", p.mu},
           {"seed", p.seed},
           {"mcd_mode", p.mcd_mode == McdMode::Exact ? "exact" : "fast"}};
    j["support_fraction"] = p.support_fraction ? json(*p.support_fraction) : json(nullptr);
    return j;
}

BiknnParams params_from_json(const json& j, BiknnParams p) {
    if (!j.is_object()) throw ParamError("params must be a JSON object");
    try {
        if (j.contains("k")) {
            auto k = j.at("k").get<long long>();
            if (k < 1) throw ParamError("k must be at least 1");
            p.k = static_cast<std::size_t>(k);
        }
        if (j.contains("p1")) p.p1 = norm_from_json(j.at("p1"));
        if (j.contains("p2")) p.p2 = norm_from_json(j.at("p2"));
        if (j.contains("agg")) p.agg_e = p.agg_p = parse_aggregator(j.at("agg").get<std::string>());
        if (j.contains("agg_e")) p.agg_e = parse_aggregator(j.at("agg_e").get<std::string>());
        if (j.contains("agg_p")) p.agg_p = parse_aggregator(j.at("agg_p").get<std::string>());
        if (j.contains("w1")) p.w1 = j.at("w1").get<double>();
        if (j.contains("w2")) p.w2 = j.at("w2").get<double>();
        if (j.contains("wp")) p.wp = norm_from_json(j.at("wp"));
        if (j.contains("mu")) p.mu = j.at("mu").get<double>();
        if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("support_fraction")) {
            const auto& sf = j.at("support_fraction");
            p.support_fraction = sf.is_null() ? std::nullopt : std::optional<double>(sf.get<double>());
        }
        if (j.contains("mcd_mode")) {
            auto mode = j.at("mcd_mode").get<std::string>();
            if (mode != "fast" && mode != "exact") throw ParamError("mcd_mode must be fast or exact");
            p.mcd_mode = mode == "exact" ? McdMode::Exact : McdMode::Fast;
        }
    } catch (const json::exception& e) {
        throw ParamError(std::string("bad parameter value: ") + e.what());
    }
    p.validate();
    return p;
}

json model_to_json(const BiknnModel& model) {
    const auto& robust = model.robust();
    const auto& pts = model.training_points();
    json space = json::array();
    for (const auto& v : model.train_space()) space.push_back({v.k_e, v.k_p});
    json support = json::array();
    for (std::size_t i = 0; i < robust.support.size(); ++i) {
        if (robust.support[i]) support.push_back(i);
    }
    json ecdf = json::array();
    for (std::size_t j = 0; j < model.space().ecdf().dim(); ++j) ecdf.push_back(model.space().ecdf().column(j));
    json train = json::array();
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        auto r = pts.row(i);
        train.push_back(std::vector<double>(r.begin(), r.end()));
    }
    auto sc = robust.scatter.row_major();
    return json{{"version", kModelFormat},
                {"params", params_to_json(model.params())},
                {"center", {robust.center[0], robust.center[1]}},
                {"scatter", {sc[0], sc[1], sc[2], sc[3]}},
                {"raw_determinant", robust.raw_determinant},
                {"degenerate", robust.degenerate},
                {"support", support},
                {"train_space", space},
                {"ecdf", ecdf},
                {"training", train}};
}

BiknnModel model_from_json(const json& j) {
    try {
        if (j.value("version", std::string()) != kModelFormat) {
            throw DataError(std::string("unsupported model version (expected ") + kModelFormat + ")");
        }
        auto params = params_from_json(j.at("params"));

        const auto& train = j.at("training");
        Matrix points;
        for (const auto& row : train) points.append_row(row.get<std::vector<double>>());
        auto columns = j.at("ecdf").get<std::vector<std::vector<double>>>();
        EcdfModel ecdf(std::move(columns));
        if (ecdf.dim() != points.cols() || ecdf.size() != points.rows()) {
            throw DataError("model ECDF does not match the training matrix");
        }

        std::vector<AnomalyPoint> space;
        for (const auto& v : j.at("train_space")) space.push_back({v.at(0).get<double>(), v.at(1).get<double>()});

        RobustLocationScatter robust;
        robust.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
        auto sc = j.at("scatter").get<std::vector<double>>();
        if (sc.size() != 4 || sc[1] != sc[2]) throw DataError("model scatter must be a symmetric 2x2 matrix");
        robust.scatter = {sc[0], sc[1], sc[3]};
        if (!(robust.scatter.min_eigenvalue() > 0.0)) throw DataError("model scatter is not positive definite");
        robust.raw_determinant = j.value("raw_determinant", 0.0);
        robust.degenerate = j.value("degenerate", false);
        robust.support.assign(points.rows(), false);
        for (const auto& id : j.at("support")) {
            auto i = id.get<std::size_t>();
            if (i >= points.rows()) throw DataError("model support id out of range");
            robust.support[i] = true;
        }

        NeighborIndex index(std::move(points), params.p1);
        AnomalySpace anomaly_space(std::move(index), std::move(ecdf), params.space_config());
        return BiknnModel(std::move(anomaly_space), std::move(space), std::move(robust), params);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("failed writing " + path.string());
}

void save_model(const BiknnModel& model, const std::filesystem::path& path) {
    write_text(path, model_to_json(model).dump(1) + "\n");
}

BiknnModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

std::string space_csv(std::span<const AnomalyPoint> space) {
    std::string out = "id,k_e,k_p\n";
    for (std::size_t i = 0; i < space.size(); ++i) {
        out += std::to_string(i) + ',' + format_number(space[i].k_e) + ',' + format_number(space[i].k_p) + '\n';
    }
    return out;
}

std::string classification_csv(std::span<const AnomalyPoint> space, std::span<const OutlierType> types) {
    if (space.size() != types.size()) throw ParamError("classification size mismatch");
    std::string out = "id,k_e,k_p,type\n";
    for (std::size_t i = 0; i < space.size(); ++i) {
        out += std::to_string(i) + ',' + format_number(space[i].k_e) + ',' + format_number(space[i].k_p) + ',' +
               to_string(types[i]) + '\n';
    }
    return out;
}

std::string scores_csv(std::span<const double> scores, std::optional<double> threshold) {
    std::string out = threshold ? "id,score,is_outlier\n" : "id,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out += std::to_string(i) + ',' + format_number(scores[i]);
        if (threshold) out += scores[i] > *threshold ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

std::string grid_csv(std::span<const double> grid, std::array<double, 2> mins, std::array<double, 2> maxs,
                     std::size_t resolution) {
    if (grid.size() != resolution * resolution) throw ParamError("grid size mismatch");
    std::string out = "# " + format_number(mins[0]) + ' ' + format_number(maxs[0]) + ' ' +
                      format_number(mins[1]) + ' ' + format_number(maxs[1]) + '\n';
    out += "# " + std::to_string(resolution) + '\n';
    for (std::size_t r = 0; r < resolution; ++r) {
        for (std::size_t c = 0; c < resolution; ++c) {
            if (c) out += ',';
            out += format_number(grid[r * resolution + c]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace biknn

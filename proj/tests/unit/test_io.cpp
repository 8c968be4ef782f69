#include <doctest.h>

#include <filesystem>

#include "biknn/io.hpp"
#include "synth.hpp"

using namespace biknn;

TEST_CASE("model JSON round trip scores identically") {
    auto ds = synth::two_gaussians(17, 100, 100, 5);
    BiknnParams p = preset("biknn2");
    p.k = 15;
    p.p2 = PNorm::infinity();
    p.agg_p = Aggregator::Median;
    p.support_fraction = 0.75;
    auto model = BiknnModel::fit(ds, p);

    auto path = std::filesystem::temp_directory_path() / "biknn_model.json";
    save_model(model, path);
    auto back = load_model(path);
    std::filesystem::remove(path);

    auto j = model_to_json(model);
    CHECK(j["version"] == "biknn-model/1");
    CHECK(j["scatter"].size() == 4);
    CHECK(back.params().k == 15);
    CHECK(back.params().p2.is_infinity());
    CHECK(back.params().agg_p == Aggregator::Median);
    CHECK(back.params().support_fraction == 0.75);
    CHECK(back.train_space() == model.train_space());
    CHECK(back.robust().support == model.robust().support);

    synth::Gen g(3);
    auto q = synth::random_matrix(g, 50, 2, -4, 10);
    CHECK(back.score_all(q) == model.score_all(q));
    CHECK(back.train_scores() == model.train_scores());
}

TEST_CASE("malformed model documents") {
    CHECK_THROWS_AS(model_from_json(nlohmann::json{{"version", "other"}}), DataError);
    auto ds = synth::two_gaussians(2, 50, 50, 2);
    auto j = model_to_json(BiknnModel::fit(ds, preset("biknn1")));
    j["scatter"] = {1, 2, 3, 4};
    CHECK_THROWS_AS(model_from_json(j), DataError);
    j.erase("scatter");
    CHECK_THROWS_AS(model_from_json(j), DataError);
}

TEST_CASE("params JSON overlay") {
    auto base = preset("biknn1");
    auto p = params_from_json(nlohmann::json{{"mu", 1.0}, {"agg", "mean"}}, base);
    CHECK(p.mu == 1.0);
    CHECK(p.w1 == 1.0);
    CHECK(p.agg_e == Aggregator::Mean);
    CHECK(p.agg_p == Aggregator::Mean);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"mu", 1.5}}, base), ParamError);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"k", "ten"}}, base), ParamError);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"k", 0}}, base), ParamError);
}

TEST_CASE("CSV exports") {
    std::vector<AnomalyPoint> s{{1.5, 0.25}, {0.1234567891234, 2}};
    CHECK(space_csv(s) == "id,k_e,k_p\n0,1.5,0.25\n1,0.123456789,2\n");
    std::vector<OutlierType> t{OutlierType::TypeII, OutlierType::Normal};
    CHECK(classification_csv(s, t) == "id,k_e,k_p,type\n0,1.5,0.25,II\n1,0.123456789,2,normal\n");
    std::vector<double> sc{1, 3, 2};
    CHECK(scores_csv(sc) == "id,score\n0,1\n1,3\n2,2\n");
    CHECK(scores_csv(sc, 2.0) == "id,score,is_outlier\n0,1,0\n1,3,1\n2,2,0\n");
    std::vector<double> grid{1, 2, 3, 4};
    CHECK(grid_csv(grid, {0, 0}, {1, 2}, 2) == "# 0 1 0 2\n# 2\n1,2\n3,4\n");
}

#include "biknn/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "biknn/error.hpp"

namespace biknn {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ParamError("scores and labels differ in length");
    for (int l : labels) {
        if (l != 0 && l != 1) throw ParamError("labels must be 0 or 1");
    }
}

// Indices ordered by descending score, ties by ascending index.
std::vector<std::size_t> ranking(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::uint64_t pos = 0, neg = 0, favorable = 0, ties = 0;
    std::uint64_t neg_below = 0;
    for (std::size_t s = 0; s < order.size();) {
        std::size_t e = s;
        std::uint64_t gp = 0, gn = 0;
        while (e < order.size() && scores[order[e]] == scores[order[s]]) {
            (labels[order[e]] ? gp : gn) += 1;
            ++e;
        }
        favorable += gp * neg_below;
        ties += gp * gn;
        neg_below += gn;
        pos += gp;
        neg += gn;
        s = e;
    }
    if (pos == 0 || neg == 0) throw DataError("roc_auc needs both classes present");
    return (static_cast<double>(favorable) + 0.5 * static_cast<double>(ties)) /
           (static_cast<double>(pos) * static_cast<double>(neg));
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    std::size_t total_pos = std::count(labels.begin(), labels.end(), 1);
    if (total_pos == 0) throw DataError("average_precision needs at least one positive");
    auto order = ranking(scores);
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (labels[order[r]]) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(total_pos);
}

double precision_at_n(std::span<const double> scores, std::span<const int> labels, std::size_t n_top) {
    check_inputs(scores, labels);
    if (n_top == 0 || n_top > scores.size()) throw ParamError("precision_at_n: n_top out of range");
    auto order = ranking(scores);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < n_top; ++r) hits += labels[order[r]];
    return static_cast<double>(hits) / static_cast<double>(n_top);
}

std::vector<TrialReport> run_benchmark(std::span<const NamedDataset> datasets,
                                       std::span<const NamedParams> params_list,
                                       const BenchmarkOptions& options) {
    if (options.trials == 0) throw ParamError("trials must be at least 1");
    std::vector<TrialReport> reports;
    for (const auto& ds : datasets) {
        if (!ds.data.labeled()) throw DataError("benchmark dataset '" + ds.name + "' has no labels");
        for (const auto& np : params_list) {
            TrialReport rep;
            rep.dataset = ds.name;
            rep.params = np.name;
            for (std::size_t t = 0; t < options.trials; ++t) {
                const std::uint64_t seed = options.base_seed + t;
                auto [train, test] = split(ds.data, options.train_fraction, seed, options.stratified);
                BiknnParams params = np.params;
                params.seed = seed;
                if (train.size() < std::max<std::size_t>(params.k + 1, 5)) {
                    throw DataError("dataset '" + ds.name + "': training split of " +
                                    std::to_string(train.size()) + " rows is too small for k=" +
                                    std::to_string(params.k));
                }
                auto start = std::chrono::steady_clock::now();
                auto model = BiknnModel::fit(train, params);
                auto scores = model.score_all(test);
                auto stop = std::chrono::steady_clock::now();

                const auto& labels = *test.labels();
                std::size_t n_pos = std::count(labels.begin(), labels.end(), 1);
                if (n_pos == 0 || n_pos == labels.size()) {
                    throw DataError("dataset '" + ds.name + "': test split lacks one of the classes");
                }
                rep.seeds.push_back(seed);
                rep.roc_auc.push_back(roc_auc(scores, labels));
                rep.ap.push_back(average_precision(scores, labels));
                rep.precision_at_n.push_back(precision_at_n(scores, labels, n_pos));
                rep.seconds.push_back(options.measure_time
                                          ? std::chrono::duration<double>(stop - start).count()
                                          : 0.0);
            }
            rep.mean_roc_auc = mean(rep.roc_auc);
            rep.mean_ap = mean(rep.ap);
            rep.mean_precision_at_n = mean(rep.precision_at_n);
            rep.mean_seconds = mean(rep.seconds);
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

std::string report_csv(std::span<const TrialReport> reports) {
    std::string out = "dataset,params,roc_auc,ap,precision_at_n,seconds\n";
    for (const auto& r : reports) {
        out += r.dataset + ',' + r.params + ',' + fmt9(r.mean_roc_auc) + ',' + fmt9(r.mean_ap) + ',' +
               fmt9(r.mean_precision_at_n) + ',' + fmt9(r.mean_seconds) + '\n';
    }
    return out;
}

std::string report_json(std::span<const TrialReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back({{"dataset", r.dataset},
                       {"params", r.params},
                       {"seeds", r.seeds},
                       {"roc_auc", r.roc_auc},
                       {"ap", r.ap},
                       {"precision_at_n", r.precision_at_n},
                       {"seconds", r.seconds},
                       {"mean",
                        {{"roc_auc", r.mean_roc_auc},
                         {"ap", r.mean_ap},
                         {"precision_at_n", r.mean_precision_at_n},
                         {"seconds", r.mean_seconds}}}});
    }
    return nlohmann::json{{"reports", arr}}.dump(2) + "\n";
}

}  // namespace biknn

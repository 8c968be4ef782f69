#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biknn/dataset.hpp"
#include "biknn/scorer.hpp"

namespace biknn {

/// Tie-corrected Mann-Whitney estimate: (#(pos > neg) + 0.5 #(pos = neg)) / (P N).
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Step-wise average precision over the ranking by descending score (ties by
/// ascending index): sum over positives of the precision at their rank, / P.
double average_precision(std::span<const double> scores, std::span<const int> labels);

/// Fraction of positives among the n_top highest scores (ties by ascending index).
double precision_at_n(std::span<const double> scores, std::span<const int> labels, std::size_t n_top);

struct NamedDataset {
    std::string name;
    Dataset data;
};

struct NamedParams {
    std::string name;
    BiknnParams params;
};

struct BenchmarkOptions {
    std::size_t trials = 10;
    double train_fraction = 0.6;
    std::uint64_t base_seed = 0;
    bool stratified = true;
    bool measure_time = false;  // wall-clock seconds are reported as 0 otherwise
};

struct TrialReport {
    std::string dataset;
    std::string params;
    std::vector<std::uint64_t> seeds;
    std::vector<double> roc_auc;
    std::vector<double> ap;
    std::vector<double> precision_at_n;  // n_top = number of test outliers
    std::vector<double> seconds;
    double mean_roc_auc = 0.0;
    double mean_ap = 0.0;
    double mean_precision_at_n = 0.0;
    double mean_seconds = 0.0;
};

/// For every (dataset, params) pair and trial t: split with seed base_seed + t,
/// fit on train, score test, record metrics.
std::vector<TrialReport> run_benchmark(std::span<const NamedDataset> datasets,
                                       std::span<const NamedParams> params_list,
                                       const BenchmarkOptions& options);

std::string report_csv(std::span<const TrialReport> reports);
std::string report_json(std::span<const TrialReport> reports);

}  // namespace biknn

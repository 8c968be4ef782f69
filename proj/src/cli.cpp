#include "biknn/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "biknn/classify.hpp"
#include "biknn/dataset.hpp"
#include "biknn/error.hpp"
#include "biknn/eval.hpp"
#include "biknn/io.hpp"
#include "biknn/scorer.hpp"
#include "biknn/server.hpp"

namespace biknn {

namespace {

struct CliConfig {
    std::vector<std::string> inputs;
    std::optional<std::string> labels;
    std::optional<std::string> output;
    std::optional<std::string> model_path;
    std::optional<std::string> space_output;
    std::optional<std::string> report_json;
    std::optional<std::string> static_dir;

    std::size_t k = 30;
    std::string p1 = "2", p2 = "2", wp = "2";
    std::string agg = "max";
    std::optional<std::string> agg_e, agg_p;
    std::optional<double> w1, w2, mu;
    std::vector<std::string> presets;
    std::optional<double> support_fraction;
    std::uint64_t seed = 0;
    bool exact_mcd = false;

    std::optional<std::size_t> n_outliers;
    std::size_t trials = 10;
    double train_fraction = 0.6;
    bool no_stratify = false;
    bool timing = false;
    std::size_t resolution = 100;
    std::vector<double> bounds;
    std::string host = "127.0.0.1";
    int port = 8080;
};

void add_param_flags(CLI::App* cmd, CliConfig& c, bool multi_preset) {
    cmd->add_option("--k", c.k, "Number of nearest neighbours")->check(CLI::PositiveNumber);
    cmd->add_option("--p1", c.p1, "Minkowski p in the original space (number >= 1 or inf)");
    cmd->add_option("--p2", c.p2, "Minkowski p in ECDF space (number >= 1 or inf)");
    cmd->add_option("--agg", c.agg, "Neighbour distance aggregator for both axes: max, mean or median");
    cmd->add_option("--agg-e", c.agg_e, "Aggregator override for the spatial axis");
    cmd->add_option("--agg-p", c.agg_p, "Aggregator override for the density axis");
    auto* w1 = cmd->add_option("--w1", c.w1, "Weight of the spatial anomaly");
    auto* w2 = cmd->add_option("--w2", c.w2, "Weight of the density anomaly");
    auto* mu = cmd->add_option("--mu", c.mu, "Mahalanobis share of the combined score, in [0, 1]");
    cmd->add_option("--wp", c.wp, "p of the weighted norm");
    auto* preset = cmd->add_option("--preset", c.presets, "Named weighting: knn, biknn1, biknn2, biknn3");
    if (!multi_preset) preset->expected(1);
    preset->excludes(w1)->excludes(w2)->excludes(mu);
    cmd->add_option("--support-fraction", c.support_fraction, "MCD support fraction in (0.5, 1]");
    cmd->add_option("--seed", c.seed, "Random seed");
    cmd->add_flag("--exact-mcd", c.exact_mcd, "Exhaustive MCD search (at most 20 training points)");
}

BiknnParams base_params(const CliConfig& c, const std::optional<std::string>& preset_name) {
    BiknnParams p = preset_name ? preset(*preset_name) : BiknnParams{};
    if (c.w1) p.w1 = *c.w1;
    if (c.w2) p.w2 = *c.w2;
    if (c.mu) p.mu = *c.mu;
    p.k = c.k;
    p.p1 = PNorm::parse(c.p1);
    p.p2 = PNorm::parse(c.p2);
    p.wp = PNorm::parse(c.wp);
    p.agg_e = p.agg_p = parse_aggregator(c.agg);
    if (c.agg_e) p.agg_e = parse_aggregator(*c.agg_e);
    if (c.agg_p) p.agg_p = parse_aggregator(*c.agg_p);
    p.support_fraction = c.support_fraction;
    p.seed = c.seed;
    p.mcd_mode = c.exact_mcd ? McdMode::Exact : McdMode::Fast;
    p.validate();
    return p;
}

BiknnParams single_params(const CliConfig& c) {
    return base_params(c, c.presets.empty() ? std::nullopt : std::optional(c.presets.front()));
}

void emit(const CliConfig& c, std::ostream& out, const std::string& text) {
    if (c.output) {
        write_text(*c.output, text);
    } else {
        out << text;
    }
}

Dataset load_single(const CliConfig& c) {
    if (c.inputs.size() != 1) throw ParamError("exactly one --input is required");
    return load_csv(c.inputs.front(), c.labels);
}

int cmd_fit(const CliConfig& c, std::ostream& out) {
    auto ds = load_single(c);
    auto model = BiknnModel::fit(ds, single_params(c));
    emit(c, out, model_to_json(model).dump(1) + "\n");
    if (c.space_output) write_text(*c.space_output, space_csv(model.train_space()));
    return 0;
}

int cmd_score(const CliConfig& c, std::ostream& out) {
    auto ds = load_single(c);
    std::vector<double> scores;
    if (c.model_path) {
        auto model = load_model(*c.model_path);
        scores = model.score_all(ds);
    } else {
        scores = BiknnModel::fit(ds, single_params(c)).train_scores();
    }
    std::optional<double> threshold;
    if (c.n_outliers) threshold = decision_threshold(scores, *c.n_outliers);
    emit(c, out, scores_csv(scores, threshold));
    return 0;
}

int cmd_classify(const CliConfig& c, std::ostream& out) {
    if (!c.n_outliers) throw ParamError("classify requires --n-outliers");
    auto ds = load_single(c);
    auto model = BiknnModel::fit(ds, single_params(c));
    auto types = classify(model.train_space(), *c.n_outliers);
    emit(c, out, classification_csv(model.train_space(), types));
    return 0;
}

int cmd_grid(const CliConfig& c, std::ostream& out) {
    auto ds = load_single(c);
    if (ds.dim() != 2) throw DataError("grid needs 2D data, got " + std::to_string(ds.dim()) + " columns");
    auto model = BiknnModel::fit(ds, single_params(c));
    std::array<double, 2> lo{}, hi{};
    if (!c.bounds.empty()) {
        if (c.bounds.size() != 4) throw ParamError("--bounds takes xmin xmax ymin ymax");
        lo = {c.bounds[0], c.bounds[2]};
        hi = {c.bounds[1], c.bounds[3]};
    } else {
        const auto& f = ds.features();
        lo = {f(0, 0), f(0, 1)};
        hi = lo;
        for (std::size_t i = 0; i < f.rows(); ++i) {
            for (std::size_t j = 0; j < 2; ++j) {
                lo[j] = std::min(lo[j], f(i, j));
                hi[j] = std::max(hi[j], f(i, j));
            }
        }
        for (std::size_t j = 0; j < 2; ++j) {
            double pad = hi[j] > lo[j] ? 0.05 * (hi[j] - lo[j]) : 1.0;
            lo[j] -= pad;
            hi[j] += pad;
        }
    }
    auto grid = model.score_grid(lo, hi, c.resolution);
    emit(c, out, grid_csv(grid, lo, hi, c.resolution));
    return 0;
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<std::string> paths;
    for (const auto& in : inputs) {
        std::filesystem::path p(in);
        if (p.extension() == ".csv") {
            paths.push_back(in);
            continue;
        }
        // Anything else is a list file: one dataset path per line, relative to the list.
        std::ifstream list(p);
        if (!list) throw DataError("cannot open dataset list " + in);
        std::string line;
        while (std::getline(list, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::filesystem::path entry(line);
            paths.push_back((entry.is_absolute() ? entry : p.parent_path() / entry).string());
        }
    }
    return paths;
}

int cmd_bench(const CliConfig& c, std::ostream& out) {
    if (!c.labels) throw ParamError("bench requires --labels");
    std::vector<NamedDataset> datasets;
    for (const auto& path : expand_inputs(c.inputs)) {
        datasets.push_back({std::filesystem::path(path).stem().string(), load_csv(path, c.labels)});
    }
    if (datasets.empty()) throw ParamError("bench needs at least one dataset");

    std::vector<NamedParams> params;
    if (!c.presets.empty()) {
        for (const auto& name : c.presets) params.push_back({name, base_params(c, name)});
    } else if (c.w1 || c.w2 || c.mu) {
        params.push_back({"custom", base_params(c, std::nullopt)});
    } else {
        for (const auto& name : preset_names()) params.push_back({name, base_params(c, name)});
    }

    BenchmarkOptions opts;
    opts.trials = c.trials;
    opts.train_fraction = c.train_fraction;
    opts.base_seed = c.seed;
    opts.stratified = !c.no_stratify;
    opts.measure_time = c.timing;
    auto reports = run_benchmark(datasets, params, opts);
    emit(c, out, report_csv(reports));
    if (c.report_json) write_text(*c.report_json, report_json(reports));
    return 0;
}

int cmd_serve(const CliConfig& c, std::ostream& out) {
    auto ds = load_single(c);
    ExplorerSession::Options opts;
    opts.params = single_params(c);
    opts.n_outliers = c.n_outliers;
    opts.marks_path = c.inputs.front() + ".marks.json";
    auto session = std::make_shared<ExplorerSession>(std::move(ds), std::move(opts));
    std::optional<std::filesystem::path> static_dir;
    if (c.static_dir) static_dir = *c.static_dir;
    ExplorerServer server(session, static_dir);
    int port = server.bind(c.host, c.port);
    if (port < 0) throw DataError("cannot bind " + c.host + ":" + std::to_string(c.port));
    out << "serving on http://" << c.host << ':' << port << std::endl;
    return server.listen() ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bilateral kNN anomaly scoring", "biknn"};
    app.require_subcommand(1);
    CliConfig c;

    auto add_io = [&](CLI::App* cmd, bool multi_input) {
        auto* in = cmd->add_option("--input", c.inputs, multi_input
                                                            ? "Dataset CSV(s) or list file(s) with one CSV path per line"
                                                            : "Dataset CSV")
                       ->required();
        if (!multi_input) in->expected(1);
        cmd->add_option("--labels", c.labels, "Name of the 0/1 label column");
        cmd->add_option("--output", c.output, "Output path (stdout when omitted)");
    };

    auto* fit = app.add_subcommand("fit", "Fit a model and write it as JSON");
    add_io(fit, false);
    add_param_flags(fit, c, false);
    fit->add_option("--space-output", c.space_output, "Also write the training anomaly space (id,k_e,k_p)");

    auto* score = app.add_subcommand("score", "Write id,score CSV");
    add_io(score, false);
    add_param_flags(score, c, false);
    score->add_option("--model", c.model_path, "Score with a saved model instead of fitting on the input");
    score->add_option("--n-outliers", c.n_outliers, "Flag the top-n scores (adds is_outlier)")
        ->check(CLI::PositiveNumber);

    auto* cls = app.add_subcommand("classify", "Type I/II/III classification in anomaly space");
    add_io(cls, false);
    add_param_flags(cls, c, false);
    cls->add_option("--n-outliers", c.n_outliers, "Expected number of outliers per axis")->check(CLI::PositiveNumber);

    auto* grid = app.add_subcommand("grid", "Score a 2D lattice for contour plots");
    add_io(grid, false);
    add_param_flags(grid, c, false);
    grid->add_option("--resolution", c.resolution, "Lattice points per axis")->check(CLI::Range(2, 5000));
    grid->add_option("--bounds", c.bounds, "xmin xmax ymin ymax (default: data range padded by 5%)")->expected(4);

    auto* bench = app.add_subcommand("bench", "Multi-trial ROC-AUC / AP benchmark");
    add_io(bench, true);
    add_param_flags(bench, c, true);
    bench->add_option("--trials", c.trials, "Number of seeded trials")->check(CLI::PositiveNumber);
    bench->add_option("--train-fraction", c.train_fraction, "Training share of each split");
    bench->add_option("--report-json", c.report_json, "Also write the per-trial report as JSON");
    bench->add_flag("--no-stratify", c.no_stratify, "Uniform instead of label-stratified splits");
    bench->add_flag("--timing", c.timing, "Record wall-clock seconds (output is then not reproducible)");

    auto* serve = app.add_subcommand("serve", "Run the explorer HTTP backend");
    add_io(serve, false);
    add_param_flags(serve, c, false);
    serve->add_option("--port", c.port, "TCP port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", c.host, "Bind address");
    serve->add_option("--n-outliers", c.n_outliers, "Initial number of outliers per axis")->check(CLI::PositiveNumber);
    serve->add_option("--static-dir", c.static_dir, "Directory with the explorer frontend");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (fit->parsed()) return cmd_fit(c, out);
        if (score->parsed()) return cmd_score(c, out);
        if (cls->parsed()) return cmd_classify(c, out);
        if (grid->parsed()) return cmd_grid(c, out);
        if (bench->parsed()) return cmd_bench(c, out);
        if (serve->parsed()) return cmd_serve(c, out);
    } catch (const ParamError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace biknn

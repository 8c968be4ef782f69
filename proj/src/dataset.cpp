#include "biknn/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "biknn/random.hpp"

namespace biknn {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    while (true) {
        auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

bool parse_double(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && first != last;
}

}  // namespace

Dataset::Dataset(Matrix features, std::optional<std::vector<int>> labels,
                 std::vector<std::string> feature_names)
    : features_(std::move(features)), labels_(std::move(labels)), names_(std::move(feature_names)) {
    if (features_.rows() == 0 || features_.cols() == 0) {
        throw DataError("dataset must have at least one row and one column");
    }
    for (double v : features_.data()) {
        if (!std::isfinite(v)) throw DataError("dataset contains a non-finite feature value");
    }
    if (labels_) {
        if (labels_->size() != features_.rows()) {
            throw DataError("label count does not match row count");
        }
        for (int l : *labels_) {
            if (l != 0 && l != 1) throw DataError("labels must be 0 or 1");
        }
    }
    if (names_.empty()) {
        for (std::size_t j = 0; j < features_.cols(); ++j) names_.push_back("x" + std::to_string(j));
    } else if (names_.size() != features_.cols()) {
        throw DataError("feature name count does not match column count");
    }
}

Dataset Dataset::subset(std::span<const std::size_t> ids) const {
    std::optional<std::vector<int>> labels;
    if (labels_) {
        labels.emplace();
        labels->reserve(ids.size());
        for (auto id : ids) labels->push_back((*labels_)[id]);
    }
    return Dataset(features_.select_rows(ids), std::move(labels), names_);
}

Dataset parse_csv(const std::string& text, const std::optional<std::string>& label_column,
                  const std::string& source) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) {
        throw DataError(source + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    std::optional<std::size_t> label_idx;
    if (label_column) {
        auto it = std::find(header.begin(), header.end(), *label_column);
        if (it == header.end()) {
            throw DataError(source + ": label column '" + *label_column + "' not found");
        }
        label_idx = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != label_idx) names.push_back(header[j]);
    }

    Matrix features(0, names.size());
    std::optional<std::vector<int>> labels;
    if (label_idx) labels.emplace();
    std::vector<double> row(names.size());

    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++row_no;
        auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw DataError(source + ": row " + std::to_string(row_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        }
        std::size_t out = 0;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            std::string cell = trim(cells[j]);
            if (label_idx && j == *label_idx) {
                if (cell != "0" && cell != "1") {
                    throw DataError(source + ": row " + std::to_string(row_no) + ", column \"" +
                                    header[j] + "\": label must be 0 or 1, got '" + cell + "'");
                }
                labels->push_back(cell == "1" ? 1 : 0);
                continue;
            }
            double v;
            if (!parse_double(cell, v) || !std::isfinite(v)) {
                throw DataError(source + ": row " + std::to_string(row_no) + ", column \"" +
                                header[j] + "\": not a finite number: '" + cell + "'");
            }
            row[out++] = v;
        }
        features.append_row(row);
    }
    if (row_no == 0) throw DataError(source + ": no data rows");
    return Dataset(std::move(features), std::move(labels), std::move(names));
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), label_column, path.string());
}

std::string to_csv(const Dataset& ds) {
    std::string out;
    const auto& names = ds.feature_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (j) out += ',';
        out += names[j];
    }
    if (ds.labeled()) out += ",label";
    out += '\n';
    char buf[64];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto r = ds.features().row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", r[j]);
            out += buf;
        }
        if (ds.labeled()) {
            out += ',';
            out += (*ds.labels())[i] ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << to_csv(ds);
}

SplitIndices split_indices(const Dataset& ds, double train_fraction, std::uint64_t seed,
                           bool stratified) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ParamError("train_fraction must lie in (0, 1)");
    }
    const std::size_t n = ds.size();
    if (n < 2) throw DataError("split needs at least 2 rows");

    std::size_t n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<std::vector<std::size_t>> groups;
    if (stratified && ds.labeled()) {
        groups.resize(2);
        for (std::size_t i = 0; i < n; ++i) groups[(*ds.labels())[i]].push_back(i);
    } else {
        groups.resize(1);
        for (std::size_t i = 0; i < n; ++i) groups[0].push_back(i);
    }

    // Largest-remainder apportionment of n_train across groups.
    std::vector<std::size_t> quota(groups.size());
    std::vector<double> remainder(groups.size());
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double exact = static_cast<double>(n_train) * static_cast<double>(groups[g].size()) /
                       static_cast<double>(n);
        quota[g] = static_cast<std::size_t>(std::floor(exact));
        remainder[g] = exact - static_cast<double>(quota[g]);
        assigned += quota[g];
    }
    std::vector<std::size_t> order(groups.size());
    for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t t = 0; assigned < n_train; t = (t + 1) % order.size()) {
        std::size_t g = order[t];
        if (quota[g] < groups[g].size()) {
            ++quota[g];
            ++assigned;
        }
    }

    Rng rng(seed);
    SplitIndices out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        shuffle(std::span<std::size_t>(groups[g]), rng);
        out.train.insert(out.train.end(), groups[g].begin(), groups[g].begin() + quota[g]);
        out.test.insert(out.test.end(), groups[g].begin() + quota[g], groups[g].end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed,
                                  bool stratified) {
    auto idx = split_indices(ds, train_fraction, seed, stratified);
    return {ds.subset(idx.train), ds.subset(idx.test)};
}

}  // namespace biknn

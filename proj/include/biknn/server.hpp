#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "biknn/classify.hpp"
#include "biknn/dataset.hpp"
#include "biknn/scorer.hpp"

namespace biknn {

/// Result of one API call: HTTP status, JSON body, and the model generation
/// current when the response was produced.
struct ApiResponse {
    int status = 200;
    nlohmann::json body;
    std::uint64_t generation = 0;
};

/// Single-dataset analysis session behind the explorer API.
///
/// Mutations (refit, reclassify, mark) serialize on a writer lock; reads take a
/// shared lock and see one consistent generation.
class ExplorerSession {
public:
    struct Options {
        BiknnParams params;
        std::optional<std::size_t> n_outliers;       // initial m; derived from labels or n/20 when unset
        std::optional<std::filesystem::path> marks_path;
    };

    ExplorerSession(Dataset data, Options options);

    ApiResponse get_space() const;
    ApiResponse get_scores() const;
    ApiResponse get_grid(std::optional<std::string> resolution) const;
    ApiResponse get_original() const;
    ApiResponse get_marks() const;
    ApiResponse post_classify(const std::string& body);
    ApiResponse post_params(const std::string& body);
    ApiResponse post_mark(const std::string& body);

    std::uint64_t generation() const;

private:
    struct Classification {
        std::optional<std::size_t> m;
        AxisThresholds thresholds;
        std::vector<OutlierType> types;
    };

    Classification classify_current(std::optional<std::size_t> m, std::optional<AxisThresholds> t) const;
    nlohmann::json classification_json(const Classification& c) const;
    nlohmann::json marks_json() const;
    void persist_marks() const;
    ApiResponse error(int status, const std::string& message) const;

    Dataset data_;
    std::optional<std::filesystem::path> marks_path_;
    mutable std::shared_mutex mutex_;  // guards the fields below
    std::mutex write_mutex_;           // serializes state transitions
    std::shared_ptr<const BiknnModel> model_;
    Classification classification_;
    std::map<std::size_t, bool> marks_;
    std::uint64_t generation_ = 1;
};

/// HTTP front end: routes /api/* to an ExplorerSession and optionally serves a
/// static frontend directory at "/".
class ExplorerServer {
public:
    ExplorerServer(std::shared_ptr<ExplorerSession> session,
                   std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~ExplorerServer();
    ExplorerServer(const ExplorerServer&) = delete;
    ExplorerServer& operator=(const ExplorerServer&) = delete;

    /// Binds to `port` on `host` (0 picks a free port) and returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called.
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace biknn

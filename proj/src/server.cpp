#include "biknn/server.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <httplib.h>

#include "biknn/error.hpp"
#include "biknn/io.hpp"

namespace biknn {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxGridResolution = 1000;
constexpr std::size_t kDefaultGridResolution = 50;

std::optional<json> parse_object(const std::string& body) {
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
}

json counts_json(const std::vector<OutlierType>& types) {
    auto c = count_types(types);
    return {{"normal", c.normal}, {"I", c.type_i}, {"II", c.type_ii}, {"III", c.type_iii}};
}

}  // namespace

ExplorerSession::ExplorerSession(Dataset data, Options options)
    : data_(std::move(data)), marks_path_(std::move(options.marks_path)) {
    model_ = std::make_shared<const BiknnModel>(BiknnModel::fit(data_, options.params));
    const std::size_t n = data_.size();
    std::size_t m = options.n_outliers.value_or(0);
    if (!options.n_outliers) {
        std::size_t labeled = 0;
        if (data_.labeled()) labeled = std::count(data_.labels()->begin(), data_.labels()->end(), 1);
        m = labeled > 0 ? labeled : std::max<std::size_t>(1, n / 20);
    }
    m = std::clamp<std::size_t>(m, 1, n - 1);
    classification_ = classify_current(m, std::nullopt);

    if (marks_path_ && std::filesystem::exists(*marks_path_)) {
        std::ifstream in(*marks_path_);
        auto j = json::parse(in, nullptr, false);
        if (!j.is_discarded() && j.contains("marks") && j["marks"].is_array()) {
            for (const auto& id : j["marks"]) {
                if (id.is_number_unsigned() && id.get<std::size_t>() < n) marks_[id.get<std::size_t>()] = true;
            }
        }
    }
}

ExplorerSession::Classification ExplorerSession::classify_current(std::optional<std::size_t> m,
                                                                  std::optional<AxisThresholds> t) const {
    Classification c;
    const auto& space = model_->train_space();
    c.m = m;
    c.thresholds = m ? axis_thresholds(space, *m) : *t;
    c.types = classify(space, c.thresholds);
    return c;
}

json ExplorerSession::classification_json(const Classification& c) const {
    json types = json::array();
    for (auto t : c.types) types.push_back(to_string(t));
    return {{"thresholds",
             {{"t_e", c.thresholds.t_e}, {"t_p", c.thresholds.t_p}, {"m", c.m ? json(*c.m) : json(nullptr)}}},
            {"types", types},
            {"counts", counts_json(c.types)}};
}

json ExplorerSession::marks_json() const {
    json ids = json::array();
    for (const auto& [id, marked] : marks_) {
        if (marked) ids.push_back(id);
    }
    return ids;
}

void ExplorerSession::persist_marks() const {
    if (!marks_path_) return;
    write_text(*marks_path_, json{{"marks", marks_json()}}.dump(2) + "\n");
}

ApiResponse ExplorerSession::error(int status, const std::string& message) const {
    return {status, json{{"error", message}}, generation_};
}

std::uint64_t ExplorerSession::generation() const {
    std::shared_lock lock(mutex_);
    return generation_;
}

ApiResponse ExplorerSession::get_space() const {
    std::shared_lock lock(mutex_);
    json points = json::array();
    const auto& space = model_->train_space();
    for (std::size_t i = 0; i < space.size(); ++i) {
        points.push_back({{"id", i}, {"k_e", space[i].k_e}, {"k_p", space[i].k_p}});
    }
    const auto& robust = model_->robust();
    auto sc = robust.scatter.row_major();
    json body = classification_json(classification_);
    body["generation"] = generation_;
    body["points"] = std::move(points);
    body["robust"] = {{"center", {robust.center[0], robust.center[1]}}, {"scatter", {sc[0], sc[1], sc[2], sc[3]}}};
    body["params"] = params_to_json(model_->params());
    return {200, std::move(body), generation_};
}

ApiResponse ExplorerSession::get_scores() const {
    std::shared_lock lock(mutex_);
    json scores = json::array(), m = json::array(), w = json::array();
    for (const auto& v : model_->train_space()) {
        auto parts = model_->score_parts(v);
        scores.push_back(parts.combined);
        m.push_back(parts.mahalanobis);
        w.push_back(parts.weighted);
    }
    return {200, {{"generation", generation_}, {"scores", scores}, {"mahalanobis", m}, {"weighted", w}}, generation_};
}

ApiResponse ExplorerSession::get_grid(std::optional<std::string> resolution) const {
    std::shared_lock lock(mutex_);
    if (data_.dim() != 2) return error(404, "grid is only available for 2D data");
    std::size_t res = kDefaultGridResolution;
    if (resolution) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(*resolution, &used);
            if (used != resolution->size() || v < 2 || v > static_cast<long long>(kMaxGridResolution)) {
                throw std::out_of_range("resolution");
            }
            res = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            return error(400, "resolution must be an integer in [2, " + std::to_string(kMaxGridResolution) + "]");
        }
    }
    const auto& f = data_.features();
    std::array<double, 2> lo{f(0, 0), f(0, 1)}, hi = lo;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            lo[j] = std::min(lo[j], f(i, j));
            hi[j] = std::max(hi[j], f(i, j));
        }
    }
    for (std::size_t j = 0; j < 2; ++j) {
        double pad = 0.05 * (hi[j] - lo[j]);
        if (pad == 0.0) pad = 1.0;
        lo[j] -= pad;
        hi[j] += pad;
    }
    auto grid = model_->score_grid(lo, hi, res);
    return {200,
            {{"generation", generation_},
             {"resolution", res},
             {"bounds", {{"xmin", lo[0]}, {"xmax", hi[0]}, {"ymin", lo[1]}, {"ymax", hi[1]}}},
             {"values", grid}},
            generation_};
}

ApiResponse ExplorerSession::get_original() const {
    std::shared_lock lock(mutex_);
    if (data_.dim() != 2) return error(404, "original coordinates are only served for 2D data");
    json points = json::array();
    const auto& f = data_.features();
    for (std::size_t i = 0; i < f.rows(); ++i) points.push_back({{"id", i}, {"x", f(i, 0)}, {"y", f(i, 1)}});
    return {200, {{"generation", generation_}, {"points", points}}, generation_};
}

ApiResponse ExplorerSession::get_marks() const {
    std::shared_lock lock(mutex_);
    return {200, {{"generation", generation_}, {"marks", marks_json()}}, generation_};
}

ApiResponse ExplorerSession::post_classify(const std::string& body) {
    std::lock_guard writer(write_mutex_);
    auto j = parse_object(body);
    if (!j) return error(400, "body must be a JSON object");
    std::optional<std::size_t> m;
    std::optional<AxisThresholds> t;
    if (j->contains("m")) {
        const auto& v = (*j)["m"];
        if (!v.is_number_integer() || v.get<long long>() < 1 ||
            v.get<std::size_t>() >= data_.size()) {
            return error(400, "m must be an integer in [1, n - 1]");
        }
        m = v.get<std::size_t>();
    } else if (j->contains("t_e") && j->contains("t_p")) {
        const auto& te = (*j)["t_e"];
        const auto& tp = (*j)["t_p"];
        if (!te.is_number() || !tp.is_number()) return error(400, "t_e and t_p must be numbers");
        t = AxisThresholds{te.get<double>(), tp.get<double>()};
    } else {
        return error(400, "expected {m} or {t_e, t_p}");
    }
    std::unique_lock lock(mutex_);
    classification_ = classify_current(m, t);
    json out = classification_json(classification_);
    out["generation"] = generation_;
    return {200, std::move(out), generation_};
}

ApiResponse ExplorerSession::post_params(const std::string& body) {
    std::lock_guard writer(write_mutex_);
    auto j = parse_object(body);
    if (!j) return error(400, "body must be a JSON object");
    std::shared_ptr<const BiknnModel> current;
    {
        std::shared_lock lock(mutex_);
        current = model_;
    }
    std::shared_ptr<const BiknnModel> next;
    try {
        auto params = params_from_json(*j, current->params());
        next = std::make_shared<const BiknnModel>(BiknnModel::fit(data_, params));
    } catch (const std::exception& e) {
        std::shared_lock lock(mutex_);
        return error(409, std::string("refit failed: ") + e.what());
    }
    std::unique_lock lock(mutex_);
    model_ = std::move(next);
    ++generation_;
    auto prev = classification_;
    classification_ = classify_current(prev.m, prev.m ? std::nullopt : std::optional(prev.thresholds));
    return {200, {{"generation", generation_}, {"params", params_to_json(model_->params())}}, generation_};
}

ApiResponse ExplorerSession::post_mark(const std::string& body) {
    std::lock_guard writer(write_mutex_);
    auto j = parse_object(body);
    if (!j) return error(400, "body must be a JSON object");
    if (!j->contains("id") || !(*j)["id"].is_number_unsigned() || (*j)["id"].get<std::size_t>() >= data_.size()) {
        return error(400, "id must be a valid point id");
    }
    bool marked = true;
    if (j->contains("marked")) {
        if (!(*j)["marked"].is_boolean()) return error(400, "marked must be a boolean");
        marked = (*j)["marked"].get<bool>();
    }
    std::unique_lock lock(mutex_);
    auto id = (*j)["id"].get<std::size_t>();
    if (marked) {
        marks_[id] = true;
    } else {
        marks_.erase(id);
    }
    try {
        persist_marks();
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
    return {200, {{"generation", generation_}, {"marks", marks_json()}}, generation_};
}

struct ExplorerServer::Impl {
    std::shared_ptr<ExplorerSession> session;
    httplib::Server http;
};

ExplorerServer::ExplorerServer(std::shared_ptr<ExplorerSession> session,
                               std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
    impl_->session = std::move(session);
    auto& http = impl_->http;
    auto send = [](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_header("X-Biknn-Generation", std::to_string(api.generation));
        res.set_content(api.body.dump(), "application/json");
    };
    auto* s = impl_->session.get();

    http.Get("/api/space", [=](const httplib::Request&, httplib::Response& res) { send(res, s->get_space()); });
    http.Get("/api/scores", [=](const httplib::Request&, httplib::Response& res) { send(res, s->get_scores()); });
    http.Get("/api/grid", [=](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> r;
        if (req.has_param("resolution")) r = req.get_param_value("resolution");
        send(res, s->get_grid(r));
    });
    http.Get("/api/original", [=](const httplib::Request&, httplib::Response& res) { send(res, s->get_original()); });
    http.Get("/api/marks", [=](const httplib::Request&, httplib::Response& res) { send(res, s->get_marks()); });
    http.Post("/api/classify",
              [=](const httplib::Request& req, httplib::Response& res) { send(res, s->post_classify(req.body)); });
    http.Post("/api/params",
              [=](const httplib::Request& req, httplib::Response& res) { send(res, s->post_params(req.body)); });
    http.Post("/api/mark",
              [=](const httplib::Request& req, httplib::Response& res) { send(res, s->post_mark(req.body)); });
    http.set_exception_handler([=](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        send(res, {500, json{{"error", what}}, s->generation()});
    });
    if (static_dir && std::filesystem::is_directory(*static_dir)) {
        http.set_mount_point("/", static_dir->string());
    }
}

ExplorerServer::~ExplorerServer() { stop(); }

int ExplorerServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->http.bind_to_any_port(host);
    return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool ExplorerServer::listen() { return impl_->http.listen_after_bind(); }

void ExplorerServer::stop() {
    if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace biknn

#include "teaming/http.hpp"

#include <charconv>

#include <httplib.h>

namespace teaming::service {

namespace {

ApiResponse json_response(int status, const Json& body) { return {status, body.dump(), "application/json"}; }

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
    return json_response(status, Json{{"error", {{"code", code}, {"message", message}}}});
}

// Non-negative integer query parameter; fallback when absent.
std::size_t query_count(const ApiRequest& request, const char* key, std::size_t fallback) {
    auto it = request.query.find(key);
    if (it == request.query.end()) return fallback;
    std::size_t out = 0;
    const auto& v = it->second;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw RequestError(400, "INVALID_REQUEST", std::string("'") + key + "' must be a non-negative integer");
    }
    return out;
}

constexpr std::size_t kDefaultLimit = 50;
constexpr std::size_t kMaxLimit = 500;

}  // namespace

Api::Api(RecommendationEngine& engine, RecommendationRegistry& registry, FeedbackStore& feedback, Clock clock,
         ModelLoader reload)
    : engine_(engine),
      registry_(registry),
      feedback_(feedback),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::system_clock::now(); })),
      reload_(std::move(reload)) {}

ApiResponse Api::handle(const ApiRequest& request) {
    try {
        const auto& p = request.path;
        const auto& m = request.method;
        if (m == "GET" && p == "/health") return json_response(200, Json{{"status", "ok"}});
        if (m == "GET" && p == "/calls") return listing(request, true);
        if (m == "GET" && p == "/researchers") return listing(request, false);
        if (m == "POST" && p == "/recommend") return recommend(request);
        if (m == "GET" && p.rfind("/recommendations/", 0) == 0) {
            return recommendation(p.substr(std::string_view("/recommendations/").size()));
        }
        if (m == "POST" && p == "/feedback") return feedback(request);
        if (m == "GET" && p == "/feedback/summary") return summary();
        if (m == "POST" && p == "/model/reload") return reload_model();
        return error_response(404, "NOT_FOUND", "no route for " + m + " " + p);
    } catch (const RequestError& e) {
        return error_response(e.status(), e.code(), e.what());
    } catch (const Error& e) {
        return error_response(500, "INTERNAL", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "INTERNAL", e.what());
    }
}

ApiResponse Api::listing(const ApiRequest& request, bool calls) const {
    const std::size_t limit = query_count(request, "limit", kDefaultLimit);
    const std::size_t offset = query_count(request, "offset", 0);
    if (limit < 1 || limit > kMaxLimit) {
        throw RequestError(400, "INVALID_REQUEST", "'limit' must be in [1, " + std::to_string(kMaxLimit) + "]");
    }
    const auto snap = engine_.snapshot();
    const std::size_t total = calls ? snap.corpus->calls().size() : snap.corpus->researchers().size();
    Json items = Json::array();
    for (std::size_t i = offset; i < total && i < offset + limit; ++i) {
        if (calls) {
            const auto& c = snap.corpus->calls()[i];
            items.push_back({{"id", c.id}, {"title", c.title}});
        } else {
            const auto& r = snap.corpus->researchers()[i];
            items.push_back({{"id", r.id}, {"name", r.name}});
        }
    }
    Json body{{"items", items}, {"total", total}};
    body["next_offset"] = offset + limit < total ? Json(offset + limit) : Json(nullptr);
    return json_response(200, body);
}

ApiResponse Api::recommend(const ApiRequest& request) {
    Json body;
    try {
        body = Json::parse(request.body);
    } catch (const Json::parse_error&) {
        throw RequestError(400, "INVALID_REQUEST", "request body is not valid JSON");
    }
    const Json response = engine_.recommend(parse_request(body));
    registry_.record(response);
    return json_response(200, response);
}

ApiResponse Api::recommendation(const std::string& id) const {
    auto found = registry_.response(id);
    if (!found) throw RequestError(404, "RECOMMENDATION_NOT_FOUND", "no recommendation '" + id + "'");
    return json_response(200, *found);
}

ApiResponse Api::feedback(const ApiRequest& request) {
    Json body;
    try {
        body = Json::parse(request.body);
    } catch (const Json::parse_error&) {
        throw RequestError(400, "INVALID_REQUEST", "request body is not valid JSON");
    }
    if (!body.is_object()) throw RequestError(400, "INVALID_REQUEST", "request body must be a JSON object");
    const auto id = body.find("recommendation_id");
    if (id == body.end() || !id->is_string()) {
        throw RequestError(400, "INVALID_REQUEST", "'recommendation_id' is required");
    }
    const auto likert = [&](const char* key) {
        auto it = body.find(key);
        if (it == body.end() || !it->is_number_integer()) {
            throw RequestError(400, "LIKERT_OUT_OF_RANGE", std::string("'") + key + "' must be an integer in [1, 5]");
        }
        const auto v = it->get<long long>();
        if (v < 1 || v > 5) {
            throw RequestError(400, "LIKERT_OUT_OF_RANGE", std::string("'") + key + "' must be in [1, 5]");
        }
        return static_cast<int>(v);
    };
    FeedbackRecord record;
    record.recommendation_id = id->get<std::string>();
    record.relevance = likert("relevance");
    record.usefulness = likert("usefulness");
    if (auto c = body.find("comment"); c != body.end() && c->is_string()) record.comment = c->get<std::string>();

    const auto issued = registry_.find(record.recommendation_id);
    if (!issued) {
        throw RequestError(404, "RECOMMENDATION_NOT_FOUND",
                           "recommendation '" + record.recommendation_id + "' was never issued");
    }
    record.use_case = issued->use_case;
    record.method = issued->method;
    record.submitted_at = iso8601(clock_());
    feedback_.submit(record);
    return json_response(200, Json{{"status", "recorded"}, {"recommendation_id", record.recommendation_id}});
}

ApiResponse Api::summary() const { return json_response(200, feedback_summary(feedback_.records())); }

ApiResponse Api::reload_model() {
    if (!reload_) throw RequestError(409, "MODEL_NOT_CONFIGURED", "no model path configured");
    auto model = reload_();
    if (!model) throw RequestError(409, "MODEL_NOT_TRAINED", "configured model could not be loaded");
    engine_.set_model(std::move(model));
    return json_response(200, Json{{"status", "reloaded"}, {"model_version", engine_.snapshot().model_version}});
}

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(Api& api, const std::string& static_dir) : impl_(std::make_unique<Impl>()) {
    auto& svr = impl_->server;
    svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    if (!static_dir.empty()) svr.set_mount_point("/", static_dir);

    auto forward = [&api](const httplib::Request& req, httplib::Response& res) {
        ApiRequest in{req.method, req.path, {}, req.body};
        for (const auto& [k, v] : req.params) in.query.emplace(k, v);
        const ApiResponse out = api.handle(in);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    for (const char* path : {"/health", "/calls", "/researchers", "/feedback/summary", R"(/recommendations/[^/]+)"}) {
        svr.Get(path, forward);
    }
    for (const char* path : {"/recommend", "/feedback", "/model/reload"}) svr.Post(path, forward);
    svr.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace teaming::service

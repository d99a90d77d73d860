#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "teaming/service.hpp"

namespace teaming::service {

struct ApiRequest {
    std::string method;  // "GET", "POST", ...
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

// Loads a fresh model for POST /model/reload.
using ModelLoader = std::function<std::shared_ptr<const bandit::BanditModel>()>;

// The JSON API without a transport, so routing and error mapping are
// testable in-process. Errors are {"error": {"code", "message"}}.
class Api {
public:
    Api(RecommendationEngine& engine, RecommendationRegistry& registry, FeedbackStore& feedback, Clock clock = {},
        ModelLoader reload = {});

    ApiResponse handle(const ApiRequest& request);

private:
    ApiResponse listing(const ApiRequest& request, bool calls) const;
    ApiResponse recommend(const ApiRequest& request);
    ApiResponse recommendation(const std::string& id) const;
    ApiResponse feedback(const ApiRequest& request);
    ApiResponse summary() const;
    ApiResponse reload_model();

    RecommendationEngine& engine_;
    RecommendationRegistry& registry_;
    FeedbackStore& feedback_;
    Clock clock_;
    ModelLoader reload_;
};

// cpp-httplib front end: JSON routes, CORS for browser clients and an
// optional static asset directory mounted at "/".
class HttpServer {
public:
    explicit HttpServer(Api& api, const std::string& static_dir = {});
    ~HttpServer();

    // Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    void serve();  // blocks until stop()
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace teaming::service

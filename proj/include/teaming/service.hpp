#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "teaming/bandit.hpp"
#include "teaming/corpus.hpp"
#include "teaming/error.hpp"
#include "teaming/methods.hpp"
#include "teaming/taxonomy.hpp"

namespace teaming::service {

using Json = nlohmann::ordered_json;
using Clock = std::function<std::chrono::system_clock::time_point()>;

inline constexpr int kMaxK = 50;

enum class Mode { Researcher, Call, Interest };  // UC1, UC2, UC3

std::string_view to_string(Mode mode);
std::string_view use_case(Mode mode);  // "UC1".."UC3"
std::optional<Mode> parse_mode(std::string_view text);

struct RecommendationRequest {
    Mode mode = Mode::Call;
    std::string subject;
    Method method = Method::M1;
    int k = 5;
};

// Request-level failure carrying the wire error code and HTTP status.
class RequestError : public Error {
public:
    RequestError(int status, std::string code, const std::string& message)
        : Error(message), status_(status), code_(std::move(code)) {}
    int status() const noexcept { return status_; }
    const std::string& code() const noexcept { return code_; }

private:
    int status_;
    std::string code_;
};

// Parses the JSON body of POST /recommend. Throws RequestError.
RecommendationRequest parse_request(const Json& body);
Json request_to_json(const RecommendationRequest& request);

std::string iso8601(std::chrono::system_clock::time_point t);

// Immutable inputs a recommendation is computed from.
struct Snapshot {
    std::shared_ptr<const Corpus> corpus;
    std::shared_ptr<const DeltaMapper> delta;
    std::shared_ptr<const bandit::BanditModel> model;  // may be null
    std::string model_version;                         // "none" without a model
};

std::string model_version(const bandit::BanditModel* model);

// Transport-independent engine behind /recommend. Thread-safe: requests
// read a snapshot; set_model swaps it atomically.
class RecommendationEngine {
public:
    RecommendationEngine(std::shared_ptr<const Corpus> corpus, std::shared_ptr<const DeltaMapper> delta,
                         TeamingConfig config, std::shared_ptr<const bandit::BanditModel> model = nullptr,
                         Clock clock = {});

    // The response JSON. Throws RequestError for client errors.
    Json recommend(const RecommendationRequest& request) const;

    void set_model(std::shared_ptr<const bandit::BanditModel> model);
    Snapshot snapshot() const;
    const TeamingConfig& config() const noexcept { return config_; }

    // Slate for one call, cached per (call, method, model version).
    TeamSlate slate(const Snapshot& snap, Method method, const Call& call) const;

private:
    Json researcher_slates(const Snapshot& snap, const Corpus& corpus, const std::string& researcher_id,
                           Method method, int k, bool use_cache) const;
    Json team_json(const Corpus& corpus, const ScoredTeam& team) const;

    TeamingConfig config_;
    Clock clock_;
    mutable std::mutex snapshot_mutex_;
    Snapshot snapshot_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::string, TeamSlate> cache_;
};

// Append-only newline-delimited JSON file; each append is flushed and
// fsynced before returning. Appends are serialized.
class AppendLog {
public:
    explicit AppendLog(std::filesystem::path path);

    void append(const Json& record);
    std::vector<Json> read_all() const;  // skips a torn trailing line
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
};

struct IssuedRecommendation {
    std::string recommendation_id;
    std::string use_case;
    std::string method;
};

// Remembers every recommendation handed out, persisted so feedback can
// refer to ids issued before a restart.
class RecommendationRegistry {
public:
    explicit RecommendationRegistry(std::filesystem::path log_path);

    void record(const Json& response);
    std::optional<IssuedRecommendation> find(const std::string& id) const;
    std::optional<Json> response(const std::string& id) const;

private:
    AppendLog log_;
    mutable std::mutex mutex_;
    std::map<std::string, Json> issued_;
};

struct FeedbackRecord {
    std::string recommendation_id;
    int relevance = 0;
    int usefulness = 0;
    std::string comment;
    std::string submitted_at;
    std::string use_case;
    std::string method;
};

Json feedback_to_json(const FeedbackRecord& record);
FeedbackRecord feedback_from_json(const Json& json);

class FeedbackStore {
public:
    explicit FeedbackStore(std::filesystem::path log_path);

    void submit(const FeedbackRecord& record);
    std::vector<FeedbackRecord> records() const;

private:
    AppendLog log_;
};

// Percentage rounded to two decimals, half away from zero.
double percent(std::size_t part, std::size_t total);

// Counts per Likert level, the top-two-box shares ("very" + "somewhat")
// and per (use case, method, relevance, usefulness) cells.
Json feedback_summary(const std::vector<FeedbackRecord>& records);

}  // namespace teaming::service

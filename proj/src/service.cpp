#include "teaming/service.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <ctime>

#include "teaming/hash.hpp"
#include "teaming/pipeline.hpp"

namespace teaming::service {

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::Researcher: return "researcher";
        case Mode::Call: return "call";
        case Mode::Interest: return "interest";
    }
    return "?";
}

std::string_view use_case(Mode mode) {
    switch (mode) {
        case Mode::Researcher: return "UC1";
        case Mode::Call: return "UC2";
        case Mode::Interest: return "UC3";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
    for (Mode m : {Mode::Researcher, Mode::Call, Mode::Interest}) {
        if (text == to_string(m) || text == use_case(m)) return m;
    }
    return std::nullopt;
}

namespace {

RequestError bad_request(const std::string& message) { return RequestError(400, "INVALID_REQUEST", message); }

}  // namespace

RecommendationRequest parse_request(const Json& body) {
    if (!body.is_object()) throw bad_request("request body must be a JSON object");
    RecommendationRequest r;

    auto mode = body.find("mode");
    if (mode == body.end() || !mode->is_string()) throw bad_request("'mode' must be one of researcher, call, interest");
    auto parsed_mode = parse_mode(mode->get<std::string>());
    if (!parsed_mode) throw bad_request("unknown mode '" + mode->get<std::string>() + "'");
    r.mode = *parsed_mode;

    auto subject = body.find("subject");
    if (subject == body.end() || !subject->is_string() || subject->get<std::string>().empty()) {
        throw bad_request("'subject' must be a non-empty string");
    }
    r.subject = subject->get<std::string>();

    auto method = body.find("method");
    if (method == body.end() || !method->is_string()) throw RequestError(400, "METHOD_INVALID", "'method' is required");
    auto parsed_method = parse_method(method->get<std::string>());
    if (!parsed_method) {
        throw RequestError(400, "METHOD_INVALID", "unknown method '" + method->get<std::string>() + "'");
    }
    r.method = *parsed_method;

    if (auto k = body.find("k"); k != body.end()) {
        if (!k->is_number_integer()) throw bad_request("'k' must be an integer");
        const auto v = k->get<long long>();
        if (v < 1 || v > kMaxK) throw bad_request("'k' must be in [1, " + std::to_string(kMaxK) + "]");
        r.k = static_cast<int>(v);
    }
    return r;
}

Json request_to_json(const RecommendationRequest& request) {
    return Json{{"mode", to_string(request.mode)},
                {"subject", request.subject},
                {"method", to_string(request.method)},
                {"k", request.k}};
}

std::string iso8601(std::chrono::system_clock::time_point t) {
    const std::time_t secs = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string model_version(const bandit::BanditModel* model) {
    if (model == nullptr) return "none";
    return to_hex(fnv1a(bandit::model_to_json(*model)));
}

RecommendationEngine::RecommendationEngine(std::shared_ptr<const Corpus> corpus,
                                           std::shared_ptr<const DeltaMapper> delta, TeamingConfig config,
                                           std::shared_ptr<const bandit::BanditModel> model, Clock clock)
    : config_(std::move(config)),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::system_clock::now(); })) {
    config_.validate();
    snapshot_.corpus = std::move(corpus);
    snapshot_.delta = std::move(delta);
    snapshot_.model_version = model_version(model.get());
    snapshot_.model = std::move(model);
}

void RecommendationEngine::set_model(std::shared_ptr<const bandit::BanditModel> model) {
    const std::string version = model_version(model.get());
    {
        std::lock_guard lock(snapshot_mutex_);
        snapshot_.model = std::move(model);
        snapshot_.model_version = version;
    }
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
}

Snapshot RecommendationEngine::snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
}

TeamSlate RecommendationEngine::slate(const Snapshot& snap, Method method, const Call& call) const {
    std::string key = call.id;
    key += '|';
    key += to_string(method);
    if (method == Method::M3) key += '|' + snap.model_version;
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const PipelineContext ctx{*snap.corpus, *snap.delta, snap.model.get(), config_};
    TeamSlate computed = form_teams(method, call, ctx);
    std::lock_guard lock(cache_mutex_);
    return cache_.emplace(key, std::move(computed)).first->second;
}

Json RecommendationEngine::team_json(const Corpus& corpus, const ScoredTeam& team) const {
    Json members = Json::array();
    for (const auto& id : team.team.members) {
        const Researcher* r = corpus.find_researcher(id);
        members.push_back({{"id", id}, {"name", r != nullptr ? r->name : id}});
    }
    const auto& b = team.breakdown;
    return Json{{"members", members},
                {"goodness", b.goodness},
                {"breakdown",
                 {{"redundancy", b.redundancy},
                  {"set_size", b.set_size_norm},
                  {"coverage", b.coverage},
                  {"k_robustness", b.k_robustness_norm},
                  {"k_robust", b.k_robust}}}};
}

namespace {

Json call_summary(const Call& call) {
    Json skills = Json::array();
    for (const auto& s : call.demanded_skills) skills.push_back(s.text());
    return Json{{"id", call.id}, {"title", call.title}, {"source", call.source}, {"skills", skills}};
}

}  // namespace

Json RecommendationEngine::researcher_slates(const Snapshot& snap, const Corpus& corpus,
                                             const std::string& researcher_id, Method method, int k,
                                             bool use_cache) const {
    struct Ranked {
        double best;
        const Call* call;
        std::vector<const ScoredTeam*> teams;
    };
    std::vector<TeamSlate> slates;
    slates.reserve(corpus.calls().size());
    const PipelineContext ctx{corpus, *snap.delta, snap.model.get(), config_};
    for (const auto& call : corpus.calls()) {
        slates.push_back(use_cache ? slate(snap, method, call) : form_teams(method, call, ctx));
    }

    std::vector<Ranked> ranked;
    for (std::size_t i = 0; i < slates.size(); ++i) {
        Ranked r{0.0, &corpus.calls()[i], {}};
        for (const auto& team : slates[i].teams) {
            const auto& m = team.team.members;
            if (std::binary_search(m.begin(), m.end(), researcher_id)) r.teams.push_back(&team);
        }
        if (r.teams.empty()) continue;
        r.best = r.teams.front()->breakdown.goodness;  // slates are goodness-sorted
        ranked.push_back(std::move(r));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.best != b.best) return a.best > b.best;
        return a.call->id < b.call->id;
    });
    if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));

    Json out = Json::array();
    for (const auto& r : ranked) {
        Json teams = Json::array();
        for (const ScoredTeam* t : r.teams) teams.push_back(team_json(corpus, *t));
        out.push_back({{"call", call_summary(*r.call)}, {"best_goodness", r.best}, {"teams", teams}});
    }
    return out;
}

Json RecommendationEngine::recommend(const RecommendationRequest& request) const {
    if (request.k < 1 || request.k > kMaxK) {
        throw bad_request("'k' must be in [1, " + std::to_string(kMaxK) + "]");
    }
    const Snapshot snap = snapshot();
    if (request.method == Method::M3 && !snap.model) {
        throw RequestError(409, "MODEL_NOT_TRAINED", "method M3 needs a trained bandit model");
    }
    const auto now = clock_();

    Json slates = Json::array();
    switch (request.mode) {
        case Mode::Call: {
            const Call* call = snap.corpus->find_call(request.subject);
            if (call == nullptr) {
                throw RequestError(404, "SUBJECT_NOT_FOUND", "no call with id '" + request.subject + "'");
            }
            const TeamSlate s = slate(snap, request.method, *call);
            Json teams = Json::array();
            for (std::size_t i = 0; i < s.teams.size() && i < static_cast<std::size_t>(request.k); ++i) {
                teams.push_back(team_json(*snap.corpus, s.teams[i]));
            }
            slates.push_back({{"call", call_summary(*call)}, {"teams", teams}});
            break;
        }
        case Mode::Researcher: {
            if (snap.corpus->find_researcher(request.subject) == nullptr) {
                throw RequestError(404, "SUBJECT_NOT_FOUND", "no researcher with id '" + request.subject + "'");
            }
            slates = researcher_slates(snap, *snap.corpus, request.subject, request.method, request.k, true);
            break;
        }
        case Mode::Interest: {
            auto skill = try_normalize_skill(request.subject);
            if (!skill) throw bad_request("interest text has no word characters");
            std::vector<Researcher> people = snap.corpus->researchers();
            std::string id = "interest:" + skill->text();
            while (snap.corpus->find_researcher(id) != nullptr) id += "'";
            people.push_back(Researcher{id, "Interest: " + skill->text(), SkillSet{*skill}, {}});
            const Corpus augmented(snap.corpus->calls(), std::move(people));
            slates = researcher_slates(snap, augmented, id, request.method, request.k, false);
            break;
        }
    }

    const Json req = request_to_json(request);
    const auto minute = std::chrono::duration_cast<std::chrono::minutes>(now.time_since_epoch()).count();
    const std::string basis =
        req.dump() + '|' + snap.corpus->version() + '|' + snap.model_version + '|' + std::to_string(minute);

    Json out;
    out["recommendation_id"] = to_hex(fnv1a(basis));
    out["mode"] = to_string(request.mode);
    out["use_case"] = use_case(request.mode);
    out["subject"] = request.subject;
    out["method"] = to_string(request.method);
    out["k"] = request.k;
    out["generated_at"] = iso8601(now);
    out["corpus_version"] = snap.corpus->version();
    out["model_version"] = snap.model_version;
    out["slates"] = std::move(slates);
    return out;
}

AppendLog::AppendLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path_.parent_path(), ec);
    }
}

void AppendLog::append(const Json& record) {
    const std::string line = record.dump() + "\n";
    std::lock_guard lock(mutex_);
    const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) throw IoError("cannot open '" + path_.string() + "': " + std::strerror(errno));
    std::size_t done = 0;
    while (done < line.size()) {
        const ssize_t n = ::write(fd, line.data() + done, line.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            ::close(fd);
            throw IoError("cannot append to '" + path_.string() + "': " + std::strerror(err));
        }
        done += static_cast<std::size_t>(n);
    }
    const bool synced = ::fsync(fd) == 0;
    ::close(fd);
    if (!synced) throw IoError("cannot sync '" + path_.string() + "'");
}

std::vector<Json> AppendLog::read_all() const {
    std::lock_guard lock(mutex_);
    std::vector<Json> out;
    if (!std::filesystem::exists(path_)) return out;
    const std::string text = read_file(path_);
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) break;  // torn final write
        const std::string_view line(text.data() + pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        try {
            out.push_back(Json::parse(line));
        } catch (const Json::parse_error& e) {
            throw IoError("corrupt record in '" + path_.string() + "': " + e.what());
        }
    }
    return out;
}

RecommendationRegistry::RecommendationRegistry(std::filesystem::path log_path) : log_(std::move(log_path)) {
    for (auto& rec : log_.read_all()) {
        if (!rec.contains("recommendation_id")) continue;
        // id first: the right side of = is evaluated before the left
        std::string id = rec["recommendation_id"].get<std::string>();
        issued_.insert_or_assign(std::move(id), std::move(rec));
    }
}

void RecommendationRegistry::record(const Json& response) {
    const std::string id = response.at("recommendation_id").get<std::string>();
    std::lock_guard lock(mutex_);
    if (issued_.count(id) != 0) return;
    log_.append(response);
    issued_.emplace(id, response);
}

std::optional<IssuedRecommendation> RecommendationRegistry::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = issued_.find(id);
    if (it == issued_.end()) return std::nullopt;
    return IssuedRecommendation{id, it->second.value("use_case", ""), it->second.value("method", "")};
}

std::optional<Json> RecommendationRegistry::response(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = issued_.find(id);
    if (it == issued_.end()) return std::nullopt;
    return it->second;
}

Json feedback_to_json(const FeedbackRecord& r) {
    return Json{{"recommendation_id", r.recommendation_id},
                {"relevance", r.relevance},
                {"usefulness", r.usefulness},
                {"comment", r.comment},
                {"submitted_at", r.submitted_at},
                {"use_case", r.use_case},
                {"method", r.method}};
}

FeedbackRecord feedback_from_json(const Json& j) {
    FeedbackRecord r;
    r.recommendation_id = j.value("recommendation_id", "");
    r.relevance = j.value("relevance", 0);
    r.usefulness = j.value("usefulness", 0);
    r.comment = j.value("comment", "");
    r.submitted_at = j.value("submitted_at", "");
    r.use_case = j.value("use_case", "");
    r.method = j.value("method", "");
    return r;
}

FeedbackStore::FeedbackStore(std::filesystem::path log_path) : log_(std::move(log_path)) {}

void FeedbackStore::submit(const FeedbackRecord& record) {
    const auto likert = [](int v) { return v >= 1 && v <= 5; };
    if (!likert(record.relevance) || !likert(record.usefulness)) {
        throw RequestError(400, "LIKERT_OUT_OF_RANGE", "relevance and usefulness must be integers in [1, 5]");
    }
    log_.append(feedback_to_json(record));
}

std::vector<FeedbackRecord> FeedbackStore::records() const {
    std::vector<FeedbackRecord> out;
    for (const auto& j : log_.read_all()) out.push_back(feedback_from_json(j));
    return out;
}

double percent(std::size_t part, std::size_t total) {
    if (total == 0) return 0.0;
    return std::round(10000.0 * static_cast<double>(part) / static_cast<double>(total)) / 100.0;
}

Json feedback_summary(const std::vector<FeedbackRecord>& records) {
    const std::size_t total = records.size();
    std::size_t relevance[6] = {};
    std::size_t usefulness[6] = {};
    std::map<std::string, std::size_t> by_use_case;
    std::map<std::string, std::size_t> by_method;
    std::map<std::tuple<std::string, std::string, int, int>, std::size_t> cells;
    for (const auto& r : records) {
        if (r.relevance >= 1 && r.relevance <= 5) ++relevance[r.relevance];
        if (r.usefulness >= 1 && r.usefulness <= 5) ++usefulness[r.usefulness];
        ++by_use_case[r.use_case];
        ++by_method[r.method];
        ++cells[{r.use_case, r.method, r.relevance, r.usefulness}];
    }

    const auto scale = [&](const std::size_t (&counts)[6]) {
        Json c = Json::object();
        Json p = Json::object();
        for (int level = 1; level <= 5; ++level) {
            c[std::to_string(level)] = counts[level];
            p[std::to_string(level)] = percent(counts[level], total);
        }
        return Json{{"counts", c}, {"percentages", p}};
    };
    const auto tally = [&](const std::map<std::string, std::size_t>& m) {
        Json out = Json::object();
        for (const auto& [key, n] : m) out[key] = {{"count", n}, {"percentage", percent(n, total)}};
        return out;
    };

    Json cell_list = Json::array();
    for (const auto& [key, n] : cells) {
        const auto& [uc, method, rel, use] = key;
        cell_list.push_back({{"use_case", uc},
                             {"method", method},
                             {"relevance", rel},
                             {"usefulness", use},
                             {"count", n},
                             {"percentage", percent(n, total)}});
    }

    // top two boxes: 5 = "very", 4 = "somewhat"
    return Json{{"total", total},
                {"relevance", scale(relevance)},
                {"usefulness", scale(usefulness)},
                {"relevant_share", percent(relevance[5] + relevance[4], total)},
                {"useful_share", percent(usefulness[5] + usefulness[4], total)},
                {"by_use_case", tally(by_use_case)},
                {"by_method", tally(by_method)},
                {"cells", cell_list}};
}

}  // namespace teaming::service

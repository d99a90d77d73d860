#include <doctest.h>

#include <fstream>
#include <thread>

#include "../checks.hpp"
#include "../support.hpp"
#include "teaming/http.hpp"
#include "teaming/service.hpp"

using namespace teaming;
using namespace teaming::service;

namespace {

const auto kNoon = std::chrono::system_clock::time_point(std::chrono::seconds(1767268800));
Clock fixed_clock() {
    return [] { return kNoon; };
}

int count_lines(const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) return 0;
    const auto text = read_file(p);
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

// Engine, registry, feedback store and API over one directory.
struct Stack {
    explicit Stack(const std::filesystem::path& dir, Corpus corpus = test::fixture_corpus(), ModelLoader reload = {})
        : engine(std::make_shared<const Corpus>(std::move(corpus)), test::shared_delta(), TeamingConfig{}, nullptr,
                 fixed_clock()),
          registry(dir / "recommendations.ndjson"),
          feedback(dir / "feedback.ndjson"),
          api(engine, registry, feedback, fixed_clock(), std::move(reload)) {}

    ApiResponse get(const std::string& path, std::map<std::string, std::string> query = {}) {
        return api.handle({"GET", path, std::move(query), {}});
    }
    ApiResponse post(const std::string& path, const Json& body) { return api.handle({"POST", path, {}, body.dump()}); }

    RecommendationEngine engine;
    RecommendationRegistry registry;
    FeedbackStore feedback;
    Api api;
};

std::string error_code(const ApiResponse& r) { return Json::parse(r.body)["error"]["code"].get<std::string>(); }

Json rec(const char* mode, const char* subject, const char* method, int k = 5) {
    return {{"mode", mode}, {"subject", subject}, {"method", method}, {"k", k}};
}

bandit::BanditModel gate_model() {
    bandit::BanditModel m;
    m.iterations = 1;
    m.trees.emplace_back(std::vector<bandit::RegressionTree::Node>{{4, 0.25, 1, 2, 0.0}, {-1, 0, -1, -1, -10}, {-1, 0, -1, -1, 5}});
    return m;
}

}  // namespace

TEST_CASE("request parsing") {
    CHECK(parse_request(rec("UC2", "x", "M1")).mode == Mode::Call);
    CHECK(parse_request(Json{{"mode", "interest"}, {"subject", "ai"}, {"method", "M2"}}).k == 5);
    auto code_of = [](const Json& body) {
        try {
            parse_request(body);
        } catch (const RequestError& e) {
            CHECK(e.status() == 400);
            return e.code();
        }
        return std::string("none");
    };
    CHECK(code_of(rec("nobody", "x", "M1")) == "INVALID_REQUEST");
    CHECK(code_of(rec("call", "x", "M9")) == "METHOD_INVALID");
    CHECK(code_of(rec("call", "x", "M1", 0)) == "INVALID_REQUEST");
    CHECK(code_of(rec("call", "x", "M1", 51)) == "INVALID_REQUEST");
    CHECK(code_of(Json{{"mode", "call"}, {"method", "M1"}}) == "INVALID_REQUEST");
    CHECK(code_of(Json::array()) == "INVALID_REQUEST");
}

TEST_CASE("listing endpoints paginate") {
    test::TempDir dir;
    Stack s(dir.path());
    const auto all = Json::parse(s.get("/calls").body);
    CHECK(all["items"].size() == 3);
    CHECK(all["total"] == 3);
    CHECK(all["next_offset"].is_null());
    const auto page = Json::parse(s.get("/calls", {{"limit", "2"}}).body);
    CHECK(page["items"].size() == 2);
    CHECK(page["next_offset"] == 2);
    const auto rest = Json::parse(s.get("/calls", {{"limit", "2"}, {"offset", "2"}}).body);
    CHECK(rest["items"].size() == 1);
    CHECK(rest["items"][0]["id"] == "NSF-001");
    CHECK(Json::parse(s.get("/researchers").body)["total"] == 7);
    CHECK(s.get("/calls", {{"limit", "0"}}).status == 400);
    CHECK(s.get("/calls", {{"limit", "x"}}).status == 400);

    test::TempDir empty_dir;
    Stack empty(empty_dir.path(), Corpus());
    const auto none = empty.get("/calls");
    CHECK(none.status == 200);
    CHECK(Json::parse(none.body)["items"].empty());
}

TEST_CASE("use cases") {
    test::TempDir dir;
    Stack s(dir.path());

    SUBCASE("UC2 returns at most k teams in goodness order") {
        const auto r = s.post("/recommend", rec("call", "NSF-001", "M1", 3));
        REQUIRE(r.status == 200);
        const auto body = Json::parse(r.body);
        CHECK(body["use_case"] == "UC2");
        CHECK(body["model_version"] == "none");
        CHECK(body["generated_at"] == "2026-01-01T12:00:00Z");
        const auto& teams = body["slates"][0]["teams"];
        CHECK(teams.size() >= 1);
        CHECK(teams.size() <= 3);
        for (std::size_t i = 1; i < teams.size(); ++i) CHECK(teams[i - 1]["goodness"] >= teams[i]["goodness"]);
        const auto& b = teams[0]["breakdown"];
        for (const char* key : {"redundancy", "set_size", "coverage", "k_robustness", "k_robust"}) CHECK(b.contains(key));
    }
    SUBCASE("UC1 for a researcher matching nothing is empty but OK") {
        const auto r = s.post("/recommend", rec("researcher", "r07", "M1"));
        CHECK(r.status == 200);
        CHECK(Json::parse(r.body)["slates"].empty());
    }
    SUBCASE("UC1 lists calls whose teams include the researcher") {
        const auto body = Json::parse(s.post("/recommend", rec("researcher", "r04", "M1")).body);
        REQUIRE(body["slates"].size() == 1);
        CHECK(body["slates"][0]["call"]["id"] == "BIO-001");
        for (const auto& t : body["slates"][0]["teams"]) {
            bool member = false;
            for (const auto& m : t["members"]) member = member || m["id"] == "r04";
            CHECK(member);
        }
    }
    SUBCASE("UC3 finds only calls whose codes overlap the interest") {
        const auto body = Json::parse(s.post("/recommend", rec("interest", "artificial intelligence", "M2")).body);
        REQUIRE(body["slates"].size() == 1);
        CHECK(body["slates"][0]["call"]["id"] == "AI-001");
        CHECK(body["use_case"] == "UC3");
        CHECK(s.post("/recommend", rec("interest", " ?! ", "M2")).status == 400);
    }
    SUBCASE("errors") {
        const auto missing = s.post("/recommend", rec("call", "NOPE", "M1"));
        CHECK(missing.status == 404);
        CHECK(error_code(missing) == "SUBJECT_NOT_FOUND");
        CHECK(s.post("/recommend", rec("researcher", "nobody", "M1")).status == 404);
        const auto untrained = s.post("/recommend", rec("call", "AI-001", "M3"));
        CHECK(untrained.status == 409);
        CHECK(error_code(untrained) == "MODEL_NOT_TRAINED");
        CHECK(error_code(s.post("/recommend", rec("call", "AI-001", "M7"))) == "METHOD_INVALID");
        CHECK(s.api.handle({"POST", "/recommend", {}, "{oops"}).status == 400);
        CHECK(s.get("/nowhere").status == 404);
        CHECK(s.post("/model/reload", Json::object()).status == 409);
    }
    SUBCASE("ids are stable for equal requests") {
        const auto a = Json::parse(s.post("/recommend", rec("call", "NSF-001", "M2")).body);
        const auto b = Json::parse(s.post("/recommend", rec("call", "NSF-001", "M2")).body);
        const auto c = Json::parse(s.post("/recommend", rec("call", "NSF-001", "M1")).body);
        CHECK(a == b);
        CHECK(a["recommendation_id"] != c["recommendation_id"]);
        CHECK(count_lines(dir / "recommendations.ndjson") == 2);
        const auto again = s.get("/recommendations/" + a["recommendation_id"].get<std::string>());
        CHECK(again.status == 200);
        CHECK(Json::parse(again.body) == a);
        CHECK(error_code(s.get("/recommendations/unknown")) == "RECOMMENDATION_NOT_FOUND");
    }
}

TEST_CASE("model reload enables M3") {
    test::TempDir dir;
    auto model = std::make_shared<const bandit::BanditModel>(gate_model());
    Stack s(dir.path(), test::fixture_corpus(), [model] { return model; });
    CHECK(s.post("/recommend", rec("call", "NSF-001", "M3")).status == 409);
    const auto reload = s.post("/model/reload", Json::object());
    REQUIRE(reload.status == 200);
    const auto version = Json::parse(reload.body)["model_version"].get<std::string>();
    CHECK(version == model_version(model.get()));
    const auto r = s.post("/recommend", rec("call", "NSF-001", "M3"));
    REQUIRE(r.status == 200);
    const auto body = Json::parse(r.body);
    CHECK(body["model_version"] == version);
    CHECK_FALSE(body["slates"][0]["teams"].empty());
}

TEST_CASE("feedback capture") {
    test::TempDir dir;
    Stack s(dir.path());
    const auto id = Json::parse(s.post("/recommend", rec("call", "NSF-001", "M1")).body)["recommendation_id"];
    const auto log = dir / "feedback.ndjson";

    CHECK(s.post("/feedback", {{"recommendation_id", id}, {"relevance", 5}, {"usefulness", 5}, {"comment", "great"}})
              .status == 200);
    CHECK(count_lines(log) == 1);
    const auto first = read_file(log);
    const auto stored = s.feedback.records().at(0);
    CHECK(stored.use_case == "UC2");
    CHECK(stored.method == "M1");
    CHECK(stored.comment == "great");
    CHECK(stored.submitted_at == "2026-01-01T12:00:00Z");

    const auto bad = s.post("/feedback", {{"recommendation_id", id}, {"relevance", 6}, {"usefulness", 5}});
    CHECK(bad.status == 400);
    CHECK(error_code(bad) == "LIKERT_OUT_OF_RANGE");
    CHECK(s.post("/feedback", {{"recommendation_id", id}, {"relevance", 0}, {"usefulness", 5}}).status == 400);
    CHECK(s.post("/feedback", {{"recommendation_id", id}, {"relevance", "5"}, {"usefulness", 5}}).status == 400);
    CHECK(s.post("/feedback", {{"relevance", 5}, {"usefulness", 5}}).status == 400);
    CHECK(s.post("/feedback", {{"recommendation_id", "never"}, {"relevance", 5}, {"usefulness", 5}}).status == 404);
    CHECK(count_lines(log) == 1);

    CHECK(s.post("/feedback", {{"recommendation_id", id}, {"relevance", 3}, {"usefulness", 4}}).status == 200);
    const auto second = read_file(log);
    CHECK(second.rfind(first, 0) == 0);  // append-only
    CHECK(count_lines(log) == 2);
}

TEST_CASE("feedback survives a restart") {
    test::TempDir dir;
    std::string id;
    {
        Stack s(dir.path());
        id = Json::parse(s.post("/recommend", rec("call", "AI-001", "M2")).body)["recommendation_id"];
        REQUIRE(s.post("/feedback", {{"recommendation_id", id}, {"relevance", 5}, {"usefulness", 5}}).status == 200);
    }
    Stack restarted(dir.path());
    const auto summary = Json::parse(restarted.get("/feedback/summary").body);
    CHECK(summary["total"] == 1);
    CHECK(summary["by_use_case"]["UC2"]["count"] == 1);
    CHECK(restarted.post("/feedback", {{"recommendation_id", id}, {"relevance", 4}, {"usefulness", 4}}).status == 200);
    CHECK(count_lines(dir / "feedback.ndjson") == 2);
}

TEST_CASE("append log recovery") {
    test::TempDir dir;
    const auto path = dir / "log.ndjson";
    {
        AppendLog log(path);
        log.append({{"n", 1}});
        log.append({{"n", 2}});
    }
    {
        std::ofstream torn(path, std::ios::app);
        torn << "{\"n\": 3";  // crash mid-write
    }
    CHECK(AppendLog(path).read_all().size() == 2);
    write_file(path, "{\"n\": 1}\nnot json\n{\"n\": 2}\n");
    CHECK_THROWS_AS(AppendLog(path).read_all(), IoError);
    CHECK(AppendLog(dir / "absent.ndjson").read_all().empty());
}

TEST_CASE("feedback summary arithmetic") {
    CHECK(percent(191, 212) == 90.09);
    CHECK(percent(207, 212) == 97.64);
    CHECK(percent(0, 0) == 0.0);

    const auto empty = feedback_summary({});
    CHECK(empty["total"] == 0);
    for (int level = 1; level <= 5; ++level) CHECK(empty["relevance"]["counts"][std::to_string(level)] == 0);
    CHECK(empty["cells"].empty());

    const auto one = feedback_summary({{"id", 4, 2, "", "t", "UC1", "M2"}});
    REQUIRE(one["cells"].size() == 1);
    CHECK(one["cells"][0]["count"] == 1);
    CHECK(one["cells"][0]["use_case"] == "UC1");
    CHECK(one["relevant_share"] == 100.0);
    CHECK(one["useful_share"] == 0.0);
}

TEST_CASE("service contract sweep") {
    const auto r = checks::service_contract();
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("concurrent requests and feedback") {
    test::TempDir dir;
    Stack s(dir.path());
    const auto id = Json::parse(s.post("/recommend", rec("call", "NSF-001", "M2")).body)["recommendation_id"];
    std::vector<std::thread> threads;
    std::atomic<int> failures{0};
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 10; ++i) {
                const char* subjects[] = {"AI-001", "BIO-001", "NSF-001"};
                if (s.post("/recommend", rec("call", subjects[(t + i) % 3], t % 2 ? "M1" : "M2")).status != 200) ++failures;
                if (s.post("/feedback", {{"recommendation_id", id}, {"relevance", 1 + i % 5}, {"usefulness", 5}}).status != 200) {
                    ++failures;
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(failures == 0);
    CHECK(count_lines(dir / "feedback.ndjson") == 40);
    CHECK(s.feedback.records().size() == 40);
}

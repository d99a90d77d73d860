#include <doctest.h>

#include "../support.hpp"
#include "teaming/corpus.hpp"
#include "teaming/error.hpp"

using namespace teaming;

namespace {

const char* kCalls = R"([
  {"id": "NSF-001", "title": "Machine learning for science", "synopsis": "", "source": "nsf"},
  {"id": "NSF-002", "title": "Quantum computing", "synopsis": "Seeking quantum algorithms.", "skills": ["Quantum Algorithms"]}
])";

const char* kResearchers = R"([
  {"id": "r1", "name": "Ana", "interests": ["machine learning"]},
  {"id": "r2", "name": "Bo", "interests": ["quantum algorithms", "Graph Theory"], "profile_urls": ["https://example.org/bo"]},
  {"id": "r3", "name": "Cy", "interests": ["optics"]}
])";

}  // namespace

TEST_CASE("well-formed corpus loads completely") {
    const auto c = parse_corpus(kCalls, kResearchers);
    CHECK(c.calls().size() == 2);
    CHECK(c.researchers().size() == 3);
    CHECK(c.load_report().empty());
    REQUIRE(c.find_call("NSF-002"));
    CHECK(c.find_call("NSF-002")->demanded_skills.count(normalize_skill("quantum algorithms")) == 1);
    CHECK(c.find_call("NSF-001")->demanded_skills.count(normalize_skill("machine learning")) == 1);
    CHECK(c.find_researcher("r2")->profile_urls.size() == 1);
    CHECK(c.find_researcher("zz") == nullptr);
}

TEST_CASE("researcher with no interests is skipped with a diagnostic") {
    const auto c = parse_corpus(kCalls, R"([{"id": "r1", "name": "A", "interests": []},
                                            {"id": "r2", "name": "B", "interests": ["optics"]}])");
    CHECK(c.researchers().size() == 1);
    REQUIRE(c.load_report().size() == 1);
    CHECK(c.load_report()[0].file == "researchers");
    CHECK(c.load_report()[0].id == "r1");
}

TEST_CASE("duplicate ids are fatal and named") {
    const char* dup = R"([{"id": "NSF-001", "title": "a", "synopsis": "", "skills": ["x"]},
                          {"id": "NSF-001", "title": "b", "synopsis": "", "skills": ["y"]}])";
    try {
        parse_corpus(dup, kResearchers);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("NSF-001") != std::string::npos);
    }
}

TEST_CASE("malformed JSON reports line and column") {
    try {
        parse_corpus("[\n  {\"id\": }\n]", "[]");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() > 0);
    }
    CHECK_THROWS_AS(parse_corpus("{}", "[]"), ValidationError);
    CHECK_THROWS_AS(load_corpus("/nonexistent/calls.json", "/nonexistent/r.json"), IoError);
}

TEST_CASE("snapshot round trip preserves content and version") {
    const auto c = parse_corpus(kCalls, kResearchers);
    test::TempDir dir;
    write_snapshot(c, dir.path());
    const auto back = load_corpus_dir(dir.path());
    CHECK(back.version() == c.version());
    CHECK(calls_to_json(back) == calls_to_json(c));
    CHECK(researchers_to_json(back) == researchers_to_json(c));
    CHECK(std::filesystem::exists(dir / "report.json"));
}

TEST_CASE("Corpus constructor enforces invariants") {
    CHECK_THROWS_AS(Corpus({test::make_call("a", {"x"}), test::make_call("a", {"y"})}, {}), ValidationError);
    CHECK_THROWS_AS(Corpus({Call{"a", "t", "", {}, ""}}, {}), ValidationError);
    CHECK_NOTHROW(Corpus({}, {}));
}

#include <doctest.h>

#include "../support.hpp"
#include "teaming/error.hpp"
#include "teaming/evalharness.hpp"
#include "teaming/methods.hpp"
#include "teaming/pipeline.hpp"

using namespace teaming;
using test::make_call;
using test::make_researcher;

namespace {

std::vector<std::string> ids(const std::vector<RankedCandidate>& c) {
    std::vector<std::string> out;
    for (const auto& x : c) out.push_back(x.researcher_id);
    return out;
}

RankedCandidate cand(std::string id, std::set<std::string> skills) {
    const double n = static_cast<double>(skills.size());
    return {std::move(id), n, 0.0, std::move(skills)};
}

}  // namespace

TEST_CASE("method names") {
    CHECK(parse_method("M2") == Method::M2);
    CHECK(parse_method("m3") == Method::M3);
    CHECK_FALSE(parse_method("M4"));
    CHECK(to_string(Method::M0) == "M0");
}

TEST_CASE("M0 is deterministic in its seed") {
    const Corpus corpus = test::fixture_corpus();
    const auto& call = corpus.calls()[0];
    const TeamingConfig cfg;
    const auto a = m0_random_teams(call, corpus, 9, cfg);
    const auto b = m0_random_teams(call, corpus, 9, cfg);
    REQUIRE(a.teams.size() == b.teams.size());
    for (std::size_t i = 0; i < a.teams.size(); ++i) CHECK(a.teams[i].team.members == b.teams[i].team.members);
    CHECK_FALSE(a.teams.empty());
}

TEST_CASE("M0 with two researchers always pairs them") {
    const Corpus corpus({make_call("c", {"x"})}, {make_researcher("a", {"x"}), make_researcher("b", {"y"})});
    const auto slate = m0_random_teams(corpus.calls()[0], corpus, 1, {});
    REQUIRE_FALSE(slate.teams.empty());
    for (const auto& t : slate.teams) CHECK(t.team.members == std::vector<std::string>{"a", "b"});
    const Corpus lonely({make_call("c", {"x"})}, {make_researcher("a", {"x"})});
    CHECK_THROWS_AS(m0_random_teams(lonely.calls()[0], lonely, 1, {}), InsufficientSupply);
}

TEST_CASE("M0 volume saturates at the cap on a large corpus") {
    eval::SyntheticCorpusSpec spec;
    spec.n_calls = 434;
    spec.n_researchers = 200;
    const auto& delta = test::bundled_delta();
    const Corpus corpus = eval::synthesize_corpus(spec, delta, {});
    bandit::BanditModel silent;  // P well below p_min everywhere
    silent.psi0 = -20.0;
    const auto rows = eval::evaluate(corpus, delta, &silent, {});
    CHECK(rows[0].method == Method::M0);
    CHECK(rows[0].avg_volume == 10.0);
}

TEST_CASE("M1 candidates need a string match at t_m1") {
    const Corpus corpus({make_call("c", {"machine learning"})},
                        {make_researcher("ml", {"machine learning"}), make_researcher("mb", {"marine biology"})});
    CHECK(ids(m1_candidates(corpus.calls()[0], corpus, 0.8)) == std::vector<std::string>{"ml"});

    const Corpus none({make_call("c", {"machine learning"})},
                      {make_researcher("a", {"optics"}), make_researcher("b", {"ecology"})});
    CHECK(m1_string_teams(none.calls()[0], none, {}).teams.empty());
}

TEST_CASE("the stronger M1 candidate seeds team 1") {
    const Corpus corpus({make_call("c", {"alpha", "beta", "gamma", "delta"})},
                        {make_researcher("weak", {"delta"}), make_researcher("strong", {"alpha", "beta", "gamma"})});
    const auto& call = corpus.calls()[0];
    const auto ranked = m1_candidates(call, corpus, 0.8);
    CHECK(ids(ranked) == std::vector<std::string>{"strong", "weak"});
    CHECK(ranked[0].score == 3.0);
    const auto slate = m1_string_teams(call, corpus, {});
    REQUIRE(slate.teams.size() == 1);  // the second seed rebuilds the same pair
    CHECK(slate.teams[0].team.members == std::vector<std::string>{"strong", "weak"});
    CHECK(slate.teams[0].breakdown.coverage == 1.0);
}

TEST_CASE("M2 admits taxonomy neighbours M1 rejects") {
    const auto& delta = test::bundled_delta();
    const Corpus corpus({make_call("c", {"natural language processing"})},
                        {make_researcher("kr", {"knowledge representation"})});
    const auto& call = corpus.calls()[0];
    CHECK(m1_candidates(call, corpus, 0.8).empty());
    CHECK(ids(m2_candidates(call, corpus, delta, 0.7)) == std::vector<std::string>{"kr"});

    const Corpus unmapped({make_call("c", {"basket weaving"})}, {make_researcher("x", {"basket weaving"})});
    CHECK(m2_candidates(unmapped.calls()[0], unmapped, delta, 0.7).empty());
}

TEST_CASE("M2 candidates contain M1 candidates when interests are concept names") {
    const auto& delta = test::bundled_delta();
    const Corpus corpus({make_call("c", {"computer vision", "cryptography", "machine learning"})},
                        {make_researcher("a", {"computer vision"}), make_researcher("b", {"cryptography", "robotics"}),
                         make_researcher("c", {"machine learning"}), make_researcher("d", {"planning and scheduling"}),
                         make_researcher("e", {"information retrieval"})});
    const auto m1 = ids(m1_candidates(corpus.calls()[0], corpus, 0.8));
    auto m2 = ids(m2_candidates(corpus.calls()[0], corpus, delta, 0.7));
    std::sort(m2.begin(), m2.end());
    for (const auto& id : m1) CHECK(std::binary_search(m2.begin(), m2.end(), id));
    CHECK(m2.size() > m1.size());
}

TEST_CASE("build_teams policy") {
    const Corpus corpus({make_call("c", {"a", "b", "c"})},
                        {make_researcher("p", {"a"}), make_researcher("q", {"b"}), make_researcher("r", {"c"}),
                         make_researcher("s", {"a", "b", "c"}), make_researcher("t", {"a", "b", "c"})});
    const auto& call = corpus.calls()[0];
    const auto matcher = string_matcher(0.8);
    const TeamingConfig cfg;

    SUBCASE("a lone candidate has no filler") {
        std::vector<RankedCandidate> one{cand("s", {"a", "b", "c"})};
        CHECK(build_teams(call, one, corpus, matcher, Method::M1, cfg).teams.empty());
    }
    SUBCASE("a complete candidate takes the next-ranked filler") {
        std::vector<RankedCandidate> two{cand("s", {"a", "b", "c"}), cand("p", {"a"})};
        const auto slate = build_teams(call, two, corpus, matcher, Method::M1, cfg);
        REQUIRE(slate.teams.size() == 1);
        CHECK(slate.teams[0].team.members == std::vector<std::string>{"p", "s"});
    }
    SUBCASE("disjoint thirds join into one covering team") {
        std::vector<RankedCandidate> thirds{cand("p", {"a"}), cand("q", {"b"}), cand("r", {"c"})};
        const auto slate = build_teams(call, thirds, corpus, matcher, Method::M1, cfg);
        REQUIRE(slate.teams.size() == 1);
        CHECK(slate.teams[0].team.members == std::vector<std::string>{"p", "q", "r"});
        CHECK(slate.teams[0].breakdown.coverage == 1.0);
    }
    SUBCASE("identical candidates deduplicate") {
        std::vector<RankedCandidate> same{cand("s", {"a", "b", "c"}), cand("t", {"a", "b", "c"})};
        CHECK(build_teams(call, same, corpus, matcher, Method::M1, cfg).teams.size() == 1);
    }
    SUBCASE("slates are sorted and within limits") {
        auto ranked = m1_candidates(call, corpus, 0.8);
        const auto slate = build_teams(call, ranked, corpus, matcher, Method::M1, cfg);
        CHECK(slate.teams.size() <= static_cast<std::size_t>(cfg.max_teams));
        for (std::size_t i = 0; i < slate.teams.size(); ++i) {
            const auto& t = slate.teams[i];
            CHECK(t.team.members.size() >= 2);
            CHECK(t.team.members.size() <= static_cast<std::size_t>(cfg.max_team_size));
            CHECK(std::is_sorted(t.team.members.begin(), t.team.members.end()));
            CHECK(rescore(t.team, call, corpus, matcher, cfg).goodness == t.breakdown.goodness);
            if (i > 0) CHECK(slate.teams[i - 1].breakdown.goodness >= t.breakdown.goodness);
        }
    }
}

TEST_CASE("rank_candidates orders by score, tie-break, then id") {
    std::vector<RankedCandidate> c{{"b", 1, 0.5, {}}, {"a", 1, 0.5, {}}, {"c", 2, 0.0, {}}, {"d", 1, 0.9, {}}};
    rank_candidates(c);
    CHECK(ids(c) == std::vector<std::string>{"c", "d", "a", "b"});
}

TEST_CASE("pipeline dispatch") {
    const Corpus corpus = test::fixture_corpus();
    const PipelineContext ctx{corpus, test::bundled_delta(), nullptr, {}};
    CHECK_THROWS_AS(form_teams(Method::M3, corpus.calls()[0], ctx), ModelNotTrained);
    CHECK(form_teams(Method::M1, corpus.calls()[2], ctx).method == Method::M1);
    CHECK(m0_seed(ctx.config, corpus.calls()[0]) != m0_seed(ctx.config, corpus.calls()[1]));
}

TEST_CASE("TeamingConfig validation") {
    TeamingConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.max_team_size = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.t_m1 = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

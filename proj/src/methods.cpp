#include "teaming/methods.hpp"

#include <algorithm>
#include <map>

#include "teaming/error.hpp"
#include "teaming/random.hpp"
#include "teaming/skills.hpp"

namespace teaming {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::M0: return "M0";
        case Method::M1: return "M1";
        case Method::M2: return "M2";
        case Method::M3: return "M3";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view text) {
    for (auto m : kAllMethods) {
        if (to_string(m) == text) return m;
    }
    if (text == "m0") return Method::M0;
    if (text == "m1") return Method::M1;
    if (text == "m2") return Method::M2;
    if (text == "m3") return Method::M3;
    return std::nullopt;
}

void TeamingConfig::validate() const {
    if (!(t_m1 > 0.0 && t_m1 <= 1.0)) throw ConfigError("t_m1 must be in (0, 1]");
    if (!(t_m2 > 0.0 && t_m2 <= 1.0)) throw ConfigError("t_m2 must be in (0, 1]");
    if (max_teams < 1) throw ConfigError("max_teams must be >= 1");
    if (max_team_size < 2) throw ConfigError("max_team_size must be >= 2");
    if (scoring.size_norm_max < 2) throw ConfigError("size_norm_max must be >= 2");
    if (!(p_min >= 0.0 && p_min <= 1.0)) throw ConfigError("p_min must be in [0, 1]");
    scoring.weights.validate();
}

Matcher string_matcher(double t_m1) {
    return [t_m1](const Skill& skill, const Researcher& r) {
        return skills::skill_match(skill, r.interests, t_m1).has_value();
    };
}

Matcher taxonomy_matcher(const DeltaMapper& delta, double t_m2) {
    return [&delta, t_m2](const Skill& skill, const Researcher& r) {
        return profiles_overlap(delta.profile(skill, t_m2), delta.profile(r.interests, t_m2));
    };
}

void rank_candidates(std::vector<RankedCandidate>& candidates) {
    std::sort(candidates.begin(), candidates.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.tie_break != b.tie_break) return a.tie_break > b.tie_break;
        return a.researcher_id < b.researcher_id;
    });
}

namespace {

ScoredTeam make_team(const Call& call, std::vector<std::string> members, const Corpus& corpus,
                     const Matcher& holder_matcher, const TeamingConfig& config) {
    std::sort(members.begin(), members.end());
    std::vector<const Researcher*> people;
    people.reserve(members.size());
    for (const auto& id : members) {
        const Researcher* r = corpus.find_researcher(id);
        if (r == nullptr) throw NotFound("researcher '" + id + "' is not in the corpus");
        people.push_back(r);
    }
    ScoredTeam out;
    out.team.call_id = call.id;
    out.team.per_skill_holders = metrics::compute_holders(people, call.demanded_skills, holder_matcher);
    out.breakdown = metrics::score(out.team.per_skill_holders, call.demanded_skills, members.size(), config.scoring);
    out.team.members = std::move(members);
    return out;
}

void sort_slate(TeamSlate& slate) {
    std::stable_sort(slate.teams.begin(), slate.teams.end(), [](const ScoredTeam& a, const ScoredTeam& b) {
        return a.breakdown.goodness > b.breakdown.goodness;
    });
}

}  // namespace

TeamSlate build_teams(const Call& call, std::span<const RankedCandidate> ranked, const Corpus& corpus,
                      const Matcher& holder_matcher, Method method, const TeamingConfig& config) {
    TeamSlate slate{call.id, method, {}};
    const std::size_t demand = call.demanded_skills.size();
    const auto max_size = static_cast<std::size_t>(config.max_team_size);
    std::set<std::vector<std::string>> seen;

    const std::size_t seeds = std::min(ranked.size(), static_cast<std::size_t>(config.max_teams));
    for (std::size_t seed = 0; seed < seeds; ++seed) {
        std::vector<std::size_t> members{seed};
        std::set<std::string> covered = ranked[seed].matched_skills;

        auto is_member = [&](std::size_t c) { return std::find(members.begin(), members.end(), c) != members.end(); };

        while (covered.size() < demand && members.size() < max_size) {
            std::optional<std::size_t> pick;
            for (std::size_t c = 0; c < ranked.size(); ++c) {
                if (is_member(c)) continue;
                const auto& skills = ranked[c].matched_skills;
                const bool adds = std::any_of(skills.begin(), skills.end(),
                                              [&](const std::string& s) { return covered.count(s) == 0; });
                if (adds) {
                    pick = c;
                    break;
                }
            }
            if (!pick) break;
            members.push_back(*pick);
            covered.insert(ranked[*pick].matched_skills.begin(), ranked[*pick].matched_skills.end());
        }
        if (members.size() < 2) {
            for (std::size_t c = 0; c < ranked.size(); ++c) {
                if (!is_member(c)) {
                    members.push_back(c);
                    break;
                }
            }
        }
        if (members.size() < 2) continue;

        std::vector<std::string> ids;
        ids.reserve(members.size());
        for (auto c : members) ids.push_back(ranked[c].researcher_id);
        std::sort(ids.begin(), ids.end());
        if (!seen.insert(ids).second) continue;
        slate.teams.push_back(make_team(call, std::move(ids), corpus, holder_matcher, config));
    }
    sort_slate(slate);
    return slate;
}

TeamSlate m0_random_teams(const Call& call, const Corpus& corpus, std::uint64_t rng_seed,
                          const TeamingConfig& config) {
    const auto& people = corpus.researchers();
    if (people.size() < 2) throw InsufficientSupply("random teams need at least two researchers");
    Rng rng(rng_seed);
    const auto matcher = string_matcher(config.t_m1);
    const std::size_t max_size = std::min(static_cast<std::size_t>(config.max_team_size), people.size());

    TeamSlate slate{call.id, Method::M0, {}};
    std::set<std::vector<std::string>> seen;
    std::vector<std::size_t> pool(people.size());
    for (int t = 0; t < config.max_teams; ++t) {
        const auto size = static_cast<std::size_t>(rng.uniform(2, max_size));
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
        // partial Fisher-Yates: the first `size` slots are the sample
        for (std::size_t i = 0; i < size; ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform(i, pool.size() - 1));
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < size; ++i) ids.push_back(people[pool[i]].id);
        std::sort(ids.begin(), ids.end());
        if (!seen.insert(ids).second) continue;
        slate.teams.push_back(make_team(call, std::move(ids), corpus, matcher, config));
    }
    sort_slate(slate);
    return slate;
}

std::vector<RankedCandidate> m1_candidates(const Call& call, const Corpus& corpus, double t_m1) {
    std::vector<RankedCandidate> out;
    for (const auto& r : corpus.researchers()) {
        RankedCandidate c{r.id, 0.0, 0.0, {}};
        double total = 0.0;
        for (const auto& skill : call.demanded_skills) {
            if (auto m = skills::skill_match(skill, r.interests, t_m1)) {
                c.matched_skills.insert(skill.text());
                total += m->score;
            }
        }
        if (c.matched_skills.empty()) continue;
        c.score = static_cast<double>(c.matched_skills.size());
        c.tie_break = total / c.score;
        out.push_back(std::move(c));
    }
    rank_candidates(out);
    return out;
}

TeamSlate m1_string_teams(const Call& call, const Corpus& corpus, const TeamingConfig& config) {
    const auto ranked = m1_candidates(call, corpus, config.t_m1);
    return build_teams(call, ranked, corpus, string_matcher(config.t_m1), Method::M1, config);
}

std::vector<RankedCandidate> m2_candidates(const Call& call, const Corpus& corpus, const DeltaMapper& delta,
                                           double t_m2) {
    const auto call_profile = delta.profile(call.demanded_skills, t_m2);
    std::vector<std::pair<const Skill*, CodeProfile>> per_skill;
    for (const auto& s : call.demanded_skills) per_skill.emplace_back(&s, delta.profile(s, t_m2));

    std::vector<RankedCandidate> out;
    for (const auto& r : corpus.researchers()) {
        const auto rp = delta.profile(r.interests, t_m2);
        if (!profiles_overlap(call_profile, rp)) continue;
        RankedCandidate c{r.id, 0.0, 0.0, {}};
        for (const auto& [skill, sp] : per_skill) {
            if (profiles_overlap(sp, rp)) c.matched_skills.insert(skill->text());
        }
        c.score = static_cast<double>(c.matched_skills.size());
        out.push_back(std::move(c));
    }
    rank_candidates(out);
    return out;
}

TeamSlate m2_taxonomy_teams(const Call& call, const Corpus& corpus, const DeltaMapper& delta,
                            const TeamingConfig& config) {
    const auto ranked = m2_candidates(call, corpus, delta, config.t_m2);
    return build_teams(call, ranked, corpus, taxonomy_matcher(delta, config.t_m2), Method::M2, config);
}

MetricBreakdown rescore(const Team& team, const Call& call, const Corpus& corpus, const Matcher& holder_matcher,
                        const TeamingConfig& config) {
    return make_team(call, team.members, corpus, holder_matcher, config).breakdown;
}

}  // namespace teaming

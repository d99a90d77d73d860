#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teaming/corpus.hpp"
#include "teaming/metrics.hpp"
#include "teaming/taxonomy.hpp"

namespace teaming {

enum class Method { M0, M1, M2, M3 };

inline constexpr Method kAllMethods[] = {Method::M0, Method::M1, Method::M2, Method::M3};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view text);

struct TeamingConfig {
    double t_m1 = 0.8;
    double t_m2 = 0.7;
    int max_teams = 10;
    int max_team_size = 5;
    metrics::ScoringConfig scoring;
    std::uint64_t rng_seed = 42;
    double p_min = 0.5;

    // Throws ConfigError on out-of-range values.
    void validate() const;
};

struct RankedCandidate {
    std::string researcher_id;
    double score = 0.0;
    double tie_break = 0.0;  // secondary key, higher first
    std::set<std::string> matched_skills;
};

struct ScoredTeam {
    Team team;
    MetricBreakdown breakdown;
};

struct TeamSlate {
    std::string call_id;
    Method method = Method::M0;
    std::vector<ScoredTeam> teams;  // goodness descending
};

Matcher string_matcher(double t_m1);
// Holds a reference to delta; delta must outlive the matcher.
Matcher taxonomy_matcher(const DeltaMapper& delta, double t_m2);

// Sorts by score desc, tie_break desc, researcher id asc.
void rank_candidates(std::vector<RankedCandidate>& candidates);

// Seeded greedy coverage. Team i starts from the i-th ranked candidate and
// adds the best-ranked candidate covering an uncovered skill until the
// call is fully covered or the team is full; one-member teams take the
// next-ranked non-member as a filler. Duplicate member sets are dropped.
TeamSlate build_teams(const Call& call, std::span<const RankedCandidate> ranked, const Corpus& corpus,
                      const Matcher& holder_matcher, Method method, const TeamingConfig& config);

// Skill-blind random teams, scored with the string matcher. Throws
// InsufficientSupply with fewer than two researchers.
TeamSlate m0_random_teams(const Call& call, const Corpus& corpus, std::uint64_t rng_seed,
                          const TeamingConfig& config);

std::vector<RankedCandidate> m1_candidates(const Call& call, const Corpus& corpus, double t_m1);
TeamSlate m1_string_teams(const Call& call, const Corpus& corpus, const TeamingConfig& config);

std::vector<RankedCandidate> m2_candidates(const Call& call, const Corpus& corpus, const DeltaMapper& delta,
                                           double t_m2);
TeamSlate m2_taxonomy_teams(const Call& call, const Corpus& corpus, const DeltaMapper& delta,
                            const TeamingConfig& config);

// Recomputes a team's breakdown from scratch.
MetricBreakdown rescore(const Team& team, const Call& call, const Corpus& corpus, const Matcher& holder_matcher,
                        const TeamingConfig& config);

}  // namespace teaming

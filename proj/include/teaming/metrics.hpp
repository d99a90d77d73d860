#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "teaming/corpus.hpp"
#include "teaming/skill.hpp"

namespace teaming {

// demanded skill text -> ids of members whose interests satisfy it
using Holders = std::map<std::string, std::set<std::string>>;

// Method-specific "does this researcher hold this demanded skill" test.
// Must be deterministic.
using Matcher = std::function<bool(const Skill&, const Researcher&)>;

struct Team {
    std::string call_id;
    std::vector<std::string> members;  // sorted, unique
    Holders per_skill_holders;
};

struct MetricBreakdown {
    double redundancy = 0.0;
    double set_size_norm = 0.0;
    double coverage = 0.0;
    double k_robustness_norm = 0.0;  // the robustness term fed to goodness
    int k_robust = 0;
    double goodness = 0.0;
};

struct MetricWeights {
    double redundancy = -1.0;
    double set_size = -1.0;
    double coverage = 1.0;
    double robustness = 1.0;

    // Throws ConfigError unless coverage + robustness > 0.
    void validate() const;
};

namespace metrics {

Holders compute_holders(std::span<const Researcher* const> members, const SkillSet& demand, const Matcher& matcher);

// Fraction of demanded skills held by two or more members.
double redundancy(const Holders& holders, const SkillSet& demand);

// min(1, members / max_team_size); max_team_size must be >= 2.
double set_size_norm(std::size_t members, int max_team_size);

// Fraction of demanded skills held by at least one member.
double coverage(const Holders& holders, const SkillSet& demand);

// Largest k such that removing any k members leaves coverage unchanged:
// min over covered skills of (holders - 1), or team_size - 1 when nothing is
// covered; never above team_size - 1.
int k_robustness(const Holders& holders, const SkillSet& demand, std::size_t team_size);

// k / max(1, team_size - 1)
double robustness_norm(int k, std::size_t team_size);

// clamp((w_cov*cov + w_rob*rob + w_red*red + w_size*size) / (w_cov + w_rob), 0, 1)
double goodness(double coverage, double robustness_norm, double redundancy, double set_size_norm,
                const MetricWeights& weights);

struct ScoringConfig {
    MetricWeights weights;
    int size_norm_max = 10;
};

// Full breakdown for one team. A team that covers nothing keeps its
// vacuous k but earns no robustness credit in goodness.
MetricBreakdown score(const Holders& holders, const SkillSet& demand, std::size_t team_size,
                      const ScoringConfig& config);

}  // namespace metrics

}  // namespace teaming

#include "teaming/metrics.hpp"

#include <algorithm>
#include <limits>

#include "teaming/error.hpp"

namespace teaming {

void MetricWeights::validate() const {
    if (!(coverage + robustness > 0.0)) {
        throw ConfigError("metric weights need w_coverage + w_robustness > 0");
    }
}

namespace metrics {

namespace {

std::size_t holder_count(const Holders& holders, const Skill& skill) {
    auto it = holders.find(skill.text());
    return it == holders.end() ? 0 : it->second.size();
}

void require_demand(const SkillSet& demand) {
    if (demand.empty()) throw ArgumentError("demanded skill set is empty");
}

}  // namespace

Holders compute_holders(std::span<const Researcher* const> members, const SkillSet& demand, const Matcher& matcher) {
    Holders holders;
    for (const auto& skill : demand) {
        auto& ids = holders[skill.text()];
        for (const Researcher* r : members) {
            if (matcher(skill, *r)) ids.insert(r->id);
        }
    }
    return holders;
}

double redundancy(const Holders& holders, const SkillSet& demand) {
    require_demand(demand);
    const auto shared = std::count_if(demand.begin(), demand.end(),
                                      [&](const Skill& s) { return holder_count(holders, s) >= 2; });
    return static_cast<double>(shared) / static_cast<double>(demand.size());
}

double set_size_norm(std::size_t members, int max_team_size) {
    if (max_team_size < 2) throw ArgumentError("max_team_size must be >= 2");
    return std::min(1.0, static_cast<double>(members) / static_cast<double>(max_team_size));
}

double coverage(const Holders& holders, const SkillSet& demand) {
    require_demand(demand);
    const auto covered = std::count_if(demand.begin(), demand.end(),
                                       [&](const Skill& s) { return holder_count(holders, s) >= 1; });
    return static_cast<double>(covered) / static_cast<double>(demand.size());
}

int k_robustness(const Holders& holders, const SkillSet& demand, std::size_t team_size) {
    require_demand(demand);
    const int cap = team_size == 0 ? 0 : static_cast<int>(team_size) - 1;
    int k = cap;
    for (const auto& s : demand) {
        const auto n = holder_count(holders, s);
        if (n >= 1) k = std::min(k, static_cast<int>(n) - 1);
    }
    return k;
}

double robustness_norm(int k, std::size_t team_size) {
    const double denom = team_size > 1 ? static_cast<double>(team_size - 1) : 1.0;
    return std::clamp(static_cast<double>(k) / denom, 0.0, 1.0);
}

double goodness(double coverage, double robustness_norm, double redundancy, double set_size_norm,
                const MetricWeights& weights) {
    weights.validate();
    const double sum = weights.coverage * coverage + weights.robustness * robustness_norm +
                       weights.redundancy * redundancy + weights.set_size * set_size_norm;
    return std::clamp(sum / (weights.coverage + weights.robustness), 0.0, 1.0);
}

MetricBreakdown score(const Holders& holders, const SkillSet& demand, std::size_t team_size,
                      const ScoringConfig& config) {
    MetricBreakdown b;
    b.redundancy = redundancy(holders, demand);
    b.coverage = coverage(holders, demand);
    b.set_size_norm = set_size_norm(team_size, config.size_norm_max);
    b.k_robust = k_robustness(holders, demand, team_size);
    b.k_robustness_norm = b.coverage > 0.0 ? robustness_norm(b.k_robust, team_size) : 0.0;
    b.goodness = goodness(b.coverage, b.k_robustness_norm, b.redundancy, b.set_size_norm, config.weights);
    return b;
}

}  // namespace metrics

}  // namespace teaming

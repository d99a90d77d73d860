#pragma once

// Property and oracle sweeps shared by the unit tests and the acceptance
// binary. Each returns pass/fail plus a one-line summary.

#include <cstdint>
#include <string>

namespace teaming::checks {

struct Result {
    bool pass = false;
    std::string detail;
};

Result similarity_oracle(std::uint64_t seed, int pairs);
Result k_robustness_oracle(std::uint64_t seed, int teams);
Result metric_properties(std::uint64_t seed, int cases);
Result taxonomy_semantics(int seeds);
Result bandit_training();
// 100 x 50 synthetic corpora at each overlap in {0.3, 0.45, 0.6}, seeds 1..5.
Result method_trend();
Result service_contract();

}  // namespace teaming::checks

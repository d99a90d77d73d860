#pragma once

#include "teaming/bandit.hpp"
#include "teaming/corpus.hpp"
#include "teaming/methods.hpp"
#include "teaming/taxonomy.hpp"

namespace teaming {

// Everything a method needs to form a slate. Borrowed, not owned.
struct PipelineContext {
    const Corpus& corpus;
    const DeltaMapper& delta;
    const bandit::BanditModel* model = nullptr;  // required for M3 only
    TeamingConfig config;
};

// The random seed for one call under M0: a pure function of the configured
// seed and the call id, so slates do not depend on request order.
std::uint64_t m0_seed(const TeamingConfig& config, const Call& call);

// Dispatches to the method. Throws ModelNotTrained for M3 without a model.
TeamSlate form_teams(Method method, const Call& call, const PipelineContext& ctx);

// The matcher each method scores holders with.
Matcher holder_matcher(Method method, const PipelineContext& ctx);

}  // namespace teaming

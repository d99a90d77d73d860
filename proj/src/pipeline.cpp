#include "teaming/pipeline.hpp"

#include "teaming/error.hpp"
#include "teaming/random.hpp"

namespace teaming {

std::uint64_t m0_seed(const TeamingConfig& config, const Call& call) {
    return derive_seed(config.rng_seed, "m0/" + call.id);
}

TeamSlate form_teams(Method method, const Call& call, const PipelineContext& ctx) {
    switch (method) {
        case Method::M0: return m0_random_teams(call, ctx.corpus, m0_seed(ctx.config, call), ctx.config);
        case Method::M1: return m1_string_teams(call, ctx.corpus, ctx.config);
        case Method::M2: return m2_taxonomy_teams(call, ctx.corpus, ctx.delta, ctx.config);
        case Method::M3:
            if (ctx.model == nullptr) throw ModelNotTrained("method M3 needs a trained bandit model");
            return bandit::m3_bandit_teams(call, ctx.corpus, ctx.delta, *ctx.model, ctx.config);
    }
    throw ArgumentError("unknown method");
}

Matcher holder_matcher(Method method, const PipelineContext& ctx) {
    switch (method) {
        case Method::M0:
        case Method::M1: return string_matcher(ctx.config.t_m1);
        case Method::M2:
        case Method::M3: return taxonomy_matcher(ctx.delta, ctx.config.t_m2);
    }
    throw ArgumentError("unknown method");
}

}  // namespace teaming

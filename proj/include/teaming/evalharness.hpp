#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teaming/bandit.hpp"
#include "teaming/corpus.hpp"
#include "teaming/methods.hpp"
#include "teaming/taxonomy.hpp"

namespace teaming::eval {

inline constexpr int kVolumeCap = 10;

struct EvalRow {
    Method method = Method::M0;
    double avg_quality_mean = 0.0;
    double avg_quality_std = 0.0;  // population std across researchers
    double avg_volume = 0.0;       // in [0, kVolumeCap]
    std::size_t researchers_with_teams = 0;
};

// Per-researcher samples behind one EvalRow, kept for inspection and tests.
struct ResearcherSample {
    std::string researcher_id;
    std::size_t teams = 0;        // teams containing the researcher, per-call cap applied
    double mean_goodness = 0.0;   // meaningful only when teams > 0
    double volume = 0.0;
};

struct MethodResult {
    EvalRow row;
    std::vector<ResearcherSample> samples;
};

struct EvalOptions {
    TeamingConfig teaming;
    bandit::TrainingConfig training;  // used when no model is supplied
};

// Forms every (call, method) slate and aggregates per researcher.
// A researcher's quality sample is the mean goodness of the teams
// containing them; the row mean/std runs over researchers with >= 1 team.
// A researcher's volume is the number of teams containing them, at most
// kVolumeCap per call, capped at kVolumeCap overall; the row averages it
// over all researchers. Without a model, one is trained on the corpus.
std::vector<MethodResult> evaluate_detailed(const Corpus& corpus, const DeltaMapper& delta,
                                            const bandit::BanditModel* model, const EvalOptions& options);

std::vector<EvalRow> evaluate(const Corpus& corpus, const DeltaMapper& delta, const bandit::BanditModel* model,
                              const EvalOptions& options);

struct SyntheticCorpusSpec {
    int n_calls = 100;
    int n_researchers = 50;
    int skills_per_call = 5;
    int interests_per_researcher = 5;
    int vocabulary_size = 120;        // distinct concept names calls demand from
    double overlap_ratio = 0.5;       // share of interests drawn from the demand side
    double taxonomy_bridge_ratio = 0.5;  // share of those replaced by a taxonomy neighbour
    int generic_skills_per_call = 2;       // extraction noise: words with no taxonomy mapping
    int generic_interests_per_researcher = 3;  // each kept with probability overlap_ratio
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError
};

// Vocabulary comes from taxonomy concept names. Calls draw their skills
// from one or two areas (depth-1 concepts). Researcher interests are
// demand-side with probability overlap_ratio, otherwise drawn from an
// off-domain pool that neither string-matches nor delta-overlaps any
// demand term. A demand-side interest is, with probability
// taxonomy_bridge_ratio, a sibling or parent concept instead of the term
// itself, so only the taxonomy matcher links it. Both sides also carry
// generic research words that map to no concept, the residue keyword
// extraction leaves in open data; only the string matcher sees them.
// Deterministic in spec.
Corpus synthesize_corpus(const SyntheticCorpusSpec& spec, const DeltaMapper& delta, const TeamingConfig& thresholds);

enum class ReportFormat { Csv, Markdown };

// Throws ArgumentError on empty rows.
std::string report(std::span<const EvalRow> rows, ReportFormat format);

// 4 decimals; integral values print without a fraction.
std::string format_volume(double volume);

}  // namespace teaming::eval

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teaming/corpus.hpp"
#include "teaming/methods.hpp"
#include "teaming/taxonomy.hpp"

namespace teaming::bandit {

// Ground facts over the corpus. candidate/2 is the target; requires/2 and
// interest/2 are the evidence it is conditioned on.
struct Predicate {
    enum class Name { Requires, Interest, Candidate };
    Name name = Name::Candidate;
    std::string first;   // call id for requires, researcher id otherwise
    std::string second;  // skill text, or call id for candidate
};

std::string_view to_string(Predicate::Name name);
std::vector<Predicate> ground_facts(const Corpus& corpus);

inline constexpr std::size_t kFeatureCount = 5;
inline constexpr int kFeatureSchemaVersion = 1;
std::string_view feature_name(std::size_t index);

// Relational aggregates over one (researcher, call) pair.
struct RelationalFeatures {
    int shared_string_matches = 0;  // demanded skills string-matched by the interests
    int shared_taxonomy_codes = 0;  // codes common to both expanded delta profiles
    int demand_size = 0;
    int interest_size = 0;
    // Demanded skills matched by string or by delta overlap, over
    // demand_size. Never below shared_string_matches / demand_size.
    double match_ratio = 0.0;

    std::array<double, kFeatureCount> values() const;
};

struct Thresholds {
    double t_m1 = 0.8;
    double t_m2 = 0.7;
};

RelationalFeatures ground_features(const Researcher& researcher, const Call& call, const DeltaMapper& delta,
                                   const Thresholds& thresholds);

class RegressionTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;  // go left when value <= threshold
        int left = -1;
        int right = -1;
        double value = 0.0;
    };

    RegressionTree() = default;
    explicit RegressionTree(std::vector<Node> nodes);

    double evaluate(std::span<const double, kFeatureCount> x) const;
    double evaluate(const RelationalFeatures& f) const { return evaluate(f.values()); }
    int depth() const;
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

private:
    std::vector<Node> nodes_;
};

inline constexpr double kPotentialClamp = 20.0;

// 1 / (1 + e^-psi) with psi clamped to +-kPotentialClamp.
double sigmoid(double psi);

struct BanditModel {
    double psi0 = 0.0;
    int iterations = 0;
    std::vector<RegressionTree> trees;

    double potential(std::span<const double, kFeatureCount> x) const;
    double potential(const RelationalFeatures& f) const { return potential(f.values()); }
    double probability(const RelationalFeatures& f) const { return sigmoid(potential(f)); }
    double probability_not(const RelationalFeatures& f) const { return sigmoid(-potential(f)); }
};

std::string model_to_json(const BanditModel& model);
BanditModel model_from_json(std::string_view text);  // throws ParseError / ValidationError
void save_model(const BanditModel& model, const std::filesystem::path& path);
BanditModel load_model(const std::filesystem::path& path);

struct TrainingExample {
    std::string researcher_id;
    std::string call_id;
    RelationalFeatures features;
    bool label = false;
    double weight = 0.0;    // |label - P|
    double residual = 0.0;  // label - P
};

// Weak supervision: positive iff taxonomy match_ratio >= positive_ratio,
// negative iff match_ratio == 0; everything between is left out.
struct PositivePolicy {
    double positive_ratio = 0.5;
    double negative_ratio_per_positive = 3.0;  // negative subsample cap
    std::uint64_t seed = 7;                    // drives the negative subsample
};

// Accepted (researcher, call) pairs from feedback, added as positives.
struct LabeledPair {
    std::string researcher_id;
    std::string call_id;
};

// Labels and grounds the training pairs (weights left at zero).
std::vector<TrainingExample> label_examples(const Corpus& corpus, const DeltaMapper& delta,
                                            const Thresholds& thresholds, const PositivePolicy& policy,
                                            std::span<const LabeledPair> extra_positives = {});

// Fills residual and weight of every example under model_so_far.
void update_gradients(std::vector<TrainingExample>& examples, const BanditModel& model_so_far);

// label_examples + update_gradients. Throws TrainingDataError when no
// positive can be produced.
std::vector<TrainingExample> generate_examples(const Corpus& corpus, const DeltaMapper& delta,
                                               const Thresholds& thresholds, const BanditModel& model_so_far,
                                               const PositivePolicy& policy,
                                               std::span<const LabeledPair> extra_positives = {});

// Greedy variance-reduction tree on residuals; leaves hold mean residuals.
// Among splits of equal gain the one with the widest gap between the values
// it separates, relative to that feature's range at the node, wins; the
// learned threshold then sits far from both classes.
// A node splits only when both children keep min_leaf examples, so fewer
// than 2 * min_leaf examples yield a single leaf. Throws ArgumentError on
// an empty set, min_leaf < 1 or max_depth < 0.
RegressionTree fit_tree(std::span<const TrainingExample> examples, int max_depth, int min_leaf);

// Mean negative log-likelihood of the labels.
double mean_nll(std::span<const TrainingExample> examples, const BanditModel& model);

struct TrainingConfig {
    int iterations = 10;
    int max_depth = 3;
    int min_leaf = 5;
    PositivePolicy policy;
    Thresholds thresholds;
};

struct TrainingLogRow {
    int iteration = 0;
    double nll = 0.0;
    std::size_t n_examples = 0;
};

struct TrainingResult {
    BanditModel model;
    double initial_nll = 0.0;  // at psi0
    std::vector<TrainingLogRow> log;
};

// Boosting on a fixed example set: every round recomputes gradients, fits a
// tree and appends it to the potential.
TrainingResult train_on_examples(std::vector<TrainingExample> examples, const TrainingConfig& config);

TrainingResult train(const Corpus& corpus, const DeltaMapper& delta, const TrainingConfig& config,
                     std::span<const LabeledPair> extra_positives = {});

std::string training_log_csv(const TrainingResult& result);

std::vector<RankedCandidate> m3_candidates(const Call& call, const Corpus& corpus, const DeltaMapper& delta,
                                           const BanditModel& model, const TeamingConfig& config);

TeamSlate m3_bandit_teams(const Call& call, const Corpus& corpus, const DeltaMapper& delta,
                          const BanditModel& model, const TeamingConfig& config);

}  // namespace teaming::bandit

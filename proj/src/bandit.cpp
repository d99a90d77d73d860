#include "teaming/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "teaming/error.hpp"
#include "teaming/random.hpp"
#include "teaming/skills.hpp"
#include "json_text.hpp"

namespace teaming::bandit {

using json = nlohmann::ordered_json;

std::string_view to_string(Predicate::Name name) {
    switch (name) {
        case Predicate::Name::Requires: return "requires";
        case Predicate::Name::Interest: return "interest";
        case Predicate::Name::Candidate: return "candidate";
    }
    return "?";
}

std::vector<Predicate> ground_facts(const Corpus& corpus) {
    std::vector<Predicate> facts;
    for (const auto& c : corpus.calls()) {
        for (const auto& s : c.demanded_skills) facts.push_back({Predicate::Name::Requires, c.id, s.text()});
    }
    for (const auto& r : corpus.researchers()) {
        for (const auto& s : r.interests) facts.push_back({Predicate::Name::Interest, r.id, s.text()});
    }
    return facts;
}

std::string_view feature_name(std::size_t index) {
    static constexpr std::string_view names[kFeatureCount] = {
        "shared_string_matches", "shared_taxonomy_codes", "demand_size", "interest_size", "match_ratio"};
    if (index >= kFeatureCount) throw ArgumentError("feature index out of range");
    return names[index];
}

std::array<double, kFeatureCount> RelationalFeatures::values() const {
    return {static_cast<double>(shared_string_matches), static_cast<double>(shared_taxonomy_codes),
            static_cast<double>(demand_size), static_cast<double>(interest_size), match_ratio};
}

RelationalFeatures ground_features(const Researcher& researcher, const Call& call, const DeltaMapper& delta,
                                   const Thresholds& thresholds) {
    RelationalFeatures f;
    f.demand_size = static_cast<int>(call.demanded_skills.size());
    f.interest_size = static_cast<int>(researcher.interests.size());

    const auto rp = delta.profile(researcher.interests, thresholds.t_m2);
    const auto cp = delta.profile(call.demanded_skills, thresholds.t_m2);
    std::vector<std::string> common;
    std::set_intersection(rp.expanded.begin(), rp.expanded.end(), cp.expanded.begin(), cp.expanded.end(),
                          std::back_inserter(common));
    f.shared_taxonomy_codes = static_cast<int>(common.size());

    int matched = 0;
    for (const auto& skill : call.demanded_skills) {
        const bool by_string = skills::skill_match(skill, researcher.interests, thresholds.t_m1).has_value();
        if (by_string) ++f.shared_string_matches;
        if (by_string || profiles_overlap(delta.profile(skill, thresholds.t_m2), rp)) ++matched;
    }
    f.match_ratio = f.demand_size == 0 ? 0.0 : static_cast<double>(matched) / f.demand_size;
    return f;
}

RegressionTree::RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw ValidationError("regression tree has no nodes");
    const int n = static_cast<int>(nodes_.size());
    for (int i = 0; i < n; ++i) {
        const Node& node = nodes_[i];
        if (node.feature == -1) continue;
        if (node.feature < 0 || node.feature >= static_cast<int>(kFeatureCount)) {
            throw ValidationError("tree node " + std::to_string(i) + " tests an unknown feature");
        }
        // children strictly after their parent: rules out cycles
        if (node.left <= i || node.left >= n || node.right <= i || node.right >= n || node.left == node.right) {
            throw ValidationError("tree node " + std::to_string(i) + " has invalid children");
        }
        if (!std::isfinite(node.threshold)) throw ValidationError("tree threshold is not finite");
    }
    for (const auto& node : nodes_) {
        if (!std::isfinite(node.value)) throw ValidationError("tree leaf value is not finite");
    }
}

double RegressionTree::evaluate(std::span<const double, kFeatureCount> x) const {
    if (nodes_.empty()) return 0.0;
    std::size_t i = 0;
    while (nodes_[i].feature != -1) {
        const Node& n = nodes_[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes_[i].value;
}

int RegressionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<int> d(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (nodes_[i].feature == -1) continue;
        d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
        d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
    return deepest;
}

double sigmoid(double psi) {
    psi = std::clamp(psi, -kPotentialClamp, kPotentialClamp);
    if (psi >= 0.0) return 1.0 / (1.0 + std::exp(-psi));
    const double e = std::exp(psi);
    return e / (1.0 + e);
}

double BanditModel::potential(std::span<const double, kFeatureCount> x) const {
    double psi = psi0;
    for (const auto& t : trees) psi += t.evaluate(x);
    return psi;
}

std::string model_to_json(const BanditModel& model) {
    json doc;
    doc["psi0"] = model.psi0;
    doc["iterations"] = model.iterations;
    doc["feature_schema_version"] = kFeatureSchemaVersion;
    json features = json::array();
    for (std::size_t i = 0; i < kFeatureCount; ++i) features.push_back(feature_name(i));
    doc["features"] = features;
    json trees = json::array();
    for (const auto& t : model.trees) {
        json nodes = json::array();
        for (const auto& n : t.nodes()) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"value", n.value}});
        }
        trees.push_back({{"nodes", nodes}});
    }
    doc["trees"] = trees;
    return doc.dump(2) + "\n";
}

namespace {

double number_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw ValidationError(std::string("model: missing numeric field '") + key + "'");
    }
    return it->get<double>();
}

int int_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
        throw ValidationError(std::string("model: missing integer field '") + key + "'");
    }
    return it->get<int>();
}

}  // namespace

BanditModel model_from_json(std::string_view text) {
    const auto doc = detail::parse_json_text(text, "model");
    if (!doc.is_object()) throw ValidationError("model: root must be an object");
    if (int_field(doc, "feature_schema_version") != kFeatureSchemaVersion) {
        throw ValidationError("model: unsupported feature_schema_version");
    }
    BanditModel m;
    m.psi0 = number_field(doc, "psi0");
    m.iterations = int_field(doc, "iterations");
    auto trees = doc.find("trees");
    if (trees == doc.end() || !trees->is_array()) throw ValidationError("model: 'trees' must be an array");
    for (const auto& t : *trees) {
        auto nodes = t.find("nodes");
        if (!t.is_object() || nodes == t.end() || !nodes->is_array()) {
            throw ValidationError("model: every tree needs a 'nodes' array");
        }
        std::vector<RegressionTree::Node> parsed;
        for (const auto& n : *nodes) {
            if (!n.is_object()) throw ValidationError("model: tree nodes must be objects");
            parsed.push_back({int_field(n, "feature"), number_field(n, "threshold"), int_field(n, "left"),
                              int_field(n, "right"), number_field(n, "value")});
        }
        m.trees.emplace_back(std::move(parsed));
    }
    if (m.iterations < static_cast<int>(m.trees.size())) {
        throw ValidationError("model: more trees than iterations");
    }
    return m;
}

void save_model(const BanditModel& model, const std::filesystem::path& path) {
    write_file(path, model_to_json(model));
}

BanditModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_file(path));
}

std::vector<TrainingExample> label_examples(const Corpus& corpus, const DeltaMapper& delta,
                                            const Thresholds& thresholds, const PositivePolicy& policy,
                                            std::span<const LabeledPair> extra_positives) {
    std::vector<TrainingExample> positives;
    std::vector<TrainingExample> negatives;
    std::map<std::pair<std::string, std::string>, bool> forced;
    for (const auto& p : extra_positives) {
        if (corpus.find_researcher(p.researcher_id) && corpus.find_call(p.call_id)) {
            forced[{p.researcher_id, p.call_id}] = true;
        }
    }

    for (const auto& c : corpus.calls()) {
        for (const auto& r : corpus.researchers()) {
            TrainingExample ex{r.id, c.id, ground_features(r, c, delta, thresholds), false, 0.0, 0.0};
            if (forced.count({r.id, c.id}) != 0 || ex.features.match_ratio >= policy.positive_ratio) {
                ex.label = true;
                positives.push_back(std::move(ex));
            } else if (ex.features.match_ratio == 0.0) {
                negatives.push_back(std::move(ex));
            }
        }
    }
    if (positives.empty()) throw TrainingDataError("no positive (researcher, call) pair could be labeled");

    const auto cap = static_cast<std::size_t>(
        std::ceil(policy.negative_ratio_per_positive * static_cast<double>(positives.size())));
    if (negatives.size() > cap) {
        std::vector<std::size_t> order(negatives.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(policy.seed, "negatives"));
        rng.shuffle(order);
        order.resize(cap);
        std::sort(order.begin(), order.end());  // keep corpus order among survivors
        std::vector<TrainingExample> kept;
        kept.reserve(cap);
        for (auto i : order) kept.push_back(std::move(negatives[i]));
        negatives = std::move(kept);
    }

    std::vector<TrainingExample> out = std::move(positives);
    out.insert(out.end(), std::make_move_iterator(negatives.begin()), std::make_move_iterator(negatives.end()));
    return out;
}

void update_gradients(std::vector<TrainingExample>& examples, const BanditModel& model_so_far) {
    for (auto& ex : examples) {
        const double p = model_so_far.probability(ex.features);
        ex.residual = (ex.label ? 1.0 : 0.0) - p;
        ex.weight = std::abs(ex.residual);
    }
}

std::vector<TrainingExample> generate_examples(const Corpus& corpus, const DeltaMapper& delta,
                                               const Thresholds& thresholds, const BanditModel& model_so_far,
                                               const PositivePolicy& policy,
                                               std::span<const LabeledPair> extra_positives) {
    auto examples = label_examples(corpus, delta, thresholds, policy, extra_positives);
    update_gradients(examples, model_so_far);
    return examples;
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    double margin = 0.0;  // gap between the separated values over the feature's range at the node
};

class TreeBuilder {
public:
    TreeBuilder(std::span<const TrainingExample> examples, int max_depth, int min_leaf)
        : examples_(examples), max_depth_(max_depth), min_leaf_(static_cast<std::size_t>(min_leaf)) {}

    std::vector<RegressionTree::Node> build() {
        std::vector<std::size_t> all(examples_.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        grow(all, 0);
        return std::move(nodes_);
    }

private:
    double feature(std::size_t i, int f) const {
        return examples_[i].features.values()[static_cast<std::size_t>(f)];
    }

    Split best_split(const std::vector<std::size_t>& idx) const {
        const std::size_t n = idx.size();
        double total = 0.0;
        for (auto i : idx) total += examples_[i].residual;
        const double base = total * total / static_cast<double>(n);

        Split best;
        for (int f = 0; f < static_cast<int>(kFeatureCount); ++f) {
            std::vector<std::size_t> order = idx;
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return feature(a, f) < feature(b, f); });
            const double range = feature(order.back(), f) - feature(order.front(), f);
            double left_sum = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                left_sum += examples_[order[k]].residual;
                const double here = feature(order[k], f);
                const double next = feature(order[k + 1], f);
                if (here == next) continue;
                const std::size_t nl = k + 1;
                const std::size_t nr = n - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                const double right_sum = total - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(nl) +
                                    right_sum * right_sum / static_cast<double>(nr) - base;
                const double margin = (next - here) / range;
                // equal gains: the wider margin wins, then the earlier feature and lower threshold
                const bool better = gain > best.gain + kMinGain ||
                                    (best.feature >= 0 && gain >= best.gain - kMinGain && margin > best.margin + kMinGain);
                if (better) best = {f, here + (next - here) / 2.0, gain, margin};
            }
        }
        return best;
    }

    int grow(const std::vector<std::size_t>& idx, int depth) {
        const int at = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        double sum = 0.0;
        for (auto i : idx) sum += examples_[i].residual;
        nodes_[static_cast<std::size_t>(at)].value = sum / static_cast<double>(idx.size());

        if (depth >= max_depth_ || idx.size() < 2 * min_leaf_) return at;
        const Split split = best_split(idx);
        if (split.feature < 0) return at;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto i : idx) (feature(i, split.feature) <= split.threshold ? left : right).push_back(i);
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        auto& node = nodes_[static_cast<std::size_t>(at)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        node.value = 0.0;
        return at;
    }

    static constexpr double kMinGain = 1e-12;

    std::span<const TrainingExample> examples_;
    int max_depth_;
    std::size_t min_leaf_;
    std::vector<RegressionTree::Node> nodes_;
};

}  // namespace

RegressionTree fit_tree(std::span<const TrainingExample> examples, int max_depth, int min_leaf) {
    if (examples.empty()) throw ArgumentError("fit_tree needs at least one example");
    if (min_leaf < 1) throw ArgumentError("min_leaf must be >= 1");
    if (max_depth < 0) throw ArgumentError("max_depth must be >= 0");
    return RegressionTree(TreeBuilder(examples, max_depth, min_leaf).build());
}

double mean_nll(std::span<const TrainingExample> examples, const BanditModel& model) {
    if (examples.empty()) return 0.0;
    double total = 0.0;
    for (const auto& ex : examples) {
        const double psi = std::clamp(model.potential(ex.features), -kPotentialClamp, kPotentialClamp);
        // -log sigmoid(z) = log1p(exp(-z)), computed without overflow
        const double z = ex.label ? psi : -psi;
        total += z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    }
    return total / static_cast<double>(examples.size());
}

TrainingResult train_on_examples(std::vector<TrainingExample> examples, const TrainingConfig& config) {
    if (config.iterations < 0) throw ArgumentError("iterations must be >= 0");
    if (examples.empty()) throw TrainingDataError("no training examples");
    TrainingResult result;
    result.model.iterations = config.iterations;
    result.initial_nll = mean_nll(examples, result.model);
    for (int i = 1; i <= config.iterations; ++i) {
        update_gradients(examples, result.model);
        result.model.trees.push_back(fit_tree(examples, config.max_depth, config.min_leaf));
        result.log.push_back({i, mean_nll(examples, result.model), examples.size()});
    }
    return result;
}

TrainingResult train(const Corpus& corpus, const DeltaMapper& delta, const TrainingConfig& config,
                     std::span<const LabeledPair> extra_positives) {
    if (config.iterations < 1) throw ArgumentError("iterations must be >= 1");
    return train_on_examples(label_examples(corpus, delta, config.thresholds, config.policy, extra_positives),
                             config);
}

std::string training_log_csv(const TrainingResult& result) {
    std::ostringstream out;
    out << "iteration,nll,n_examples\n";
    out.precision(10);
    for (const auto& row : result.log) out << row.iteration << ',' << row.nll << ',' << row.n_examples << '\n';
    return out.str();
}

std::vector<RankedCandidate> m3_candidates(const Call& call, const Corpus& corpus, const DeltaMapper& delta,
                                           const BanditModel& model, const TeamingConfig& config) {
    const Thresholds thresholds{config.t_m1, config.t_m2};
    std::vector<std::pair<const Skill*, CodeProfile>> per_skill;
    for (const auto& s : call.demanded_skills) per_skill.emplace_back(&s, delta.profile(s, config.t_m2));

    std::vector<RankedCandidate> out;
    for (const auto& r : corpus.researchers()) {
        const auto features = ground_features(r, call, delta, thresholds);
        const double p = model.probability(features);
        if (p < config.p_min) continue;
        RankedCandidate c{r.id, p, features.match_ratio, {}};
        const auto rp = delta.profile(r.interests, config.t_m2);
        for (const auto& [skill, sp] : per_skill) {
            if (profiles_overlap(sp, rp)) c.matched_skills.insert(skill->text());
        }
        out.push_back(std::move(c));
    }
    rank_candidates(out);
    return out;
}

TeamSlate m3_bandit_teams(const Call& call, const Corpus& corpus, const DeltaMapper& delta,
                          const BanditModel& model, const TeamingConfig& config) {
    const auto ranked = m3_candidates(call, corpus, delta, model, config);
    return build_teams(call, ranked, corpus, taxonomy_matcher(delta, config.t_m2), Method::M3, config);
}

}  // namespace teaming::bandit

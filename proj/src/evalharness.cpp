#include "teaming/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "teaming/error.hpp"
#include "teaming/pipeline.hpp"
#include "teaming/random.hpp"
#include "teaming/skills.hpp"
#include "teaming/text.hpp"

namespace teaming::eval {

std::vector<MethodResult> evaluate_detailed(const Corpus& corpus, const DeltaMapper& delta,
                                            const bandit::BanditModel* model, const EvalOptions& options) {
    options.teaming.validate();
    bandit::BanditModel trained;
    if (model == nullptr) {
        trained = bandit::train(corpus, delta, options.training).model;
        model = &trained;
    }
    const PipelineContext ctx{corpus, delta, model, options.teaming};

    std::map<std::string, std::size_t, std::less<>> slot;
    for (const auto& r : corpus.researchers()) slot.emplace(r.id, slot.size());

    std::vector<MethodResult> out;
    for (Method method : kAllMethods) {
        std::vector<std::size_t> teams(slot.size(), 0);
        std::vector<double> volume(slot.size(), 0.0);
        std::vector<double> goodness_sum(slot.size(), 0.0);
        for (const auto& call : corpus.calls()) {
            const TeamSlate slate = form_teams(method, call, ctx);
            std::vector<std::size_t> per_call(slot.size(), 0);
            for (const auto& st : slate.teams) {
                for (const auto& id : st.team.members) {
                    const std::size_t i = slot.find(id)->second;
                    if (per_call[i] == static_cast<std::size_t>(kVolumeCap)) continue;
                    ++per_call[i];
                    ++teams[i];
                    goodness_sum[i] += st.breakdown.goodness;
                }
            }
            for (std::size_t i = 0; i < slot.size(); ++i) volume[i] += static_cast<double>(per_call[i]);
        }

        MethodResult result;
        result.row.method = method;
        double q_sum = 0.0;
        double v_sum = 0.0;
        std::vector<double> qualities;
        for (const auto& r : corpus.researchers()) {
            const std::size_t i = slot.find(r.id)->second;
            ResearcherSample s{r.id, teams[i], 0.0, std::min(volume[i], static_cast<double>(kVolumeCap))};
            if (s.teams > 0) {
                s.mean_goodness = goodness_sum[i] / static_cast<double>(s.teams);
                qualities.push_back(s.mean_goodness);
                q_sum += s.mean_goodness;
            }
            v_sum += s.volume;
            result.samples.push_back(std::move(s));
        }
        if (!qualities.empty()) {
            const double mean = q_sum / static_cast<double>(qualities.size());
            double var = 0.0;
            for (double q : qualities) var += (q - mean) * (q - mean);
            result.row.avg_quality_mean = mean;
            result.row.avg_quality_std = std::sqrt(var / static_cast<double>(qualities.size()));
        }
        result.row.researchers_with_teams = qualities.size();
        result.row.avg_volume = slot.empty() ? 0.0 : v_sum / static_cast<double>(slot.size());
        out.push_back(std::move(result));
    }
    return out;
}

std::vector<EvalRow> evaluate(const Corpus& corpus, const DeltaMapper& delta, const bandit::BanditModel* model,
                              const EvalOptions& options) {
    std::vector<EvalRow> rows;
    for (auto& r : evaluate_detailed(corpus, delta, model, options)) rows.push_back(r.row);
    return rows;
}

void SyntheticCorpusSpec::validate() const {
    if (n_calls < 1 || n_researchers < 1 || skills_per_call < 1 || interests_per_researcher < 1 ||
        vocabulary_size < 1) {
        throw ConfigError("synthetic corpus counts must be >= 1");
    }
    if (!(overlap_ratio >= 0.0 && overlap_ratio <= 1.0)) throw ConfigError("overlap_ratio must be in [0, 1]");
    if (!(taxonomy_bridge_ratio >= 0.0 && taxonomy_bridge_ratio <= 1.0)) {
        throw ConfigError("taxonomy_bridge_ratio must be in [0, 1]");
    }
    if (generic_skills_per_call < 0 || generic_interests_per_researcher < 0) {
        throw ConfigError("generic term counts must be >= 0");
    }
}

namespace {

std::string padded(int value, int width) {
    std::string s = std::to_string(value);
    if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    return s;
}

// Picks one element uniformly.
template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(rng.uniform(0, v.size() - 1))];
}

struct Vocabulary {
    std::vector<std::size_t> areas;                              // demand areas, ordered
    std::map<std::size_t, std::vector<std::size_t>> by_area;    // demand terms per area
    std::vector<std::size_t> terms;                              // all demand terms
    std::map<std::size_t, std::vector<std::size_t>> neighbours;  // bridge candidates per term
    std::vector<std::size_t> off_domain;
    std::vector<std::string> generic;
};

constexpr const char* kGenericWords[] = {
    "research",   "analysis",    "applications", "development", "innovation", "evaluation",
    "methods",    "collaboration", "outreach",   "experiments", "tools",      "impact",
    "challenges", "partnerships", "prototypes",  "workforce",   "testbeds",   "benchmarks",
};

Vocabulary build_vocabulary(const SyntheticCorpusSpec& spec, const DeltaMapper& delta, const TeamingConfig& th) {
    const Taxonomy& tax = delta.taxonomy();
    const auto& concepts = tax.concepts();

    // area of a concept: its lowest-index depth-1 ancestor
    std::map<std::size_t, std::vector<std::size_t>> members;
    std::vector<std::size_t> area_of(concepts.size(), concepts.size());
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        if (concepts[i].depth < 2) continue;
        for (std::size_t a : tax.lineage(i)) {
            if (concepts[a].depth == 1) {
                area_of[i] = a;
                break;
            }
        }
        if (area_of[i] < concepts.size()) members[area_of[i]].push_back(i);
    }

    std::vector<std::size_t> areas;
    for (const auto& [a, _] : members) areas.push_back(a);
    Rng rng(derive_seed(spec.seed, "areas"));
    rng.shuffle(areas);

    Vocabulary v;
    std::set<std::size_t> demand_side;  // every concept in a demand area
    std::size_t budget = static_cast<std::size_t>(spec.vocabulary_size);
    for (std::size_t a : areas) {
        if (budget == 0) break;
        auto terms = members[a];
        rng.shuffle(terms);
        if (terms.size() > budget) terms.resize(budget);
        budget -= terms.size();
        std::sort(terms.begin(), terms.end());
        v.areas.push_back(a);
        v.by_area[a] = terms;
        v.terms.insert(v.terms.end(), terms.begin(), terms.end());
        demand_side.insert(a);
        demand_side.insert(members[a].begin(), members[a].end());
    }
    std::sort(v.areas.begin(), v.areas.end());
    std::sort(v.terms.begin(), v.terms.end());

    for (std::size_t t : v.terms) {
        const auto original = text::decode_utf8(concepts[t].name);
        std::vector<std::size_t> near;
        for (std::size_t j = 0; j < concepts.size(); ++j) {
            if (j == t || concepts[j].depth < 1) continue;
            const auto& pj = concepts[j].parents;
            const bool is_parent = std::find(concepts[t].parents.begin(), concepts[t].parents.end(),
                                             concepts[j].code) != concepts[t].parents.end();
            const bool is_sibling = std::any_of(pj.begin(), pj.end(), [&](const std::string& p) {
                return std::find(concepts[t].parents.begin(), concepts[t].parents.end(), p) !=
                       concepts[t].parents.end();
            });
            if (!is_parent && !is_sibling) continue;
            if (skills::similarity(original, text::decode_utf8(concepts[j].name)).value >= th.t_m1) continue;
            near.push_back(j);
        }
        v.neighbours[t] = std::move(near);
    }

    // off-domain terms must be invisible to both matchers
    CodeProfile demand_profile;
    std::vector<Skill> demand_skills;
    for (std::size_t c : demand_side) {
        const Skill s = normalize_skill(concepts[c].name);
        const auto p = delta.profile(s, th.t_m2);
        demand_profile.raw.insert(p.raw.begin(), p.raw.end());
        demand_profile.expanded.insert(p.expanded.begin(), p.expanded.end());
        demand_skills.push_back(s);
    }
    for (const auto& [a, terms] : members) {
        if (demand_side.count(a) != 0) continue;
        for (std::size_t c : terms) {
            const Skill s = normalize_skill(concepts[c].name);
            if (profiles_overlap(delta.profile(s, th.t_m2), demand_profile)) continue;
            const SkillSet single{s};
            const bool string_hit = std::any_of(demand_skills.begin(), demand_skills.end(), [&](const Skill& d) {
                return skills::skill_match(d, single, th.t_m1).has_value();
            });
            if (!string_hit) v.off_domain.push_back(c);
        }
    }

    for (const char* word : kGenericWords) {
        const Skill s = normalize_skill(word);
        if (!delta.profile(s, th.t_m2).raw.empty()) continue;
        const SkillSet single{s};
        const bool collides = std::any_of(demand_skills.begin(), demand_skills.end(), [&](const Skill& d) {
            return skills::skill_match(d, single, th.t_m1).has_value();
        });
        if (!collides) v.generic.push_back(s.text());
    }
    return v;
}

// Draws up to `count` distinct concepts from `pool`.
std::vector<std::size_t> draw_distinct(Rng& rng, std::vector<std::size_t> pool, std::size_t count) {
    rng.shuffle(pool);
    if (pool.size() > count) pool.resize(count);
    return pool;
}

}  // namespace

Corpus synthesize_corpus(const SyntheticCorpusSpec& spec, const DeltaMapper& delta, const TeamingConfig& th) {
    spec.validate();
    const auto& concepts = delta.taxonomy().concepts();
    const Vocabulary v = build_vocabulary(spec, delta, th);
    if (v.terms.empty()) throw ConfigError("taxonomy offers no demand vocabulary");
    if (v.off_domain.empty() && spec.overlap_ratio < 1.0) throw ConfigError("taxonomy offers no off-domain terms");

    const auto skill_of = [&](std::size_t c) { return normalize_skill(concepts[c].name); };

    std::vector<Call> calls;
    Rng call_rng(derive_seed(spec.seed, "calls"));
    for (int i = 0; i < spec.n_calls; ++i) {
        std::vector<std::size_t> areas{pick(call_rng, v.areas)};
        if (v.areas.size() > 1 && call_rng.unit() < 0.5) {
            std::size_t second = pick(call_rng, v.areas);
            while (second == areas[0]) second = pick(call_rng, v.areas);
            areas.push_back(second);
        }
        std::vector<std::size_t> pool;
        for (std::size_t a : areas) pool.insert(pool.end(), v.by_area.at(a).begin(), v.by_area.at(a).end());
        auto chosen = draw_distinct(call_rng, pool, static_cast<std::size_t>(spec.skills_per_call));
        // small areas are topped up from the whole vocabulary
        if (chosen.size() < static_cast<std::size_t>(spec.skills_per_call)) {
            std::vector<std::size_t> rest;
            for (std::size_t t : v.terms) {
                if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) rest.push_back(t);
            }
            auto extra = draw_distinct(call_rng, rest, static_cast<std::size_t>(spec.skills_per_call) - chosen.size());
            chosen.insert(chosen.end(), extra.begin(), extra.end());
        }
        std::vector<std::size_t> generic_idx(v.generic.size());
        for (std::size_t k = 0; k < generic_idx.size(); ++k) generic_idx[k] = k;
        generic_idx = draw_distinct(call_rng, generic_idx, static_cast<std::size_t>(spec.generic_skills_per_call));

        Call c;
        c.id = "c" + padded(i + 1, 3);
        c.source = "synthetic";
        std::vector<std::string> names;
        for (std::size_t t : chosen) {
            c.demanded_skills.insert(skill_of(t));
            names.push_back(concepts[t].name);
        }
        c.title = "Call " + padded(i + 1, 3) + ": " + concepts[areas[0]].name;
        c.synopsis = "Seeking expertise in";
        for (std::size_t k = 0; k < names.size(); ++k) {
            c.synopsis += (k == 0 ? " " : (k + 1 == names.size() ? " and " : ", ")) + names[k];
        }
        c.synopsis += ".";
        for (std::size_t k : generic_idx) c.demanded_skills.insert(normalize_skill(v.generic[k]));
        calls.push_back(std::move(c));
    }

    std::vector<Researcher> researchers;
    Rng person_rng(derive_seed(spec.seed, "researchers"));
    for (int i = 0; i < spec.n_researchers; ++i) {
        std::vector<std::size_t> home{pick(person_rng, v.areas)};
        if (v.areas.size() > 1 && person_rng.unit() < 0.5) home.push_back(pick(person_rng, v.areas));
        std::vector<std::size_t> home_terms;
        for (std::size_t a : home) home_terms.insert(home_terms.end(), v.by_area.at(a).begin(), v.by_area.at(a).end());

        Researcher r;
        r.id = "r" + padded(i + 1, 3);
        r.name = "Researcher " + padded(i + 1, 3);
        const auto want = static_cast<std::size_t>(spec.interests_per_researcher);
        for (int attempt = 0; r.interests.size() < want && attempt < 20 * spec.interests_per_researcher; ++attempt) {
            std::size_t c;
            if (v.off_domain.empty() || person_rng.unit() < spec.overlap_ratio) {
                c = pick(person_rng, home_terms);
                const auto& near = v.neighbours.at(c);
                if (!near.empty() && person_rng.unit() < spec.taxonomy_bridge_ratio) c = pick(person_rng, near);
            } else {
                c = pick(person_rng, v.off_domain);
            }
            r.interests.insert(skill_of(c));
        }
        // generic words come from call text, so they are demand-side too
        for (int g = 0; g < spec.generic_interests_per_researcher && !v.generic.empty(); ++g) {
            const auto& word = pick(person_rng, v.generic);
            if (person_rng.unit() < spec.overlap_ratio) r.interests.insert(normalize_skill(word));
        }
        researchers.push_back(std::move(r));
    }
    return Corpus(std::move(calls), std::move(researchers));
}

std::string format_volume(double volume) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", volume);
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

std::string report(std::span<const EvalRow> rows, ReportFormat format) {
    if (rows.empty()) throw ArgumentError("report needs at least one row");
    std::ostringstream out;
    char buf[64];
    if (format == ReportFormat::Csv) {
        out << "method,quality_mean,quality_std,volume\n";
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.4f,%.4f", r.avg_quality_mean, r.avg_quality_std);
            out << to_string(r.method) << ',' << buf << ',' << format_volume(r.avg_volume) << '\n';
        }
    } else {
        out << "| Method | Average Quality | Average Volume |\n";
        out << "|---|---|---|\n";
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof buf, "%.4f±%.4f", r.avg_quality_mean, r.avg_quality_std);
            out << "| " << to_string(r.method) << " | " << buf << " | " << format_volume(r.avg_volume) << " |\n";
        }
    }
    return out.str();
}

}  // namespace teaming::eval

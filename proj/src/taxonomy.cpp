#include "teaming/taxonomy.hpp"

#include <algorithm>
#include <deque>
#include <mutex>

#include <json.hpp>

#include "teaming/corpus.hpp"
#include "teaming/error.hpp"
#include "teaming/hash.hpp"
#include "teaming/skills.hpp"
#include "teaming/text.hpp"
#include "json_text.hpp"

namespace teaming {

namespace {

constexpr int kMaxGram = 3;

// Returns a concept on a parent cycle, or npos when the graph is acyclic.
std::size_t find_cycle_member(const std::vector<std::vector<std::size_t>>& parents) {
    enum class Mark { White, Grey, Black };
    std::vector<Mark> mark(parents.size(), Mark::White);
    for (std::size_t start = 0; start < parents.size(); ++start) {
        if (mark[start] != Mark::White) continue;
        // iterative DFS: (node, next parent slot)
        std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
        mark[start] = Mark::Grey;
        while (!stack.empty()) {
            auto& [node, slot] = stack.back();
            if (slot < parents[node].size()) {
                const std::size_t next = parents[node][slot++];
                if (mark[next] == Mark::Grey) return next;
                if (mark[next] == Mark::White) {
                    mark[next] = Mark::Grey;
                    stack.emplace_back(next, 0);
                }
            } else {
                mark[node] = Mark::Black;
                stack.pop_back();
            }
        }
    }
    return static_cast<std::size_t>(-1);
}

}  // namespace

Taxonomy::Taxonomy(std::vector<Entry> entries) {
    concepts_.reserve(entries.size());
    for (auto& e : entries) {
        if (e.code.empty()) throw ValidationError("concept with empty code");
        auto name = try_normalize_skill(e.name);
        if (!name) throw ValidationError("concept '" + e.code + "' has an empty name");
        if (!index_.emplace(e.code, concepts_.size()).second) {
            throw ValidationError("duplicate concept code '" + e.code + "'");
        }
        concepts_.push_back(Concept{std::move(e.code), name->text(), std::move(e.parents), 0});
    }

    std::vector<std::vector<std::size_t>> parents(concepts_.size());
    std::vector<std::vector<std::size_t>> children(concepts_.size());
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
        for (const auto& p : concepts_[i].parents) {
            auto it = index_.find(p);
            if (it == index_.end()) {
                throw ValidationError("concept '" + concepts_[i].code + "' has unknown parent '" + p + "'");
            }
            parents[i].push_back(it->second);
            children[it->second].push_back(i);
        }
    }
    if (const auto member = find_cycle_member(parents); member != static_cast<std::size_t>(-1)) {
        throw ValidationError("cycle in parent links through concept '" + concepts_[member].code + "'");
    }

    // breadth-first from all roots gives the minimum depth
    std::vector<int> depth(concepts_.size(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
        if (parents[i].empty()) {
            depth[i] = 0;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        const auto node = queue.front();
        queue.pop_front();
        for (auto child : children[node]) {
            if (depth[child] < 0) {
                depth[child] = depth[node] + 1;
                queue.push_back(child);
            }
        }
    }
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
        concepts_[i].depth = depth[i];
        max_depth_ = std::max(max_depth_, depth[i]);
    }
    if (max_depth_ < 2) {
        throw ValidationError("taxonomy must have at least three levels (max depth " + std::to_string(max_depth_) +
                              ")");
    }

    lineage_.resize(concepts_.size());
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
        std::vector<char> seen(concepts_.size(), 0);
        std::vector<std::size_t> stack{i};
        seen[i] = 1;
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            lineage_[i].push_back(node);
            for (auto p : parents[node]) {
                if (!seen[p]) {
                    seen[p] = 1;
                    stack.push_back(p);
                }
            }
        }
        std::sort(lineage_[i].begin(), lineage_[i].end());
    }

    wide_names_.reserve(concepts_.size());
    std::string fingerprint;
    for (const auto& c : concepts_) {
        wide_names_.push_back(text::decode_utf8(c.name));
        fingerprint += c.code + '\t' + c.name;
        for (const auto& p : c.parents) fingerprint += '\t' + p;
        fingerprint += '\n';
    }
    version_ = to_hex(fnv1a(fingerprint));
}

const Concept* Taxonomy::find(std::string_view code) const {
    auto it = index_.find(code);
    return it == index_.end() ? nullptr : &concepts_[it->second];
}

std::size_t Taxonomy::index_of(std::string_view code) const {
    auto it = index_.find(code);
    if (it == index_.end()) throw ValidationError("unknown concept code '" + std::string(code) + "'");
    return it->second;
}

Taxonomy parse_taxonomy(std::string_view json_text) {
    const auto doc = detail::parse_json_text(json_text, "taxonomy");
    if (!doc.is_array()) throw ValidationError("taxonomy file must hold a JSON array");
    std::vector<Taxonomy::Entry> entries;
    entries.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("code") || !item["code"].is_string() || !item.contains("name") ||
            !item["name"].is_string()) {
            throw ValidationError("taxonomy entry needs string 'code' and 'name'");
        }
        Taxonomy::Entry e;
        e.code = item["code"].get<std::string>();
        e.name = item["name"].get<std::string>();
        if (auto it = item.find("parents"); it != item.end()) {
            if (!it->is_array()) throw ValidationError("concept '" + e.code + "': 'parents' must be an array");
            for (const auto& p : *it) {
                if (!p.is_string()) throw ValidationError("concept '" + e.code + "': parent codes must be strings");
                e.parents.push_back(p.get<std::string>());
            }
        }
        entries.push_back(std::move(e));
    }
    return Taxonomy(std::move(entries));
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
    return parse_taxonomy(read_file(path));
}

CodeSet map_to_codes(const Skill& skill, const Taxonomy& tax, double threshold) {
    std::vector<std::u32string> grams;
    for (int n = 1; n <= kMaxGram; ++n) {
        for (auto& g : skills::ngrams(skill.tokens(), n)) grams.push_back(text::decode_utf8(g));
    }
    // the whole phrase too, so a long concept name always maps to itself
    if (skill.tokens().size() > static_cast<std::size_t>(kMaxGram)) grams.push_back(text::decode_utf8(skill.text()));
    CodeSet out;
    const auto& concepts = tax.concepts();
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        const auto& name = tax.wide_name(i);
        for (const auto& g : grams) {
            // cheap bound: the length gap alone caps the score
            const auto longest = std::max(g.size(), name.size());
            const auto gap = g.size() > name.size() ? g.size() - name.size() : name.size() - g.size();
            if (1.0 - static_cast<double>(gap) / static_cast<double>(longest) < threshold) continue;
            if (skills::similarity(g, name).value >= threshold) {
                out.insert(concepts[i].code);
                break;
            }
        }
    }
    return out;
}

CodeSet expand_codes(const CodeSet& codes, const Taxonomy& tax, int min_depth) {
    if (min_depth < 0) throw ArgumentError("min_depth must be >= 0");
    CodeSet out;
    for (const auto& code : codes) {
        for (auto idx : tax.lineage(tax.index_of(code))) {
            const auto& c = tax.concepts()[idx];
            if (c.depth >= min_depth) out.insert(c.code);
        }
    }
    return out;
}

namespace {

bool intersects(const CodeSet& a, const CodeSet& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            return true;
        }
    }
    return false;
}

}  // namespace

bool profiles_overlap(const CodeProfile& a, const CodeProfile& b) {
    return intersects(a.raw, b.raw) || intersects(a.expanded, b.expanded);
}

bool codes_overlap(const CodeSet& a, const CodeSet& b, const Taxonomy& tax, int min_depth) {
    return profiles_overlap({a, expand_codes(a, tax, min_depth)}, {b, expand_codes(b, tax, min_depth)});
}

DeltaMapper::DeltaMapper(std::shared_ptr<const Taxonomy> tax, int min_depth)
    : tax_(std::move(tax)), min_depth_(min_depth) {
    if (!tax_) throw ArgumentError("DeltaMapper needs a taxonomy");
    if (min_depth_ < 0) throw ArgumentError("min_depth must be >= 0");
}

CodeProfile DeltaMapper::profile(const Skill& skill, double threshold) const {
    auto key = std::make_pair(skill.text(), threshold);
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    CodeProfile p;
    p.raw = map_to_codes(skill, *tax_, threshold);
    p.expanded = expand_codes(p.raw, *tax_, min_depth_);
    std::unique_lock lock(mutex_);
    return cache_.emplace(std::move(key), std::move(p)).first->second;
}

CodeProfile DeltaMapper::profile(const SkillSet& skills, double threshold) const {
    CodeProfile out;
    for (const auto& s : skills) {
        auto p = profile(s, threshold);
        out.raw.insert(p.raw.begin(), p.raw.end());
        out.expanded.insert(p.expanded.begin(), p.expanded.end());
    }
    return out;
}

std::size_t DeltaMapper::cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

}  // namespace teaming

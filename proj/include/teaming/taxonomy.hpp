#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "teaming/skill.hpp"

namespace teaming {

struct Concept {
    std::string code;
    std::string name;  // normalized phrase
    std::vector<std::string> parents;
    int depth = 0;  // minimum distance from any root
};

using CodeSet = std::set<std::string>;

// Poly-hierarchical concept tree. Immutable after construction.
class Taxonomy {
public:
    struct Entry {
        std::string code;
        std::string name;
        std::vector<std::string> parents;
    };

    // Validates and links. Throws ValidationError on duplicate codes,
    // dangling parents, cycles (naming one member), or max depth < 2.
    explicit Taxonomy(std::vector<Entry> entries);

    const std::vector<Concept>& concepts() const noexcept { return concepts_; }
    const Concept* find(std::string_view code) const;
    int max_depth() const noexcept { return max_depth_; }

    // The concept itself plus all transitive parents.
    const std::vector<std::size_t>& lineage(std::size_t index) const { return lineage_[index]; }
    std::size_t index_of(std::string_view code) const;  // throws ValidationError
    const std::u32string& wide_name(std::size_t index) const { return wide_names_[index]; }

    const std::string& version() const noexcept { return version_; }

private:
    std::vector<Concept> concepts_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::vector<std::size_t>> lineage_;
    std::vector<std::u32string> wide_names_;
    int max_depth_ = 0;
    std::string version_;
};

// JSON array of {"code", "name", "parents"}.
Taxonomy parse_taxonomy(std::string_view json_text);
Taxonomy load_taxonomy(const std::filesystem::path& path);

// Codes of every concept whose name reaches threshold similarity with some
// 1..3-gram of the skill's tokens or with the whole skill.
CodeSet map_to_codes(const Skill& skill, const Taxonomy& tax, double threshold);

// Input codes plus all their ancestors, keeping only concepts at depth >=
// min_depth. Throws ValidationError on an unknown code.
CodeSet expand_codes(const CodeSet& codes, const Taxonomy& tax, int min_depth);

// True when the raw code sets intersect or their expansions do.
bool codes_overlap(const CodeSet& a, const CodeSet& b, const Taxonomy& tax, int min_depth);

// Raw and expanded codes for one skill or a union over a skill set.
struct CodeProfile {
    CodeSet raw;
    CodeSet expanded;
};

bool profiles_overlap(const CodeProfile& a, const CodeProfile& b);

// The delta mapping with a per-(skill, threshold) cache. Safe for
// concurrent use; racing inserts of the same key store identical values.
class DeltaMapper {
public:
    DeltaMapper(std::shared_ptr<const Taxonomy> tax, int min_depth = 1);

    const Taxonomy& taxonomy() const noexcept { return *tax_; }
    int min_depth() const noexcept { return min_depth_; }

    CodeProfile profile(const Skill& skill, double threshold) const;
    CodeProfile profile(const SkillSet& skills, double threshold) const;

    std::size_t cache_size() const;

private:
    std::shared_ptr<const Taxonomy> tax_;
    int min_depth_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::pair<std::string, double>, CodeProfile> cache_;
};

}  // namespace teaming

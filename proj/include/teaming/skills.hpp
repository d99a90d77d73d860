#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teaming/skill.hpp"

namespace teaming::skills {

// Non-empty set of lowercase tokens.
class StopWordList {
public:
    explicit StopWordList(std::set<std::string> words);

    // The bundled standard English list (same content as data/stopwords.txt).
    static const StopWordList& english();
    // One token per line, UTF-8. Blank lines and '#' comments are skipped.
    static StopWordList load(const std::filesystem::path& path);

    bool contains(std::string_view token) const { return words_.count(std::string(token)) > 0; }
    const std::set<std::string>& words() const noexcept { return words_; }

private:
    std::set<std::string> words_;
};

struct ExtractOptions {
    int max_phrase_len = 3;
    // Phrases seen only in the synopsis need this many occurrences in
    // title + synopsis. Title phrases are always kept.
    int min_synopsis_frequency = 2;
};

// Contiguous phrases of 1..max_phrase_len tokens. Phrases never cross a
// delimiter (sentence or clause punctuation) and never begin or end with a
// stop word. Throws ArgumentError when max_phrase_len < 1.
SkillSet extract_skills(std::string_view title, std::string_view synopsis, const StopWordList& stopwords,
                        const ExtractOptions& options = {});

// All contiguous n-token windows in order. Empty when n > |tokens|.
std::vector<std::string> ngrams(std::span<const std::string> tokens, int n);

struct SimilarityScore {
    double value = 0.0;
};

// Character-level (code point) Levenshtein distance.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

// 1 - editdistance / max length, over code points. Throws ArgumentError
// when either side is empty.
SimilarityScore similarity(std::string_view pattern, std::string_view target);
SimilarityScore similarity(std::u32string_view pattern, std::u32string_view target);

struct SkillMatch {
    const Skill* interest = nullptr;
    double score = 0.0;
};

// Best interest by similarity if it reaches threshold; ties go to the
// lexicographically smallest interest text.
std::optional<SkillMatch> skill_match(const Skill& skill, const SkillSet& interests, double threshold);

}  // namespace teaming::skills

#include "teaming/skills.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "teaming/error.hpp"
#include "teaming/text.hpp"

namespace teaming::skills {

// Generated from data/stopwords.txt at configure time.
extern const char* const kBundledStopWords;

namespace {

std::set<std::string> parse_stopword_lines(std::istream& in) {
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        for (auto& token : tokenize(line)) words.insert(std::move(token));
    }
    return words;
}

bool is_delimiter(char c) {
    switch (c) {
        case '.': case ',': case ';': case ':': case '!': case '?':
        case '(': case ')': case '[': case ']': case '{': case '}':
        case '"': case '\n': case '\r': case '\t': case '|':
            return true;
        default:
            return false;
    }
}

std::vector<std::vector<std::string>> chunk_tokens(std::string_view raw) {
    std::vector<std::vector<std::string>> chunks;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= raw.size(); ++i) {
        if (i == raw.size() || is_delimiter(raw[i])) {
            auto tokens = tokenize(raw.substr(start, i - start));
            if (!tokens.empty()) chunks.push_back(std::move(tokens));
            start = i + 1;
        }
    }
    return chunks;
}

}  // namespace

StopWordList::StopWordList(std::set<std::string> words) : words_(std::move(words)) {
    if (words_.empty()) throw ArgumentError("stop-word list is empty");
    for (const auto& w : words_) {
        const auto tokens = tokenize(w);
        if (tokens.size() != 1 || tokens.front() != w) {
            throw ArgumentError("stop word '" + w + "' is not a single lowercase token");
        }
    }
}

const StopWordList& StopWordList::english() {
    static const StopWordList list = [] {
        std::istringstream in(kBundledStopWords);
        return StopWordList(parse_stopword_lines(in));
    }();
    return list;
}

StopWordList StopWordList::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read stop-word file " + path.string());
    return StopWordList(parse_stopword_lines(in));
}

std::vector<std::string> ngrams(std::span<const std::string> tokens, int n) {
    if (n < 1) throw ArgumentError("ngram size must be >= 1");
    std::vector<std::string> out;
    const auto width = static_cast<std::size_t>(n);
    if (width > tokens.size()) return out;
    out.reserve(tokens.size() - width + 1);
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
        std::string phrase = tokens[i];
        for (std::size_t k = 1; k < width; ++k) {
            phrase.push_back(' ');
            phrase += tokens[i + k];
        }
        out.push_back(std::move(phrase));
    }
    return out;
}

SkillSet extract_skills(std::string_view title, std::string_view synopsis, const StopWordList& stopwords,
                        const ExtractOptions& options) {
    if (options.max_phrase_len < 1) throw ArgumentError("max_phrase_len must be >= 1");

    struct PhraseStats {
        int count = 0;
        bool in_title = false;
    };
    std::map<std::string, PhraseStats> stats;

    auto collect = [&](std::string_view raw, bool is_title) {
        for (const auto& chunk : chunk_tokens(raw)) {
            for (int n = 1; n <= options.max_phrase_len; ++n) {
                const auto width = static_cast<std::size_t>(n);
                for (std::size_t i = 0; i + width <= chunk.size(); ++i) {
                    if (stopwords.contains(chunk[i]) || stopwords.contains(chunk[i + width - 1])) continue;
                    std::string phrase = chunk[i];
                    for (std::size_t k = 1; k < width; ++k) {
                        phrase.push_back(' ');
                        phrase += chunk[i + k];
                    }
                    auto& s = stats[phrase];
                    ++s.count;
                    s.in_title = s.in_title || is_title;
                }
            }
        }
    };
    collect(title, true);
    collect(synopsis, false);

    SkillSet out;
    for (const auto& [phrase, s] : stats) {
        if (s.in_title || s.count >= options.min_synopsis_frequency) out.insert(normalize_skill(phrase));
    }
    return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

SimilarityScore similarity(std::u32string_view pattern, std::u32string_view target) {
    if (pattern.empty() || target.empty()) throw ArgumentError("similarity of an empty string");
    if (pattern == target) return {1.0};
    const auto longest = std::max(pattern.size(), target.size());
    const auto dist = edit_distance(pattern, target);
    return {1.0 - static_cast<double>(dist) / static_cast<double>(longest)};
}

SimilarityScore similarity(std::string_view pattern, std::string_view target) {
    return similarity(text::decode_utf8(pattern), text::decode_utf8(target));
}

std::optional<SkillMatch> skill_match(const Skill& skill, const SkillSet& interests, double threshold) {
    const auto pattern = text::decode_utf8(skill.text());
    std::optional<SkillMatch> best;
    // interests iterate in lexicographic order, so strict > keeps the first on ties
    for (const auto& interest : interests) {
        const double score = similarity(pattern, text::decode_utf8(interest.text())).value;
        if (score >= threshold && (!best || score > best->score)) best = SkillMatch{&interest, score};
    }
    return best;
}

}  // namespace teaming::skills

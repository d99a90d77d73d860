#include "teaming/skill.hpp"

#include "teaming/error.hpp"
#include "teaming/text.hpp"

namespace teaming {

std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> tokens;
    std::u32string current;
    for (char32_t cp : text::decode_utf8(raw)) {
        if (text::is_word_char(cp)) {
            current.push_back(text::to_lower(cp));
        } else if (!current.empty()) {
            tokens.push_back(text::encode_utf8(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(text::encode_utf8(current));
    return tokens;
}

Skill normalize_skill(std::string_view raw) {
    auto tokens = tokenize(raw);
    if (tokens.empty()) {
        throw EmptySkill("skill '" + std::string(raw) + "' is empty after normalization");
    }
    std::string joined;
    for (const auto& t : tokens) {
        if (!joined.empty()) joined.push_back(' ');
        joined += t;
    }
    return Skill(std::move(joined), std::move(tokens));
}

std::optional<Skill> try_normalize_skill(std::string_view raw) {
    if (tokenize(raw).empty()) return std::nullopt;
    return normalize_skill(raw);
}

}  // namespace teaming

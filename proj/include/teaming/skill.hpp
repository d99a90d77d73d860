#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace teaming {

// A normalized skill phrase: lowercase, punctuation replaced by spaces,
// whitespace collapsed. Only normalize_skill() creates one, so every
// instance satisfies the invariants.
class Skill {
public:
    const std::string& text() const noexcept { return text_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    friend bool operator==(const Skill& a, const Skill& b) noexcept { return a.text_ == b.text_; }
    friend std::strong_ordering operator<=>(const Skill& a, const Skill& b) noexcept {
        return a.text_ <=> b.text_;
    }

private:
    friend Skill normalize_skill(std::string_view raw);

    Skill(std::string text, std::vector<std::string> tokens)
        : text_(std::move(text)), tokens_(std::move(tokens)) {}

    std::string text_;
    std::vector<std::string> tokens_;
};

using SkillSet = std::set<Skill>;

// Throws EmptySkill when nothing survives normalization.
Skill normalize_skill(std::string_view raw);

std::optional<Skill> try_normalize_skill(std::string_view raw);

// Normalized tokens of arbitrary text (possibly empty).
std::vector<std::string> tokenize(std::string_view raw);

}  // namespace teaming

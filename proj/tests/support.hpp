#pragma once

#include <atomic>
#include <filesystem>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <unistd.h>

#include "teaming/corpus.hpp"
#include "teaming/skill.hpp"
#include "teaming/taxonomy.hpp"

namespace teaming::test {

inline SkillSet skill_set(std::initializer_list<std::string_view> raw) {
    SkillSet out;
    for (auto r : raw) out.insert(normalize_skill(r));
    return out;
}

inline Call make_call(std::string id, std::initializer_list<std::string_view> demand, std::string title = {}) {
    return Call{std::move(id), title.empty() ? "Call" : std::move(title), "", skill_set(demand), "fixture"};
}

inline Researcher make_researcher(std::string id, std::initializer_list<std::string_view> interests) {
    return Researcher{id, "Researcher " + id, skill_set(interests), {}};
}

inline std::shared_ptr<const Taxonomy> bundled_taxonomy() {
    static const auto tax = std::make_shared<const Taxonomy>(load_taxonomy(TEAMING_DATA_DIR "/taxonomy.json"));
    return tax;
}

inline const DeltaMapper& bundled_delta() {
    static const DeltaMapper delta(bundled_taxonomy(), 1);
    return delta;
}

inline std::shared_ptr<const DeltaMapper> shared_delta() {
    return std::make_shared<const DeltaMapper>(bundled_taxonomy(), 1);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("teaming-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace teaming::test

namespace teaming::test {

// Three calls, seven researchers. AI-001 and NSF-001 share no string
// matches with BIO-001; r06 reaches AI-001 only through the taxonomy and
// r07 matches nothing.
inline Corpus fixture_corpus() {
    std::vector<Call> calls{
        make_call("AI-001", {"natural language processing", "speech recognition"}, "Language technologies"),
        make_call("BIO-001", {"marine biology", "ecology"}, "Ocean ecosystems"),
        make_call("NSF-001", {"machine learning", "data mining", "information retrieval"}, "Data science"),
    };
    std::vector<Researcher> people{
        make_researcher("r01", {"machine learning", "data mining"}),
        make_researcher("r02", {"natural language processing", "information retrieval"}),
        make_researcher("r03", {"information retrieval", "machine learning"}),
        make_researcher("r04", {"marine biology"}),
        make_researcher("r05", {"ecology", "oceanography"}),
        make_researcher("r06", {"knowledge representation"}),
        make_researcher("r07", {"basket weaving"}),
    };
    return Corpus(std::move(calls), std::move(people));
}

}  // namespace teaming::test

namespace teaming::test {

// Two researchers, each a perfect fit for one call and unrelated to the other.
inline Corpus weak_supervision_fixture() {
    return Corpus({make_call("c1", {"machine learning", "data mining"}), make_call("c2", {"marine biology", "ecology"})},
                  {make_researcher("r1", {"machine learning", "data mining"}),
                   make_researcher("r2", {"marine biology", "ecology"})});
}

}  // namespace teaming::test

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "teaming/skill.hpp"
#include "teaming/skills.hpp"

namespace teaming {

struct Call {
    std::string id;
    std::string title;
    std::string synopsis;
    SkillSet demanded_skills;
    std::string source;
};

struct Researcher {
    std::string id;
    std::string name;
    SkillSet interests;
    std::vector<std::string> profile_urls;
};

// One record that was skipped during load.
struct LoadDiagnostic {
    std::string file;  // "calls" or "researchers"
    std::size_t index = 0;
    std::string id;  // empty when the record had no usable id
    std::string reason;
};

// Immutable after construction; safe to share across threads.
class Corpus {
public:
    Corpus() = default;
    // Throws ValidationError on duplicate ids or empty skill sets.
    Corpus(std::vector<Call> calls, std::vector<Researcher> researchers, std::vector<LoadDiagnostic> report = {});

    const std::vector<Call>& calls() const noexcept { return calls_; }
    const std::vector<Researcher>& researchers() const noexcept { return researchers_; }
    const std::vector<LoadDiagnostic>& load_report() const noexcept { return report_; }

    const Call* find_call(std::string_view id) const;
    const Researcher* find_researcher(std::string_view id) const;

    // Content hash of the normalized snapshot (hex). Equal corpora share it.
    const std::string& version() const noexcept { return version_; }

private:
    std::vector<Call> calls_;
    std::vector<Researcher> researchers_;
    std::vector<LoadDiagnostic> report_;
    std::map<std::string, std::size_t, std::less<>> call_index_;
    std::map<std::string, std::size_t, std::less<>> researcher_index_;
    std::string version_;
};

struct LoadOptions {
    const skills::StopWordList* stopwords = nullptr;  // null selects the bundled English list
    skills::ExtractOptions extract;
};

Corpus parse_corpus(std::string_view calls_json, std::string_view researchers_json, const LoadOptions& options = {});

// Throws IoError, ParseError (with line/column) or ValidationError.
Corpus load_corpus(const std::filesystem::path& calls_path, const std::filesystem::path& researchers_path,
                   const LoadOptions& options = {});

// Loads <dir>/calls.json and <dir>/researchers.json.
Corpus load_corpus_dir(const std::filesystem::path& dir, const LoadOptions& options = {});

// Normalized snapshot serialization. Skills are written explicitly so a
// reload never re-extracts.
std::string calls_to_json(const Corpus& corpus);
std::string researchers_to_json(const Corpus& corpus);
std::string report_to_json(const Corpus& corpus);

// Writes calls.json, researchers.json and report.json under dir.
void write_snapshot(const Corpus& corpus, const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace teaming

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teaming/bandit.hpp"
#include "teaming/methods.hpp"

namespace teaming {

// Every setting the CLI and the service read. Sources merge in order:
// defaults, config file, TEAMING_<KEY> environment variables, flags.
struct AppConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string corpus_dir;  // holds calls.json and researchers.json
    std::string calls;       // explicit paths win over corpus_dir
    std::string researchers;
    std::string stopwords;   // empty selects the bundled list
    std::string taxonomy = TEAMING_DATA_DIR "/taxonomy.json";
    std::string model;       // empty: no M3 until one is trained or reloaded
    std::string feedback_log = "feedback.ndjson";
    std::string recommendation_log = "recommendations.ndjson";
    std::string static_dir;  // served under / when set
    int min_depth = 1;

    TeamingConfig teaming;
    bandit::TrainingConfig training;

    // Sets one key from text. Throws ConfigError on an unknown key or a
    // malformed value.
    void set(std::string_view key, std::string_view value);

    // All keys set() accepts, in documentation order.
    static const std::vector<std::string>& keys();

    // Throws ConfigError on out-of-range values.
    void validate() const;

    std::filesystem::path calls_path() const;
    std::filesystem::path researchers_path() const;
};

// `key = value` lines; '#' starts a comment; values may be double-quoted.
// Throws ConfigError naming the line on malformed input.
void apply_config_text(AppConfig& config, std::string_view text);
void apply_config_file(AppConfig& config, const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Applies TEAMING_<UPPERCASE KEY> for every known key. The default lookup
// reads the process environment.
void apply_env(AppConfig& config, const EnvLookup& lookup = {});

}  // namespace teaming

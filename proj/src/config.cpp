#include "teaming/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "teaming/corpus.hpp"
#include "teaming/error.hpp"

namespace teaming {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

int to_int(std::string_view key, std::string_view v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + std::string(key) + "' expects an unsigned integer, got '" +
                          std::string(v) + "'");
    }
    return out;
}

double to_double(std::string_view key, std::string_view v) {
    const std::string s(v);
    char* end = nullptr;
    const double out = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw ConfigError("config key '" + std::string(key) + "' expects a number, got '" + s + "'");
    }
    return out;
}

}  // namespace

const std::vector<std::string>& AppConfig::keys() {
    static const std::vector<std::string> all = {
        "host",           "port",          "corpus_dir",   "calls",        "researchers",  "stopwords",
        "taxonomy",       "model",         "feedback_log", "recommendation_log", "static_dir", "min_depth",
        "t_m1",           "t_m2",          "max_teams",    "max_team_size", "size_norm_max", "w_redundancy",
        "w_set_size",     "w_coverage",    "w_robustness", "seed",         "p_min",        "iterations",
        "max_depth",      "min_leaf",      "positive_ratio", "negative_ratio"};
    return all;
}

void AppConfig::set(std::string_view key, std::string_view raw) {
    const std::string value = trim(raw);
    auto& t = teaming;
    auto& w = teaming.scoring.weights;
    if (key == "host") host = value;
    else if (key == "port") port = to_int(key, value);
    else if (key == "corpus_dir") corpus_dir = value;
    else if (key == "calls") calls = value;
    else if (key == "researchers") researchers = value;
    else if (key == "stopwords") stopwords = value;
    else if (key == "taxonomy") taxonomy = value;
    else if (key == "model") model = value;
    else if (key == "feedback_log") feedback_log = value;
    else if (key == "recommendation_log") recommendation_log = value;
    else if (key == "static_dir") static_dir = value;
    else if (key == "min_depth") min_depth = to_int(key, value);
    else if (key == "t_m1") t.t_m1 = to_double(key, value);
    else if (key == "t_m2") t.t_m2 = to_double(key, value);
    else if (key == "max_teams") t.max_teams = to_int(key, value);
    else if (key == "max_team_size") t.max_team_size = to_int(key, value);
    else if (key == "size_norm_max") t.scoring.size_norm_max = to_int(key, value);
    else if (key == "w_redundancy") w.redundancy = to_double(key, value);
    else if (key == "w_set_size") w.set_size = to_double(key, value);
    else if (key == "w_coverage") w.coverage = to_double(key, value);
    else if (key == "w_robustness") w.robustness = to_double(key, value);
    else if (key == "seed") {
        t.rng_seed = to_u64(key, value);
        training.policy.seed = t.rng_seed;
    }
    else if (key == "p_min") t.p_min = to_double(key, value);
    else if (key == "iterations") training.iterations = to_int(key, value);
    else if (key == "max_depth") training.max_depth = to_int(key, value);
    else if (key == "min_leaf") training.min_leaf = to_int(key, value);
    else if (key == "positive_ratio") training.policy.positive_ratio = to_double(key, value);
    else if (key == "negative_ratio") training.policy.negative_ratio_per_positive = to_double(key, value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
    training.thresholds = {t.t_m1, t.t_m2};
}

void AppConfig::validate() const {
    teaming.validate();
    if (port < 0 || port > 65535) throw ConfigError("port must be in [0, 65535]");
    if (min_depth < 0) throw ConfigError("min_depth must be >= 0");
    if (training.iterations < 1) throw ConfigError("iterations must be >= 1");
    if (training.max_depth < 0) throw ConfigError("max_depth must be >= 0");
    if (training.min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
    if (!(training.policy.positive_ratio > 0.0 && training.policy.positive_ratio <= 1.0)) {
        throw ConfigError("positive_ratio must be in (0, 1]");
    }
    if (!(training.policy.negative_ratio_per_positive > 0.0)) throw ConfigError("negative_ratio must be > 0");
}

std::filesystem::path AppConfig::calls_path() const {
    if (!calls.empty()) return calls;
    if (corpus_dir.empty()) throw ConfigError("no corpus configured: set corpus_dir or calls");
    return std::filesystem::path(corpus_dir) / "calls.json";
}

std::filesystem::path AppConfig::researchers_path() const {
    if (!researchers.empty()) return researchers;
    if (corpus_dir.empty()) throw ConfigError("no corpus configured: set corpus_dir or researchers");
    return std::filesystem::path(corpus_dir) / "researchers.json";
}

void apply_config_text(AppConfig& config, std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"') {
            const auto close = value.find('"', 1);
            if (close == std::string::npos) {
                throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
            }
            value = value.substr(1, close - 1);
        } else if (const auto hash = value.find('#'); hash != std::string::npos) {
            value = trim(std::string_view(value).substr(0, hash));
        }
        try {
            config.set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void apply_config_file(AppConfig& config, const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    apply_config_text(config, text);
}

void apply_env(AppConfig& config, const EnvLookup& lookup) {
    const EnvLookup get = lookup ? lookup : [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (v == nullptr) return std::nullopt;
        return std::string(v);
    };
    for (const auto& key : AppConfig::keys()) {
        std::string name = "TEAMING_";
        for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (auto v = get(name)) {
            try {
                config.set(key, *v);
            } catch (const ConfigError& e) {
                throw ConfigError(name + ": " + e.what());
            }
        }
    }
}

}  // namespace teaming

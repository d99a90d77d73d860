// teaming: command-line front end for ingest, recommend, train, evaluate
// and serve.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <ctime>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "teaming/bandit.hpp"
#include "teaming/config.hpp"
#include "teaming/corpus.hpp"
#include "teaming/error.hpp"
#include "teaming/evalharness.hpp"
#include "teaming/http.hpp"
#include "teaming/service.hpp"
#include "teaming/taxonomy.hpp"

using namespace teaming;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kNotFound = 2, kTrainingData = 3, kIo = 4 };

// Flag values keyed by config key; applied after file and environment.
using Overrides = std::map<std::string, std::string>;

void key_option(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
                const std::string& help, const std::string& default_text = {}) {
    auto* opt = app->add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov[key] = v; }, help);
    if (!default_text.empty()) opt->default_str(default_text);
}

AppConfig resolve_config(const std::string& config_file, const Overrides& ov) {
    AppConfig cfg;
    if (!config_file.empty()) apply_config_file(cfg, config_file);
    apply_env(cfg);
    for (const auto& [k, v] : ov) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

LoadOptions load_options(const AppConfig& cfg, std::unique_ptr<skills::StopWordList>& holder) {
    LoadOptions opts;
    if (!cfg.stopwords.empty()) {
        holder = std::make_unique<skills::StopWordList>(skills::StopWordList::load(cfg.stopwords));
        opts.stopwords = holder.get();
    }
    return opts;
}

Corpus load_configured_corpus(const AppConfig& cfg) {
    std::unique_ptr<skills::StopWordList> stop;
    const auto opts = load_options(cfg, stop);
    return load_corpus(cfg.calls_path(), cfg.researchers_path(), opts);
}

std::shared_ptr<const DeltaMapper> load_delta(const AppConfig& cfg) {
    auto tax = std::make_shared<const Taxonomy>(load_taxonomy(cfg.taxonomy));
    return std::make_shared<const DeltaMapper>(std::move(tax), cfg.min_depth);
}

std::shared_ptr<const bandit::BanditModel> load_configured_model(const AppConfig& cfg) {
    if (cfg.model.empty()) return nullptr;
    if (!std::filesystem::exists(cfg.model)) return nullptr;
    return std::make_shared<const bandit::BanditModel>(bandit::load_model(cfg.model));
}

// Accepts epoch seconds or YYYY-MM-DDTHH:MM:SSZ.
std::chrono::system_clock::time_point parse_timestamp(const std::string& text) {
    if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
        return std::chrono::system_clock::time_point(std::chrono::seconds(std::stoll(text)));
    }
    std::tm tm{};
    if (strptime(text.c_str(), "%Y-%m-%dT%H:%M:%SZ", &tm) == nullptr) {
        throw ConfigError("timestamp must be epoch seconds or YYYY-MM-DDTHH:MM:SSZ, got '" + text + "'");
    }
    return std::chrono::system_clock::from_time_t(timegm(&tm));
}

void print_slates(const service::Json& response) {
    std::cout << "recommendation " << response["recommendation_id"].get<std::string>() << " ("
              << response["use_case"].get<std::string>() << ", " << response["method"].get<std::string>() << ")\n";
    if (response["slates"].empty()) {
        std::cout << "no teams found\n";
        return;
    }
    char buf[160];
    for (const auto& slate : response["slates"]) {
        const auto& call = slate["call"];
        std::cout << "\n" << call["id"].get<std::string>() << "  " << call["title"].get<std::string>() << "\n";
        if (slate["teams"].empty()) std::cout << "  no teams\n";
        int rank = 0;
        for (const auto& team : slate["teams"]) {
            const auto& b = team["breakdown"];
            std::snprintf(buf, sizeof buf,
                          "  %2d. G=%.4f  coverage=%.4f redundancy=%.4f set_size=%.4f k_robustness=%.4f (k=%d)\n",
                          ++rank, team["goodness"].get<double>(), b["coverage"].get<double>(),
                          b["redundancy"].get<double>(), b["set_size"].get<double>(),
                          b["k_robustness"].get<double>(), b["k_robust"].get<int>());
            std::cout << buf << "      ";
            bool first = true;
            for (const auto& m : team["members"]) {
                std::cout << (first ? "" : ", ") << m["name"].get<std::string>() << " [" << m["id"].get<std::string>()
                          << "]";
                first = false;
            }
            std::cout << "\n";
        }
    }
}

int run_ingest(const AppConfig& cfg, const std::string& out_dir) {
    const Corpus corpus = load_configured_corpus(cfg);
    write_snapshot(corpus, out_dir);
    std::cout << corpus.calls().size() << " calls, " << corpus.researchers().size() << " researchers, "
              << corpus.load_report().size() << " skipped\n";
    for (const auto& d : corpus.load_report()) {
        std::cerr << "skipped " << d.file << "[" << d.index << "]" << (d.id.empty() ? "" : " '" + d.id + "'") << ": "
                  << d.reason << "\n";
    }
    std::cout << "snapshot written to " << out_dir << "\n";
    return kOk;
}

int run_recommend(const AppConfig& cfg, const std::string& mode, const std::string& subject,
                  const std::string& method, int k, bool as_json, const std::string& timestamp) {
    auto corpus = std::make_shared<const Corpus>(load_configured_corpus(cfg));
    service::Clock clock;
    if (!timestamp.empty()) {
        const auto fixed = parse_timestamp(timestamp);
        clock = [fixed] { return fixed; };
    }
    const service::RecommendationEngine engine(corpus, load_delta(cfg), cfg.teaming, load_configured_model(cfg),
                                               clock);
    service::Json body{{"mode", mode}, {"subject", subject}, {"method", method}, {"k", k}};
    const auto response = engine.recommend(service::parse_request(body));
    if (as_json) {
        std::cout << response.dump(2) << "\n";
    } else {
        print_slates(response);
    }
    return kOk;
}

int run_train(const AppConfig& cfg, const std::string& out, std::string log_path) {
    const Corpus corpus = load_configured_corpus(cfg);
    const auto delta = load_delta(cfg);
    const auto result = bandit::train(corpus, *delta, cfg.training);
    bandit::save_model(result.model, out);
    if (log_path.empty()) log_path = std::filesystem::path(out).replace_extension(".log.csv").string();
    write_file(log_path, bandit::training_log_csv(result));
    char buf[128];
    std::snprintf(buf, sizeof buf, "trained %d trees on %zu examples; NLL %.6f -> %.6f\n",
                  static_cast<int>(result.model.trees.size()), result.log.empty() ? 0 : result.log.back().n_examples,
                  result.initial_nll, result.log.empty() ? result.initial_nll : result.log.back().nll);
    std::cout << buf << "model: " << out << "\nlog: " << log_path << "\n";
    return kOk;
}

struct SyntheticFlags {
    bool enabled = false;
    eval::SyntheticCorpusSpec spec;
    std::string save_dir;  // snapshot of the generated corpus
};

int run_evaluate(const AppConfig& cfg, const SyntheticFlags& synthetic, const std::string& format,
                 const std::string& out) {
    eval::ReportFormat fmt;
    if (format == "csv") fmt = eval::ReportFormat::Csv;
    else if (format == "markdown" || format == "md") fmt = eval::ReportFormat::Markdown;
    else throw ConfigError("format must be csv or markdown");

    const auto delta = load_delta(cfg);
    Corpus corpus;
    if (synthetic.enabled) {
        auto spec = synthetic.spec;
        spec.seed = cfg.teaming.rng_seed;
        corpus = eval::synthesize_corpus(spec, *delta, cfg.teaming);
        if (!synthetic.save_dir.empty()) write_snapshot(corpus, synthetic.save_dir);
    } else {
        corpus = load_configured_corpus(cfg);
    }
    const auto model = load_configured_model(cfg);
    const eval::EvalOptions options{cfg.teaming, cfg.training};
    const auto rows = eval::evaluate(corpus, *delta, model.get(), options);
    const std::string table = eval::report(rows, fmt);
    if (out.empty()) {
        std::cout << table;
    } else {
        write_file(out, table);
        std::cerr << "table written to " << out << "\n";
    }
    return kOk;
}

int run_serve(const AppConfig& cfg) {
    // signals go to the waiter thread only
    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    auto corpus = std::make_shared<const Corpus>(load_configured_corpus(cfg));
    auto model = load_configured_model(cfg);
    service::RecommendationEngine engine(corpus, load_delta(cfg), cfg.teaming, model);
    service::RecommendationRegistry registry(cfg.recommendation_log);
    service::FeedbackStore feedback(cfg.feedback_log);
    service::ModelLoader reload;
    if (!cfg.model.empty()) {
        reload = [path = cfg.model]() -> std::shared_ptr<const bandit::BanditModel> {
            if (!std::filesystem::exists(path)) return nullptr;
            return std::make_shared<const bandit::BanditModel>(bandit::load_model(path));
        };
    }
    service::Api api(engine, registry, feedback, {}, reload);
    service::HttpServer server(api, cfg.static_dir);
    const int port = server.bind(cfg.host, cfg.port);
    if (port < 0) throw IoError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&stop_signals, &sig);
        server.stop();
    });
    std::cerr << "serving " << corpus->calls().size() << " calls and " << corpus->researchers().size()
              << " researchers on http://" << cfg.host << ":" << port << (model ? "" : " (no bandit model, M3 off)")
              << "\n";
    server.serve();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Team recommendation engine: match researchers to calls for proposals."};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "key = value config file (TEAMING_<KEY> env vars override it)");

    Overrides ov;
    auto corpus_options = [&ov](CLI::App* sub) {
        key_option(sub, ov, "--corpus", "corpus_dir", "Directory holding calls.json and researchers.json");
        key_option(sub, ov, "--calls", "calls", "Calls JSON file (overrides --corpus)");
        key_option(sub, ov, "--researchers", "researchers", "Researchers JSON file (overrides --corpus)");
        key_option(sub, ov, "--stopwords", "stopwords", "Stop-word file, one word per line", "bundled English list");
    };
    auto method_options = [&ov](CLI::App* sub) {
        key_option(sub, ov, "--taxonomy", "taxonomy", "Taxonomy JSON file", "bundled taxonomy");
        key_option(sub, ov, "--model", "model", "Bandit model JSON for M3");
        key_option(sub, ov, "--t-m1", "t_m1", "String-match threshold", "0.8");
        key_option(sub, ov, "--t-m2", "t_m2", "Taxonomy-match threshold", "0.7");
        key_option(sub, ov, "--max-teams", "max_teams", "Teams per slate", "10");
        key_option(sub, ov, "--max-team-size", "max_team_size", "Members per team", "5");
        key_option(sub, ov, "--p-min", "p_min", "M3 candidate probability floor", "0.5");
        key_option(sub, ov, "--seed", "seed", "Random seed", "42");
    };

    auto* ingest = app.add_subcommand("ingest", "Validate and normalize a corpus into a snapshot directory");
    corpus_options(ingest);
    std::string ingest_out;
    ingest->add_option("--out", ingest_out, "Snapshot output directory")->required();

    auto* recommend = app.add_subcommand("recommend", "Recommend teams (UC1 researcher, UC2 call, UC3 interest)");
    corpus_options(recommend);
    method_options(recommend);
    std::string mode = "call";
    std::string subject;
    std::string method = "M1";
    int k = 5;
    bool as_json = false;
    std::string timestamp;
    recommend->add_option("--mode", mode, "researcher | call | interest")->capture_default_str();
    recommend->add_option("--subject", subject, "Researcher id, call id or free-text interest")->required();
    recommend->add_option("--method", method, "M0 | M1 | M2 | M3")->capture_default_str();
    recommend->add_option("-k", k, "Number of calls (UC1/UC3) or teams (UC2), at most 50")->capture_default_str();
    recommend->add_flag("--json", as_json, "Print the response JSON");
    recommend->add_option("--timestamp", timestamp, "Fix the clock (epoch seconds or ISO 8601 UTC)");

    auto* train = app.add_subcommand("train", "Train the M3 bandit model with weak supervision");
    corpus_options(train);
    key_option(train, ov, "--taxonomy", "taxonomy", "Taxonomy JSON file", "bundled taxonomy");
    key_option(train, ov, "--iterations", "iterations", "Boosting iterations", "10");
    key_option(train, ov, "--max-depth", "max_depth", "Regression tree depth limit", "3");
    key_option(train, ov, "--min-leaf", "min_leaf", "Minimum examples per leaf", "5");
    key_option(train, ov, "--seed", "seed", "Negative subsampling seed", "42");
    std::string train_out = "model.json";
    std::string train_log;
    train->add_option("--out", train_out, "Model output file")->capture_default_str();
    train->add_option("--log", train_log, "Training log CSV")->default_str("<out>.log.csv");

    auto* evaluate = app.add_subcommand("evaluate", "Quality vs volume table for M0..M3");
    corpus_options(evaluate);
    method_options(evaluate);
    SyntheticFlags synthetic;
    std::string format = "csv";
    std::string eval_out;
    evaluate->add_flag("--synthetic", synthetic.enabled, "Evaluate on a generated corpus instead of --corpus");
    evaluate->add_option("--n-calls", synthetic.spec.n_calls, "Synthetic calls")->capture_default_str();
    evaluate->add_option("--n-researchers", synthetic.spec.n_researchers, "Synthetic researchers")
        ->capture_default_str();
    evaluate->add_option("--overlap", synthetic.spec.overlap_ratio, "Synthetic demand-side interest share")
        ->capture_default_str();
    evaluate->add_option("--bridge", synthetic.spec.taxonomy_bridge_ratio,
                         "Synthetic share of demand-side interests replaced by taxonomy neighbours")
        ->capture_default_str();
    evaluate->add_option("--save-corpus", synthetic.save_dir, "Write the synthetic corpus snapshot to this directory");
    evaluate->add_option("--format", format, "csv | markdown")->capture_default_str();
    evaluate->add_option("--out", eval_out, "Write the table here instead of stdout");

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    corpus_options(serve);
    method_options(serve);
    key_option(serve, ov, "--host", "host", "Bind address", "127.0.0.1");
    key_option(serve, ov, "--port", "port", "Port (0 picks a free one)", "8080");
    key_option(serve, ov, "--feedback-log", "feedback_log", "Feedback log (ndjson)", "feedback.ndjson");
    key_option(serve, ov, "--recommendation-log", "recommendation_log", "Issued recommendations log (ndjson)",
               "recommendations.ndjson");
    key_option(serve, ov, "--static-dir", "static_dir", "Directory of web assets to serve at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        const AppConfig cfg = resolve_config(config_file, ov);
        if (*ingest) return run_ingest(cfg, ingest_out);
        if (*recommend) return run_recommend(cfg, mode, subject, method, k, as_json, timestamp);
        if (*train) return run_train(cfg, train_out, train_log);
        if (*evaluate) return run_evaluate(cfg, synthetic, format, eval_out);
        if (*serve) return run_serve(cfg);
    } catch (const service::RequestError& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        if (e.status() == 404) return kNotFound;
        if (e.status() == 409) return kTrainingData;
        return kConfig;
    } catch (const NotFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNotFound;
    } catch (const TrainingDataError& e) {
        std::cerr << "error: training data: " << e.what() << "\n";
        return kTrainingData;
    } catch (const ModelNotTrained& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kTrainingData;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    return kConfig;
}

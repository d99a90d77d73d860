#include "teaming/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "teaming/error.hpp"
#include "teaming/hash.hpp"
#include "json_text.hpp"

namespace teaming {

using json = nlohmann::ordered_json;

namespace detail {

json parse_json_text(std::string_view text, const std::string& what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character
        const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(what + ": malformed JSON at line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + e.what(),
                         line, column);
    }
}

}  // namespace detail

namespace {

using detail::parse_json_text;

const json* field(const json& record, const char* key) {
    auto it = record.find(key);
    return it == record.end() ? nullptr : &*it;
}

bool string_field(const json& record, const char* key, std::string& out) {
    const json* v = field(record, key);
    if (v == nullptr || !v->is_string()) return false;
    out = v->get<std::string>();
    return true;
}

// Normalizes every string entry; non-strings and empty phrases are dropped.
bool skill_list(const json& record, const char* key, SkillSet& out) {
    const json* v = field(record, key);
    if (v == nullptr || !v->is_array()) return false;
    for (const auto& item : *v) {
        if (!item.is_string()) continue;
        if (auto skill = try_normalize_skill(item.get<std::string>())) out.insert(std::move(*skill));
    }
    return true;
}

std::string record_id(const json& record) {
    std::string id;
    if (record.is_object()) string_field(record, "id", id);
    return id;
}

void check_unique(const json& records, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& record : records) {
        const auto id = record_id(record);
        if (id.empty()) continue;
        if (!seen.insert(id).second) throw ValidationError("duplicate " + what + " id '" + id + "'");
    }
}

std::vector<Call> parse_calls(const json& records, const LoadOptions& options, std::vector<LoadDiagnostic>& report) {
    const auto& stopwords = options.stopwords ? *options.stopwords : skills::StopWordList::english();
    std::vector<Call> calls;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& record = records[i];
        auto reject = [&](std::string reason) {
            report.push_back({"calls", i, record_id(record), std::move(reason)});
        };
        if (!record.is_object()) {
            reject("record is not an object");
            continue;
        }
        Call call;
        if (!string_field(record, "id", call.id) || call.id.empty()) {
            reject("missing or empty 'id'");
            continue;
        }
        if (!string_field(record, "title", call.title)) {
            reject("missing 'title'");
            continue;
        }
        if (!string_field(record, "synopsis", call.synopsis)) {
            reject("missing 'synopsis'");
            continue;
        }
        string_field(record, "source", call.source);
        if (field(record, "skills") != nullptr) {
            if (!skill_list(record, "skills", call.demanded_skills)) {
                reject("'skills' is not an array");
                continue;
            }
        } else {
            call.demanded_skills = skills::extract_skills(call.title, call.synopsis, stopwords, options.extract);
        }
        if (call.demanded_skills.empty()) {
            reject("no demanded skills");
            continue;
        }
        calls.push_back(std::move(call));
    }
    return calls;
}

std::vector<Researcher> parse_researchers(const json& records, std::vector<LoadDiagnostic>& report) {
    std::vector<Researcher> researchers;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& record = records[i];
        auto reject = [&](std::string reason) {
            report.push_back({"researchers", i, record_id(record), std::move(reason)});
        };
        if (!record.is_object()) {
            reject("record is not an object");
            continue;
        }
        Researcher r;
        if (!string_field(record, "id", r.id) || r.id.empty()) {
            reject("missing or empty 'id'");
            continue;
        }
        if (!string_field(record, "name", r.name)) {
            reject("missing 'name'");
            continue;
        }
        if (!skill_list(record, "interests", r.interests)) {
            reject("missing 'interests'");
            continue;
        }
        if (r.interests.empty()) {
            reject("no extractable interests");
            continue;
        }
        if (const json* urls = field(record, "profile_urls"); urls != nullptr && urls->is_array()) {
            for (const auto& u : *urls) {
                if (u.is_string()) r.profile_urls.push_back(u.get<std::string>());
            }
        }
        researchers.push_back(std::move(r));
    }
    return researchers;
}

json skills_json(const SkillSet& skills) {
    json arr = json::array();
    for (const auto& s : skills) arr.push_back(s.text());
    return arr;
}

}  // namespace

Corpus::Corpus(std::vector<Call> calls, std::vector<Researcher> researchers, std::vector<LoadDiagnostic> report)
    : calls_(std::move(calls)), researchers_(std::move(researchers)), report_(std::move(report)) {
    for (std::size_t i = 0; i < calls_.size(); ++i) {
        if (calls_[i].demanded_skills.empty()) {
            throw ValidationError("call '" + calls_[i].id + "' has no demanded skills");
        }
        if (!call_index_.emplace(calls_[i].id, i).second) {
            throw ValidationError("duplicate call id '" + calls_[i].id + "'");
        }
    }
    for (std::size_t i = 0; i < researchers_.size(); ++i) {
        if (researchers_[i].interests.empty()) {
            throw ValidationError("researcher '" + researchers_[i].id + "' has no interests");
        }
        if (!researcher_index_.emplace(researchers_[i].id, i).second) {
            throw ValidationError("duplicate researcher id '" + researchers_[i].id + "'");
        }
    }
    const auto content = calls_to_json(*this) + '\n' + researchers_to_json(*this);
    version_ = to_hex(fnv1a(content));
}

const Call* Corpus::find_call(std::string_view id) const {
    auto it = call_index_.find(id);
    return it == call_index_.end() ? nullptr : &calls_[it->second];
}

const Researcher* Corpus::find_researcher(std::string_view id) const {
    auto it = researcher_index_.find(id);
    return it == researcher_index_.end() ? nullptr : &researchers_[it->second];
}

Corpus parse_corpus(std::string_view calls_json, std::string_view researchers_json, const LoadOptions& options) {
    const json calls = parse_json_text(calls_json, "calls");
    const json researchers = parse_json_text(researchers_json, "researchers");
    if (!calls.is_array()) throw ValidationError("calls file must hold a JSON array");
    if (!researchers.is_array()) throw ValidationError("researchers file must hold a JSON array");
    check_unique(calls, "call");
    check_unique(researchers, "researcher");

    std::vector<LoadDiagnostic> report;
    auto parsed_calls = parse_calls(calls, options, report);
    auto parsed_researchers = parse_researchers(researchers, report);
    return Corpus(std::move(parsed_calls), std::move(parsed_researchers), std::move(report));
}

Corpus load_corpus(const std::filesystem::path& calls_path, const std::filesystem::path& researchers_path,
                   const LoadOptions& options) {
    const auto calls = read_file(calls_path);
    const auto researchers = read_file(researchers_path);
    return parse_corpus(calls, researchers, options);
}

Corpus load_corpus_dir(const std::filesystem::path& dir, const LoadOptions& options) {
    return load_corpus(dir / "calls.json", dir / "researchers.json", options);
}

std::string calls_to_json(const Corpus& corpus) {
    json arr = json::array();
    for (const auto& c : corpus.calls()) {
        json j;
        j["id"] = c.id;
        j["title"] = c.title;
        j["synopsis"] = c.synopsis;
        j["skills"] = skills_json(c.demanded_skills);
        j["source"] = c.source;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string researchers_to_json(const Corpus& corpus) {
    json arr = json::array();
    for (const auto& r : corpus.researchers()) {
        json j;
        j["id"] = r.id;
        j["name"] = r.name;
        j["interests"] = skills_json(r.interests);
        j["profile_urls"] = r.profile_urls;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string report_to_json(const Corpus& corpus) {
    json j;
    j["calls"] = corpus.calls().size();
    j["researchers"] = corpus.researchers().size();
    json skipped = json::array();
    for (const auto& d : corpus.load_report()) {
        skipped.push_back({{"file", d.file}, {"index", d.index}, {"id", d.id}, {"reason", d.reason}});
    }
    j["skipped"] = std::move(skipped);
    return j.dump(2);
}

void write_snapshot(const Corpus& corpus, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    write_file(dir / "calls.json", calls_to_json(corpus) + '\n');
    write_file(dir / "researchers.json", researchers_to_json(corpus) + '\n');
    write_file(dir / "report.json", report_to_json(corpus) + '\n');
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("error writing " + path.string());
}

}  // namespace teaming

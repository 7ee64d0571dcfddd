#include "rhymecheck/promptkit.hpp"

#include "rhymecheck/errors.hpp"
#include "rhymecheck/textproc.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <future>
#include <sstream>
#include <unordered_map>

#include <unistd.h>

namespace rhymecheck {

std::string_view to_string(PromptKind kind) {
    return kind == PromptKind::augmentation ? "augmentation" : "rectification";
}

std::optional<PromptKind> parse_prompt_kind(std::string_view text) {
    if (text == "augmentation" || text == "augment") return PromptKind::augmentation;
    if (text == "rectification" || text == "rectify") return PromptKind::rectification;
    return std::nullopt;
}

std::string format_timestamp(Timestamp when) {
    const std::time_t t = std::chrono::system_clock::to_time_t(when);
    std::tm utc{};
    gmtime_r(&t, &utc);
    std::array<char, 32> buffer{};
    std::strftime(buffer.data(), buffer.size(), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer.data();
}

std::string poem_text(const Document& doc) {
    std::string text;
    for (const auto& line : doc.lines) {
        if (!text.empty()) text.push_back('\n');
        text += line.text;
    }
    return text;
}

namespace {

PromptJob make_job(const Document& doc, PromptKind kind, std::string_view instruction, Timestamp created_at) {
    PromptJob job;
    job.doc_id = doc.id;
    job.kind = kind;
    job.created_at = created_at;
    job.prompt_text.reserve(instruction.size() + 2 + doc.lines.size() * 40);
    job.prompt_text += instruction;
    job.prompt_text += "\n\n";
    job.prompt_text += poem_text(doc);
    return job;
}

}  // namespace

PromptJob build_augmentation_prompt(const Document& doc, Timestamp created_at) {
    if (doc.provenance != Provenance::original) {
        throw PreconditionError("refusing to augment non-original document '" + doc.id + "'");
    }
    return make_job(doc, PromptKind::augmentation, kAugmentationInstruction, created_at);
}

PromptJob build_rectification_prompt(const Document& doc, bool flagged, Timestamp created_at) {
    if (!flagged) throw PreconditionError("document '" + doc.id + "' is not flagged as a rectification candidate");
    return make_job(doc, PromptKind::rectification, kRectificationInstruction, created_at);
}

namespace {

std::string strip(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

}  // namespace

Document register_response(const PromptJob& job, std::string_view response, const Document& parent,
                           std::optional<std::string> new_id) {
    if (parent.id != job.doc_id) throw PreconditionError("response parent does not match the prompt job");
    if (response.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw DataError("empty response for '" + job.doc_id + "'");
    }
    if (response.find('\0') != std::string_view::npos || !is_valid_utf8(response)) {
        throw DataError("unparseable response for '" + job.doc_id + "': not UTF-8 text");
    }
    Document doc;
    doc.id = new_id ? *new_id : parent.id + (job.kind == PromptKind::augmentation ? "~aug" : "~rect");
    doc.title = parent.title;
    doc.kind = parent.kind;
    doc.source_language = parent.source_language;
    doc.provenance = job.kind == PromptKind::augmentation ? Provenance::augmented : Provenance::rectified;
    doc.parent_id = parent.id;

    std::size_t start = 0;
    while (start <= response.size()) {
        auto end = response.find('\n', start);
        if (end == std::string_view::npos) end = response.size();
        auto text = strip(response.substr(start, end - start));
        if (!text.empty()) doc.lines.push_back({doc.lines.size(), std::move(text), Label::non_stereotypical});
        start = end + 1;
    }
    if (doc.lines.empty()) throw DataError("unparseable response for '" + job.doc_id + "': no lines");

    if (job.kind == PromptKind::augmentation && doc.lines.size() == parent.lines.size() && !parent.needs_annotation) {
        for (std::size_t i = 0; i < doc.lines.size(); ++i) doc.lines[i].label = parent.lines[i].label;
    } else {
        doc.needs_annotation = true;
    }
    validate_document(doc);
    return doc;
}

namespace {

const std::unordered_map<std::string, std::string>& augmentation_synonyms() {
    static const std::unordered_map<std::string, std::string> table{
        {"hill", "mountain"},   {"fetch", "obtain"},   {"pail", "bucket"}, {"bake", "fry"},
        {"cake", "pie"},        {"house", "home"},     {"shell", "husk"},  {"garden", "yard"},
        {"road", "path"},       {"king", "monarch"},   {"queen", "empress"}, {"boat", "vessel"},
        {"town", "village"},    {"wood", "forest"},    {"stone", "rock"},  {"cottage", "cabin"},
    };
    return table;
}

const std::unordered_map<std::string, std::string>& rectification_terms() {
    static const std::unordered_map<std::string, std::string> table{
        {"wife", "partner"},     {"husband", "partner"}, {"girls", "children"}, {"boys", "children"},
        {"girl", "child"},       {"boy", "child"},       {"maid", "friend"},    {"maids", "friends"},
        {"master", "friend"},    {"mistress", "friend"}, {"lady", "person"},    {"ladies", "people"},
        {"gentleman", "person"}, {"gentlemen", "people"},
    };
    return table;
}

// Replaces whole ASCII words found in `table`, keeping an initial capital.
std::string substitute_words(std::string_view text, const std::unordered_map<std::string, std::string>& table) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
            out.push_back(text[i++]);
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
        std::string word(text.substr(i, j - i));
        std::string lower = word;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        auto it = table.find(lower);
        if (it == table.end()) {
            out += word;
        } else {
            std::string replacement = it->second;
            if (std::isupper(static_cast<unsigned char>(word.front()))) {
                replacement.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement.front())));
            }
            out += replacement;
        }
        i = j;
    }
    return out;
}

}  // namespace

std::string StubCompletionClient::complete(std::string_view prompt) {
    const auto body_at = prompt.find("\n\n");
    if (body_at == std::string_view::npos) throw CompletionError("stub client: prompt has no poem body");
    const auto instruction = prompt.substr(0, body_at);
    const auto body = prompt.substr(body_at + 2);
    if (instruction == kAugmentationInstruction) return substitute_words(body, augmentation_synonyms());
    if (instruction == kRectificationInstruction) return substitute_words(body, rectification_terms());
    return std::string(body);
}

CommandCompletionClient::CommandCompletionClient(std::string command) : command_(std::move(command)) {
    if (command_.empty()) throw PreconditionError("completion command is empty");
}

std::unique_ptr<CommandCompletionClient> CommandCompletionClient::from_environment() {
    const char* command = std::getenv(kCompletionCommandEnv);
    if (!command || !*command) return nullptr;
    return std::make_unique<CommandCompletionClient>(command);
}

std::string CommandCompletionClient::complete(std::string_view prompt) {
    namespace fs = std::filesystem;
    static std::atomic<unsigned> counter{0};
    const auto path = fs::temp_directory_path() /
                      ("rhymecheck-prompt-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".txt");
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw CompletionError("cannot stage prompt file");
        out << prompt;
    }
    const std::string shell = command_ + " < '" + path.string() + "'";
    FILE* pipe = ::popen(shell.c_str(), "r");
    if (!pipe) {
        fs::remove(path);
        throw CompletionError("cannot start completion command");
    }
    std::string output;
    std::array<char, 4096> buffer{};
    while (const auto n = std::fread(buffer.data(), 1, buffer.size(), pipe)) output.append(buffer.data(), n);
    const int status = ::pclose(pipe);
    fs::remove(path);
    if (status != 0) throw CompletionError("completion command exited with status " + std::to_string(status));
    return output;
}

PromptJournal::PromptJournal(const std::string& path) : out_(path, std::ios::app) {
    if (!out_) throw DataError("cannot open prompt journal '" + path + "'");
}

void PromptJournal::append(const std::string& line) {
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
}

void PromptJournal::record_job(const PromptJob& job) {
    nlohmann::ordered_json record{{"event", "job"},
                                  {"doc_id", job.doc_id},
                                  {"kind", to_string(job.kind)},
                                  {"created_at", format_timestamp(job.created_at)},
                                  {"prompt", job.prompt_text}};
    append(record.dump());
}

void PromptJournal::record_response(const PromptJob& job, std::string_view response, const std::string& registered_id,
                                    Timestamp received_at) {
    nlohmann::ordered_json record{{"event", "response"},
                                  {"doc_id", job.doc_id},
                                  {"kind", to_string(job.kind)},
                                  {"created_at", format_timestamp(job.created_at)},
                                  {"received_at", format_timestamp(received_at)},
                                  {"registered_id", registered_id},
                                  {"response", std::string(response)}};
    append(record.dump());
}

void PromptJournal::record_failure(const PromptJob& job, std::string_view error, Timestamp failed_at) {
    nlohmann::ordered_json record{{"event", "failure"},
                                  {"doc_id", job.doc_id},
                                  {"kind", to_string(job.kind)},
                                  {"created_at", format_timestamp(job.created_at)},
                                  {"failed_at", format_timestamp(failed_at)},
                                  {"error", std::string(error)}};
    append(record.dump());
}

std::vector<CompletionOutcome> run_completions(CompletionClient& client, std::span<const PromptJob> jobs,
                                               std::span<const Document> parents, PromptJournal* journal,
                                               std::size_t parallelism) {
    std::unordered_map<std::string_view, const Document*> parent_of;
    for (const auto& doc : parents) parent_of.emplace(doc.id, &doc);
    for (const auto& job : jobs) {
        if (!parent_of.contains(job.doc_id)) throw PreconditionError("no parent document for job '" + job.doc_id + "'");
    }

    struct Reply {
        std::optional<std::string> text;
        std::string error;
        Timestamp at;
    };
    auto call = [&client](const PromptJob& job) {
        Reply reply;
        try {
            reply.text = client.complete(job.prompt_text);
        } catch (const std::exception& e) {
            reply.error = e.what();
        }
        reply.at = std::chrono::system_clock::now();
        return reply;
    };

    std::vector<Reply> replies(jobs.size());
    const std::size_t width = std::max<std::size_t>(parallelism, 1);
    for (std::size_t begin = 0; begin < jobs.size(); begin += width) {
        const std::size_t end = std::min(jobs.size(), begin + width);
        if (journal) {
            for (std::size_t i = begin; i < end; ++i) journal->record_job(jobs[i]);
        }
        if (width == 1) {
            replies[begin] = call(jobs[begin]);
            continue;
        }
        std::vector<std::future<Reply>> pending;
        for (std::size_t i = begin; i < end; ++i) pending.push_back(std::async(std::launch::async, call, std::cref(jobs[i])));
        for (std::size_t i = begin; i < end; ++i) replies[i] = pending[i - begin].get();
    }

    std::vector<CompletionOutcome> outcomes;
    outcomes.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        CompletionOutcome outcome{jobs[i], std::nullopt, replies[i].error};
        if (replies[i].text) {
            try {
                outcome.document = register_response(jobs[i], *replies[i].text, *parent_of.at(jobs[i].doc_id));
            } catch (const DataError& e) {
                outcome.error = e.what();
            }
        }
        if (journal) {
            if (outcome.document) {
                journal->record_response(jobs[i], *replies[i].text, outcome.document->id, replies[i].at);
            } else {
                journal->record_failure(jobs[i], outcome.error, replies[i].at);
            }
        }
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

}  // namespace rhymecheck

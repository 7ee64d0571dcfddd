#pragma once

// Prompt construction for synonym augmentation and stereotype rectification, a pluggable
// completion client, and registration of completions as new corpus documents.

#include "rhymecheck/corpus.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rhymecheck {

inline constexpr std::string_view kAugmentationInstruction =
    "Replace [*nouns or subject/objects from the poem or rhyme*] with synonyms. "
    "Keep the poem rhyme scheme and sentence formation intact forcefully";

inline constexpr std::string_view kRectificationInstruction =
    "Change the poem to remove gender stereotypes and make sure to keep sentence formation and rhyme "
    "scheme close to the original as much as possible.";

enum class PromptKind { augmentation, rectification };

std::string_view to_string(PromptKind kind);
std::optional<PromptKind> parse_prompt_kind(std::string_view text);

using Timestamp = std::chrono::system_clock::time_point;

// ISO-8601 UTC with second resolution, e.g. 2024-05-01T12:00:00Z.
std::string format_timestamp(Timestamp when);

struct PromptJob {
    std::string doc_id;
    PromptKind kind = PromptKind::augmentation;
    std::string prompt_text;  // instruction, blank line, then the poem's lines
    Timestamp created_at{};
};

// Lines of `doc` joined with '\n'.
std::string poem_text(const Document& doc);

// Refuses anything but an original document.
PromptJob build_augmentation_prompt(const Document& doc, Timestamp created_at = std::chrono::system_clock::now());

// `flagged` is the document's rectification-candidate flag (see aggregate_document);
// unflagged documents are refused.
PromptJob build_rectification_prompt(const Document& doc, bool flagged,
                                     Timestamp created_at = std::chrono::system_clock::now());

// Parses a completion into a new document derived from `parent`. Augmented documents
// inherit line labels when the line count matches; otherwise, and for every rectified
// document, the result is marked as needing annotation. `new_id` defaults to
// "<parent>~aug" or "<parent>~rect".
Document register_response(const PromptJob& job, std::string_view response, const Document& parent,
                           std::optional<std::string> new_id = std::nullopt);

class CompletionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    // Returns the completion text or throws CompletionError.
    virtual std::string complete(std::string_view prompt) = 0;
};

// Deterministic offline client: echoes the poem with a fixed word substitution table for
// the prompt's kind (synonyms for augmentation, gender-neutral terms for rectification).
class StubCompletionClient final : public CompletionClient {
public:
    std::string complete(std::string_view prompt) override;
};

// Runs an external command with the prompt on stdin and uses its stdout as completion.
// The command comes from RHYMECHECK_COMPLETION_COMMAND unless given explicitly.
class CommandCompletionClient final : public CompletionClient {
public:
    explicit CommandCompletionClient(std::string command);
    static std::unique_ptr<CommandCompletionClient> from_environment();

    std::string complete(std::string_view prompt) override;

private:
    std::string command_;
};

inline constexpr const char* kCompletionCommandEnv = "RHYMECHECK_COMPLETION_COMMAND";

// Append-only JSON-lines audit log of jobs and responses. Safe to share between threads.
class PromptJournal {
public:
    explicit PromptJournal(const std::string& path);

    void record_job(const PromptJob& job);
    void record_response(const PromptJob& job, std::string_view response, const std::string& registered_id,
                         Timestamp received_at);
    void record_failure(const PromptJob& job, std::string_view error, Timestamp failed_at);

private:
    void append(const std::string& line);

    std::mutex mutex_;
    std::ofstream out_;
};

struct CompletionOutcome {
    PromptJob job;
    std::optional<Document> document;
    std::string error;
};

// Sends every job to `client` (up to `parallelism` at once) and registers the responses in
// job order. `parents` must contain each job's source document.
std::vector<CompletionOutcome> run_completions(CompletionClient& client, std::span<const PromptJob> jobs,
                                               std::span<const Document> parents, PromptJournal* journal = nullptr,
                                               std::size_t parallelism = 1);

}  // namespace rhymecheck

#pragma once

// Annotated verse corpus: documents made of labelled lines, parsing/serialisation of the
// JSON-lines corpus file and the document-level stratified train/validation/test split.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rhymecheck {

enum class Label : std::uint8_t { non_stereotypical = 0, stereotypical = 1 };

enum class DocumentKind : std::uint8_t { rhyme, poem };

enum class Provenance : std::uint8_t { original, augmented, rectified };

std::string_view to_string(DocumentKind kind);
std::string_view to_string(Provenance provenance);
std::optional<DocumentKind> parse_document_kind(std::string_view text);
std::optional<Provenance> parse_provenance(std::string_view text);

inline bool is_positive(Label label) { return label == Label::stereotypical; }
inline Label label_from_bool(bool positive) {
    return positive ? Label::stereotypical : Label::non_stereotypical;
}

struct Line {
    std::size_t index = 0;
    std::string text;
    Label label = Label::non_stereotypical;

    friend bool operator==(const Line&, const Line&) = default;
};

struct Document {
    std::string id;
    std::string title;
    DocumentKind kind = DocumentKind::rhyme;
    std::string source_language = "en";
    std::vector<Line> lines;
    Provenance provenance = Provenance::original;
    std::optional<std::string> parent_id;
    // Set for generated documents whose line labels could not be carried over from the
    // parent. Such documents are kept in the corpus but excluded from training/evaluation.
    bool needs_annotation = false;

    friend bool operator==(const Document&, const Document&) = default;
};

// Checks the per-document invariants (non-empty, indices, line text, provenance/parent).
// Throws DataError.
void validate_document(const Document& doc);

// Checks corpus-level invariants: unique ids and resolvable parents. Throws DataError.
void validate_corpus(const std::vector<Document>& docs);

// Reads one JSON record per line. Blank lines are skipped. Errors name the 1-based record.
std::vector<Document> parse_corpus(std::istream& in);
std::vector<Document> load_corpus(const std::string& path);

void write_document(std::ostream& out, const Document& doc);
void serialize_corpus(std::ostream& out, const std::vector<Document>& docs);
void save_corpus(const std::string& path, const std::vector<Document>& docs);

// Stereotypical iff any line is stereotypical.
Label document_label(const Document& doc);

struct SplitRatios {
    double train = 0.8;
    double validation = 0.0;
    double test = 0.2;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

struct CorpusSplit {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
    std::uint64_t seed = kDefaultSeed;
    SplitRatios ratios;
};

// Document-level split stratified by document_label over the lineage roots (original
// documents). Generated documents follow their root ancestor. Deterministic for a fixed
// input order and seed.
CorpusSplit split_corpus(const std::vector<Document>& docs, SplitRatios ratios,
                         std::uint64_t seed = kDefaultSeed);

struct CorpusStats {
    struct Row {
        std::size_t verses = 0;
        std::size_t lines = 0;
    };
    Row stereotypical_rhymes;
    Row non_stereotypical_rhymes;
    Row stereotypical_poems;
    Row non_stereotypical_poems;
    Row augmented;
    Row rectified;
    Row unannotated;
    Row total_original;
    Row total_with_generated;
};

CorpusStats corpus_stats(const std::vector<Document>& docs);

}  // namespace rhymecheck

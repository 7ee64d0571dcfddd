#pragma once

#include "rhymecheck/corpus.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rhymecheck {

struct Token {
    std::string surface;  // lowercased; typographic apostrophes normalised to '
    std::size_t begin = 0;  // byte offsets into the source text
    std::size_t end = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

// Letters and digits (any non-ASCII letter included) form tokens; an apostrophe is kept
// only between two token characters. Everything else separates.
std::vector<Token> tokenize(std::string_view text);

bool is_valid_utf8(std::string_view text);

// Surfaces only, for callers that do not need spans.
std::vector<std::string> tokenize_words(std::string_view text);

enum class Scheme { L1, L2, L3, FULL };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view text);

struct LineSpan {
    std::size_t lo = 0;
    std::size_t hi = 0;  // exclusive

    friend bool operator==(const LineSpan&, const LineSpan&) = default;
};

struct Segment {
    std::string doc_id;
    LineSpan span;
    std::string text;  // constituent lines joined by '\n'
    Label label = Label::non_stereotypical;
};

// Consecutive windows of 1, 2 or 3 lines (the last one possibly shorter), or the whole
// document for FULL. Each label is the OR of its lines.
std::vector<Segment> segment(const Document& doc, Scheme scheme);

std::size_t segment_count(std::size_t line_count, Scheme scheme);

}  // namespace rhymecheck

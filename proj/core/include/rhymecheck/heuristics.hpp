#pragma once

// Heuristic encoder: annotator-curated name/phrase lexicons plus a lexicon sentiment
// score, reduced to the five bits [male, female, stereotype, negative, positive].

#include "rhymecheck/textproc.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rhymecheck {

using Phrase = std::vector<std::string>;

enum class LexiconScope : std::uint8_t {
    master,      // as loaded from disk; may mention test-partition material
    train_only,  // restricted to entries attested in the training partition
};

struct HeuristicLexicon {
    std::set<std::string> male_names;
    std::set<std::string> female_names;
    std::set<Phrase> stereotype_phrases;
    LexiconScope scope = LexiconScope::master;

    bool empty() const { return male_names.empty() && female_names.empty() && stereotype_phrases.empty(); }
};

// Throws DataError when an entry is not in tokenized form or a name is both male and female.
void validate_lexicon(const HeuristicLexicon& lexicon);

// Sectioned text: lines under [male_names], [female_names] or [stereotype_phrases];
// '#' starts a comment line. Entries are tokenized on load.
HeuristicLexicon parse_heuristic_lexicon(std::istream& in);
HeuristicLexicon load_heuristic_lexicon(const std::string& path);
void write_heuristic_lexicon(std::ostream& out, const HeuristicLexicon& lexicon);

// Keeps only the entries that occur in `train_texts`. The result is tagged train_only.
HeuristicLexicon restrict_to_partition(const HeuristicLexicon& master, std::span<const std::string> train_texts);

inline const std::unordered_set<std::string>& default_negators() {
    static const std::unordered_set<std::string> negators{"not",   "no",    "never", "couldn't",
                                                          "can't", "won't", "don't"};
    return negators;
}

struct SentimentLexicon {
    std::unordered_map<std::string, double> polarity;
    std::unordered_set<std::string> negators = default_negators();
};

// Throws DataError for out-of-range polarities or a negator that also carries polarity.
void validate_lexicon(const SentimentLexicon& lexicon);

// token<TAB>polarity per line; '#' comments and blank lines ignored.
SentimentLexicon parse_sentiment_lexicon(std::istream& in);
SentimentLexicon load_sentiment_lexicon(const std::string& path);

inline constexpr std::size_t kNegationWindow = 3;
inline constexpr double kDefaultSentimentThreshold = 0.05;

struct HeuristicVector {
    enum Bit : std::size_t { male = 0, female = 1, stereotype = 2, negative = 3, positive = 4 };
    static constexpr std::size_t kWidth = 5;

    std::array<std::uint8_t, kWidth> bits{};

    std::uint8_t operator[](std::size_t i) const { return bits[i]; }
    friend bool operator==(const HeuristicVector&, const HeuristicVector&) = default;
};

std::string to_string(const HeuristicVector& vector);  // "0 1 1 1 0"

// Every phrase occurring contiguously in `tokens`.
std::set<Phrase> match_phrases(std::span<const Token> tokens, const std::set<Phrase>& phrases);

// Mean polarity of sentiment-bearing tokens; a token's polarity is negated when a negator
// appears among the kNegationWindow tokens before it. 0 when nothing matches.
double sentiment_score(std::span<const Token> tokens, const SentimentLexicon& lexicon);

struct EncoderOptions {
    double threshold = kDefaultSentimentThreshold;
};

HeuristicVector encode(std::string_view text, const HeuristicLexicon& heuristics,
                       const SentimentLexicon& sentiment, EncoderOptions options = {});

}  // namespace rhymecheck

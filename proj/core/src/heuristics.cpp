#include "rhymecheck/heuristics.hpp"

#include "rhymecheck/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rhymecheck {

namespace {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

bool is_tokenized_word(const std::string& word) {
    const auto tokens = tokenize_words(word);
    return tokens.size() == 1 && tokens.front() == word;
}

std::string join(const Phrase& phrase) {
    std::string out;
    for (const auto& word : phrase) {
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

}  // namespace

void validate_lexicon(const HeuristicLexicon& lexicon) {
    for (const auto* names : {&lexicon.male_names, &lexicon.female_names}) {
        for (const auto& name : *names) {
            if (!is_tokenized_word(name)) throw DataError("lexicon name '" + name + "' is not a single lowercase token");
        }
    }
    for (const auto& name : lexicon.male_names) {
        if (lexicon.female_names.contains(name)) throw DataError("name '" + name + "' is listed as both male and female");
    }
    for (const auto& phrase : lexicon.stereotype_phrases) {
        if (phrase.empty()) throw DataError("empty stereotype phrase");
        for (const auto& word : phrase) {
            if (!is_tokenized_word(word)) throw DataError("stereotype phrase '" + join(phrase) + "' is not tokenized");
        }
    }
}

HeuristicLexicon parse_heuristic_lexicon(std::istream& in) {
    enum class Section { none, male, female, phrases } section = Section::none;
    HeuristicLexicon lexicon;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line == "[male_names]") section = Section::male;
            else if (line == "[female_names]") section = Section::female;
            else if (line == "[stereotype_phrases]") section = Section::phrases;
            else throw DataError("unknown lexicon section " + line + " on line " + std::to_string(line_no));
            continue;
        }
        auto words = tokenize_words(line);
        if (words.empty()) throw DataError("lexicon entry without tokens on line " + std::to_string(line_no));
        switch (section) {
        case Section::none:
            throw DataError("lexicon entry outside a section on line " + std::to_string(line_no));
        case Section::male:
        case Section::female:
            if (words.size() != 1) throw DataError("name must be a single token on line " + std::to_string(line_no));
            (section == Section::male ? lexicon.male_names : lexicon.female_names).insert(words.front());
            break;
        case Section::phrases:
            lexicon.stereotype_phrases.insert(std::move(words));
            break;
        }
    }
    validate_lexicon(lexicon);
    return lexicon;
}

HeuristicLexicon load_heuristic_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file '" + path + "'");
    return parse_heuristic_lexicon(in);
}

void write_heuristic_lexicon(std::ostream& out, const HeuristicLexicon& lexicon) {
    out << "[male_names]\n";
    for (const auto& name : lexicon.male_names) out << name << '\n';
    out << "[female_names]\n";
    for (const auto& name : lexicon.female_names) out << name << '\n';
    out << "[stereotype_phrases]\n";
    for (const auto& phrase : lexicon.stereotype_phrases) out << join(phrase) << '\n';
}

HeuristicLexicon restrict_to_partition(const HeuristicLexicon& master, std::span<const std::string> train_texts) {
    std::unordered_set<std::string> seen_words;
    std::set<Phrase> seen_phrases;
    for (const auto& text : train_texts) {
        const auto tokens = tokenize(text);
        for (const auto& token : tokens) seen_words.insert(token.surface);
        for (auto& phrase : match_phrases(tokens, master.stereotype_phrases)) seen_phrases.insert(phrase);
    }
    HeuristicLexicon restricted;
    restricted.scope = LexiconScope::train_only;
    for (const auto& name : master.male_names) {
        if (seen_words.contains(name)) restricted.male_names.insert(name);
    }
    for (const auto& name : master.female_names) {
        if (seen_words.contains(name)) restricted.female_names.insert(name);
    }
    restricted.stereotype_phrases = std::move(seen_phrases);
    return restricted;
}

void validate_lexicon(const SentimentLexicon& lexicon) {
    for (const auto& [word, polarity] : lexicon.polarity) {
        if (!(polarity >= -1.0 && polarity <= 1.0)) throw DataError("polarity of '" + word + "' outside [-1, 1]");
        if (lexicon.negators.contains(word)) throw DataError("negator '" + word + "' must not carry a polarity");
    }
}

SentimentLexicon parse_sentiment_lexicon(std::istream& in) {
    SentimentLexicon lexicon;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError("expected token<TAB>polarity on line " + std::to_string(line_no));
        const std::string word = trim(std::string_view(line).substr(0, tab));
        const std::string value = trim(std::string_view(line).substr(tab + 1));
        if (!is_tokenized_word(word)) throw DataError("sentiment entry '" + word + "' is not a single lowercase token");
        double polarity = 0.0;
        std::istringstream parse(value);
        if (!(parse >> polarity) || !parse.eof()) throw DataError("bad polarity on line " + std::to_string(line_no));
        if (!lexicon.polarity.emplace(word, polarity).second) {
            throw DataError("duplicate sentiment entry '" + word + "' on line " + std::to_string(line_no));
        }
    }
    validate_lexicon(lexicon);
    return lexicon;
}

SentimentLexicon load_sentiment_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open sentiment lexicon '" + path + "'");
    return parse_sentiment_lexicon(in);
}

std::string to_string(const HeuristicVector& vector) {
    std::string out;
    for (std::size_t i = 0; i < HeuristicVector::kWidth; ++i) {
        if (i) out.push_back(' ');
        out.push_back(vector.bits[i] ? '1' : '0');
    }
    return out;
}

std::set<Phrase> match_phrases(std::span<const Token> tokens, const std::set<Phrase>& phrases) {
    std::set<Phrase> matched;
    auto same = [](const Token& token, const std::string& word) { return token.surface == word; };
    for (const auto& phrase : phrases) {
        if (phrase.empty() || phrase.size() > tokens.size()) continue;
        if (std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end(), same) != tokens.end()) {
            matched.insert(phrase);
        }
    }
    return matched;
}

double sentiment_score(std::span<const Token> tokens, const SentimentLexicon& lexicon) {
    double total = 0.0;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto it = lexicon.polarity.find(tokens[i].surface);
        if (it == lexicon.polarity.end()) continue;
        bool negated = false;
        for (std::size_t back = 1; back <= kNegationWindow && back <= i; ++back) {
            negated = negated || lexicon.negators.contains(tokens[i - back].surface);
        }
        total += negated ? -it->second : it->second;
        ++matches;
    }
    return matches == 0 ? 0.0 : total / static_cast<double>(matches);
}

HeuristicVector encode(std::string_view text, const HeuristicLexicon& heuristics, const SentimentLexicon& sentiment,
                       EncoderOptions options) {
    const auto tokens = tokenize(text);
    HeuristicVector vector;
    for (const auto& token : tokens) {
        if (heuristics.male_names.contains(token.surface)) vector.bits[HeuristicVector::male] = 1;
        if (heuristics.female_names.contains(token.surface)) vector.bits[HeuristicVector::female] = 1;
    }
    if (!match_phrases(tokens, heuristics.stereotype_phrases).empty()) vector.bits[HeuristicVector::stereotype] = 1;
    const double score = sentiment_score(tokens, sentiment);
    if (score < -options.threshold) vector.bits[HeuristicVector::negative] = 1;
    if (score > options.threshold) vector.bits[HeuristicVector::positive] = 1;
    return vector;
}

}  // namespace rhymecheck

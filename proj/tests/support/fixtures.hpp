#pragma once

// Synthetic data shared by the unit and acceptance suites.

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "rhymecheck/corpus.hpp"
#include "rhymecheck/features.hpp"
#include "rhymecheck/heuristics.hpp"
#include "rhymecheck/random.hpp"
#include "rhymecheck/textproc.hpp"

namespace fixtures {

using namespace rhymecheck;

inline std::string data_path(const std::string& name) {
    return (std::filesystem::path(RHYMECHECK_TEST_DATA_DIR) / name).string();
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("rhymecheck-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline Document make_doc(std::string id, const std::vector<std::pair<std::string, int>>& lines,
                         DocumentKind kind = DocumentKind::rhyme) {
    Document doc;
    doc.id = std::move(id);
    doc.kind = kind;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        doc.lines.push_back({i, lines[i].first, lines[i].second ? Label::stereotypical : Label::non_stereotypical});
    }
    return doc;
}

struct Dataset {
    std::vector<FeatureVector> X;
    std::vector<Label> y;
};

// Random sparse count data with both classes present.
inline Dataset random_dataset(SplitMix64& rng, std::size_t max_rows = 200, std::size_t max_width = 50) {
    Dataset d;
    const std::size_t n = 2 + rng.below(max_rows - 1);
    const std::size_t width = 1 + rng.below(max_width);
    const double density = 0.05 + 0.5 * rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector x;
        x.width = width;
        for (std::uint32_t f = 0; f < width; ++f) {
            if (rng.uniform() < density) x.entries.push_back({f, static_cast<double>(1 + rng.below(3))});
        }
        d.X.push_back(std::move(x));
        d.y.push_back(rng.uniform() < 0.4 ? Label::stereotypical : Label::non_stereotypical);
    }
    d.y[0] = Label::stereotypical;
    d.y[1] = Label::non_stereotypical;
    return d;
}

inline const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "river", "stone",  "lantern", "meadow", "window", "cloud",  "apple",  "candle", "garden", "hollow",
        "ladder", "orchard", "pebble", "ribbon", "saddle", "thimble", "valley", "wagon",  "willow", "button",
        "copper", "feather", "harbor", "kettle", "marble", "needle", "pepper", "puddle", "rocket", "velvet"};
    return words;
}

inline const std::vector<std::string>& planted_phrases() {
    static const std::vector<std::string> phrases = {"couldn't keep her", "takes a wife", "made them cry"};
    return phrases;
}

inline HeuristicLexicon planted_lexicon() {
    HeuristicLexicon lex;
    lex.male_names = {"he", "farmer"};
    lex.female_names = {"her", "wife"};
    for (const auto& p : planted_phrases()) lex.stereotype_phrases.insert(tokenize_words(p));
    return lex;
}

inline SentimentLexicon planted_sentiment() {
    SentimentLexicon lex;
    lex.polarity = {{"bright", 0.6}, {"gloomy", -0.6}};
    return lex;
}

// Positives are exactly the documents containing one of the planted stereotype phrases.
// Negatives carry the same words in scrambled order so no single token separates them.
inline std::vector<Document> planted_corpus(std::uint64_t seed, std::size_t per_class = 40) {
    SplitMix64 rng(seed);
    const auto& words = filler_words();
    auto filler = [&](std::size_t n) {
        std::string text;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) text += ' ';
            text += words[rng.below(words.size())];
        }
        if (rng.uniform() < 0.2) text += rng.uniform() < 0.5 ? " bright" : " gloomy";
        return text;
    };
    std::vector<Document> docs;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const bool positive = i % 2 == 0;
        std::vector<std::pair<std::string, int>> lines;
        for (int l = 0; l < 4; ++l) lines.push_back({filler(4), 0});
        const auto& phrase = planted_phrases()[rng.below(planted_phrases().size())];
        auto& target = lines[rng.below(lines.size())];
        if (positive) {
            target = {target.first + " " + phrase, 1};
        } else {
            auto tokens = tokenize_words(phrase);
            std::reverse(tokens.begin(), tokens.end());
            for (const auto& t : tokens) target.first += " " + t;
        }
        docs.push_back(make_doc("doc" + std::to_string(i), lines));
    }
    return docs;
}

}  // namespace fixtures

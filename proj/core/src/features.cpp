#include "rhymecheck/features.hpp"

#include "rhymecheck/errors.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace rhymecheck {

std::uint32_t Vocabulary::add(const std::string& term) {
    auto [it, inserted] = index_.try_emplace(term, static_cast<std::uint32_t>(terms_.size()));
    if (inserted) terms_.push_back(term);
    return it->second;
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Vocabulary fit_vocabulary(std::span<const Segment> train_segments) {
    if (train_segments.empty()) throw PreconditionError("cannot fit a vocabulary on an empty training set");
    Vocabulary vocab;
    for (const auto& seg : train_segments) {
        for (const auto& token : tokenize(seg.text)) vocab.add(token.surface);
    }
    return vocab;
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
    for (std::size_t i = 0; i < vocab.size(); ++i) out << vocab.terms()[i] << '\t' << i << '\n';
}

Vocabulary parse_vocabulary(std::istream& in) {
    Vocabulary vocab;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError("expected term<TAB>index on vocabulary line " + std::to_string(line_no));
        const std::string term = line.substr(0, tab);
        std::size_t index = 0;
        try {
            std::size_t used = 0;
            index = std::stoul(line.substr(tab + 1), &used);
            if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw DataError("bad index on vocabulary line " + std::to_string(line_no));
        }
        if (index != vocab.size() || vocab.find(term)) {
            throw DataError("vocabulary indices must be dense and unique (line " + std::to_string(line_no) + ")");
        }
        vocab.add(term);
    }
    return vocab;
}

void save_vocabulary(const std::string& path, const Vocabulary& vocab) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write vocabulary '" + path + "'");
    write_vocabulary(out, vocab);
}

Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary '" + path + "'");
    return parse_vocabulary(in);
}

FeatureVector make_feature_vector(std::vector<SparseEntry> entries, std::size_t width) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    FeatureVector x;
    x.width = width;
    for (const auto& entry : entries) {
        if (entry.index >= width) throw PreconditionError("feature index outside vector width");
        if (!x.entries.empty() && x.entries.back().index == entry.index) {
            x.entries.back().value += entry.value;
        } else {
            x.entries.push_back(entry);
        }
    }
    std::erase_if(x.entries, [](const SparseEntry& e) { return e.value == 0.0; });
    return x;
}

double value_at(const FeatureVector& x, std::uint32_t column) {
    auto it = std::lower_bound(x.entries.begin(), x.entries.end(), column,
                               [](const SparseEntry& e, std::uint32_t c) { return e.index < c; });
    return (it != x.entries.end() && it->index == column) ? it->value : 0.0;
}

FeatureVector vectorize(std::string_view text, const Vocabulary& vocab, const std::optional<HeuristicVector>& heuristic) {
    std::map<std::uint32_t, double> counts;
    for (const auto& token : tokenize(text)) {
        if (auto column = vocab.find(token.surface)) counts[*column] += 1.0;
    }
    FeatureVector x;
    x.width = feature_width(vocab, heuristic.has_value());
    for (const auto& [index, count] : counts) x.entries.push_back({index, count});
    if (heuristic) {
        for (std::size_t bit = 0; bit < HeuristicVector::kWidth; ++bit) {
            if ((*heuristic)[bit]) {
                x.entries.push_back({static_cast<std::uint32_t>(vocab.size() + bit), 1.0});
            }
        }
    }
    return x;
}

FeatureVector vectorize(const Segment& seg, const Vocabulary& vocab, const std::optional<HeuristicVector>& heuristic) {
    return vectorize(seg.text, vocab, heuristic);
}

}  // namespace rhymecheck

#pragma once

// Bag-of-words count features over a training vocabulary, with the optional five
// heuristic-encoder bits appended as trailing dense columns.

#include "rhymecheck/heuristics.hpp"
#include "rhymecheck/textproc.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace rhymecheck {

class Vocabulary {
public:
    Vocabulary() = default;

    // Appends `term` if unseen and returns its column.
    std::uint32_t add(const std::string& term);
    std::optional<std::uint32_t> find(const std::string& term) const;

    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.terms_ == b.terms_; }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

// One column per distinct token, in first-occurrence order. Throws PreconditionError on an
// empty segment list.
Vocabulary fit_vocabulary(std::span<const Segment> train_segments);

// term<TAB>index per line, indices dense and in order.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary parse_vocabulary(std::istream& in);
void save_vocabulary(const std::string& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::string& path);

struct SparseEntry {
    std::uint32_t index = 0;
    double value = 0.0;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

struct FeatureVector {
    std::vector<SparseEntry> entries;  // strictly increasing indices, nonzero values
    std::size_t width = 0;             // total column count including the heuristic tail

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Builds a vector from (index, value) pairs in any order, dropping zeros and summing
// duplicates. Throws PreconditionError if an index is outside `width`.
FeatureVector make_feature_vector(std::vector<SparseEntry> entries, std::size_t width);

double value_at(const FeatureVector& x, std::uint32_t column);

// Raw counts of in-vocabulary tokens; out-of-vocabulary tokens are dropped. When `heuristic`
// is given its bits occupy columns [|V|, |V|+5).
FeatureVector vectorize(const Segment& seg, const Vocabulary& vocab,
                        const std::optional<HeuristicVector>& heuristic = std::nullopt);
FeatureVector vectorize(std::string_view text, const Vocabulary& vocab,
                        const std::optional<HeuristicVector>& heuristic = std::nullopt);

inline std::size_t feature_width(const Vocabulary& vocab, bool with_heuristics) {
    return vocab.size() + (with_heuristics ? HeuristicVector::kWidth : 0);
}

}  // namespace rhymecheck

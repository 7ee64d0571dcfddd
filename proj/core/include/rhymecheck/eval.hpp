#pragma once

#include "rhymecheck/corpus.hpp"
#include "rhymecheck/textproc.hpp"

#include <cstddef>
#include <span>

namespace rhymecheck {

// Positive class = stereotypical.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Macro values are unweighted means over the two classes; 0/0 ratios count as 0.
struct Metrics {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    ClassScores positive;
    ClassScores negative;
};

// Throws PreconditionError on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred);

// Throws PreconditionError when the matrix is empty.
Metrics macro_metrics(const ConfusionMatrix& cm);

// A document is a rectification candidate iff any of its segments is predicted
// stereotypical. `segment_preds` must have one entry per segment of `scheme`.
bool aggregate_document(const Document& doc, Scheme scheme, std::span<const Label> segment_preds);

}  // namespace rhymecheck

#include "rhymecheck/eval.hpp"

#include "rhymecheck/errors.hpp"

#include <algorithm>

namespace rhymecheck {

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
    if (y_true.size() != y_pred.size()) throw PreconditionError("y_true and y_pred differ in length");
    if (y_true.empty()) throw PreconditionError("cannot build a confusion matrix from no samples");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool truth = is_positive(y_true[i]);
        const bool pred = is_positive(y_pred[i]);
        if (truth && pred) ++cm.tp;
        else if (!truth && pred) ++cm.fp;
        else if (truth) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassScores scores(std::size_t hit, std::size_t false_alarm, std::size_t miss) {
    ClassScores s;
    s.precision = ratio(hit, hit + false_alarm);
    s.recall = ratio(hit, hit + miss);
    const double sum = s.precision + s.recall;
    s.f1 = sum == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
    return s;
}

}  // namespace

Metrics macro_metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw PreconditionError("metrics of an empty confusion matrix");
    Metrics m;
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.positive = scores(cm.tp, cm.fp, cm.fn);
    m.negative = scores(cm.tn, cm.fn, cm.fp);
    m.macro_precision = (m.positive.precision + m.negative.precision) / 2.0;
    m.macro_recall = (m.positive.recall + m.negative.recall) / 2.0;
    m.macro_f1 = (m.positive.f1 + m.negative.f1) / 2.0;
    return m;
}

bool aggregate_document(const Document& doc, Scheme scheme, std::span<const Label> segment_preds) {
    const std::size_t expected = segment_count(doc.lines.size(), scheme);
    if (segment_preds.size() != expected) {
        throw PreconditionError("document '" + doc.id + "' has " + std::to_string(expected) + " " +
                                std::string(to_string(scheme)) + " segments but " +
                                std::to_string(segment_preds.size()) + " predictions were given");
    }
    return std::any_of(segment_preds.begin(), segment_preds.end(), is_positive);
}

}  // namespace rhymecheck

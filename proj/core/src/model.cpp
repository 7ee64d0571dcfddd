#include "rhymecheck/model.hpp"

#include "rhymecheck/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace rhymecheck {

void validate(const TrainConfig& config) {
    if (config.rounds < 1) throw PreconditionError("rounds must be >= 1");
    if (config.max_depth < 1) throw PreconditionError("max_depth must be >= 1");
    if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0)) {
        throw PreconditionError("learning_rate must lie in (0, 1]");
    }
    if (!(config.l2_lambda >= 0.0)) throw PreconditionError("l2_lambda must be >= 0");
    if (!(config.min_child_weight >= 0.0)) throw PreconditionError("min_child_weight must be >= 0");
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw DataError("tree without nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& node = nodes_[i];
        if (node.is_leaf()) continue;
        if (node.feature < 0) throw DataError("negative split feature");
        // Children always follow their parent, which rules out cycles.
        const auto n = static_cast<std::int32_t>(nodes_.size());
        const auto self = static_cast<std::int32_t>(i);
        if (node.left <= self || node.right <= self || node.left >= n || node.right >= n) {
            throw DataError("invalid child index in tree");
        }
    }
}

std::size_t RegressionTree::leaf_for(const FeatureVector& x) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& node = nodes_[i];
        const double v = value_at(x, static_cast<std::uint32_t>(node.feature));
        i = static_cast<std::size_t>(v < node.threshold ? node.left : node.right);
    }
    return i;
}

std::size_t RegressionTree::depth() const {
    std::vector<std::size_t> level(nodes_.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, level[i]);
        if (!nodes_[i].is_leaf()) {
            level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
            level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
        }
    }
    return deepest;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.is_leaf(); }));
}

double sigmoid(double margin) {
    if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
    const double e = std::exp(margin);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double target(Label y) { return is_positive(y) ? 1.0 : 0.0; }

void check_training_inputs(std::span<const FeatureVector> X, std::span<const Label> y) {
    if (X.size() != y.size()) throw PreconditionError("feature rows and labels differ in length");
    if (X.size() < 2) throw PreconditionError("training needs at least two examples");
    const std::size_t width = X.front().width;
    if (width == 0) throw PreconditionError("zero-width feature vectors");
    for (const auto& row : X) {
        if (row.width != width) throw PreconditionError("feature rows differ in width");
        for (std::size_t k = 0; k < row.entries.size(); ++k) {
            if (row.entries[k].index >= width || (k > 0 && row.entries[k - 1].index >= row.entries[k].index)) {
                throw PreconditionError("feature entries must be strictly increasing and inside the width");
            }
        }
    }
    const auto positives = std::count_if(y.begin(), y.end(), is_positive);
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(y.size())) {
        throw PreconditionError("training labels contain a single class");
    }
}

struct GradPair {
    double g = 0.0;
    double h = 0.0;

    GradPair& operator+=(const GradPair& o) {
        g += o.g;
        h += o.h;
        return *this;
    }
};

GradPair operator-(GradPair a, const GradPair& b) { return {a.g - b.g, a.h - b.h}; }

struct ColumnEntry {
    std::uint32_t row;
    double value;
};

struct SplitCandidate {
    double gain = 0.0;
    std::int32_t feature = TreeNode::kLeaf;
    double threshold = 0.0;
};

// Minimum loss reduction for a split to be taken; filters rounding noise.
constexpr double kMinSplitGain = 1e-10;

class TreeBuilder {
public:
    TreeBuilder(std::span<const FeatureVector> X, const std::vector<std::vector<ColumnEntry>>& columns,
                const TrainConfig& config)
        : X_(X), columns_(columns), config_(config) {}

    RegressionTree build(std::span<const GradPair> grad, std::vector<std::uint32_t>& leaf_of_row) {
        const std::size_t n = X_.size();
        nodes_.assign(1, TreeNode{});
        node_of_row_.assign(n, 0);
        std::vector<std::size_t> frontier{0};
        for (std::size_t depth = 0; depth < config_.max_depth && !frontier.empty(); ++depth) {
            const auto splits = find_splits(grad, frontier);
            std::vector<std::size_t> next;
            for (std::size_t k = 0; k < frontier.size(); ++k) {
                const auto& split = splits[k];
                if (split.feature == TreeNode::kLeaf) continue;
                auto& node = nodes_[frontier[k]];
                node.feature = split.feature;
                node.threshold = split.threshold;
                node.left = static_cast<std::int32_t>(nodes_.size());
                node.right = node.left + 1;
                nodes_.emplace_back();
                nodes_.emplace_back();
                next.push_back(static_cast<std::size_t>(nodes_[frontier[k]].left));
                next.push_back(static_cast<std::size_t>(nodes_[frontier[k]].right));
            }
            for (std::size_t row = 0; row < n; ++row) {
                const auto& node = nodes_[node_of_row_[row]];
                if (node.is_leaf()) continue;
                const double v = value_at(X_[row], static_cast<std::uint32_t>(node.feature));
                node_of_row_[row] = static_cast<std::uint32_t>(v < node.threshold ? node.left : node.right);
            }
            frontier = std::move(next);
        }

        std::vector<GradPair> sums(nodes_.size());
        for (std::size_t row = 0; row < n; ++row) sums[node_of_row_[row]] += grad[row];
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!nodes_[i].is_leaf()) continue;
            nodes_[i].value = -sums[i].g / (sums[i].h + config_.l2_lambda) * config_.learning_rate;
        }
        leaf_of_row = node_of_row_;
        return RegressionTree(std::move(nodes_));
    }

private:
    double score(const GradPair& s) const { return s.g * s.g / (s.h + config_.l2_lambda); }

    // Best split per frontier node; a kLeaf feature means "do not split".
    std::vector<SplitCandidate> find_splits(std::span<const GradPair> grad, const std::vector<std::size_t>& frontier) {
        const std::size_t width = frontier.size();
        std::vector<std::int32_t> slot(nodes_.size(), -1);
        for (std::size_t k = 0; k < width; ++k) slot[frontier[k]] = static_cast<std::int32_t>(k);

        std::vector<GradPair> total(width);
        std::vector<std::size_t> count(width, 0);
        for (std::size_t row = 0; row < node_of_row_.size(); ++row) {
            const auto s = slot[node_of_row_[row]];
            if (s < 0) continue;
            total[static_cast<std::size_t>(s)] += grad[row];
            ++count[static_cast<std::size_t>(s)];
        }

        std::vector<SplitCandidate> best(width);
        for (auto& b : best) b.gain = kMinSplitGain;

        struct ScanState {
            GradPair nonzero;
            std::size_t nonzero_count = 0;
            GradPair left;
            bool has_last = false;
            double last = 0.0;
            bool zero_done = false;
        };
        std::vector<ScanState> state(width);

        for (std::size_t feature = 0; feature < columns_.size(); ++feature) {
            const auto& column = columns_[feature];
            if (column.empty()) continue;
            std::fill(state.begin(), state.end(), ScanState{});
            for (const auto& entry : column) {
                const auto s = slot[node_of_row_[entry.row]];
                if (s < 0) continue;
                auto& st = state[static_cast<std::size_t>(s)];
                st.nonzero += grad[entry.row];
                ++st.nonzero_count;
            }

            auto consider = [&](std::size_t k, double next_value) {
                auto& st = state[k];
                if (!st.has_last || !(next_value > st.last)) return;
                const GradPair right = total[k] - st.left;
                if (st.left.h < config_.min_child_weight || right.h < config_.min_child_weight) return;
                const double gain = score(st.left) + score(right) - score(total[k]);
                if (gain > best[k].gain) {
                    best[k].gain = gain;
                    best[k].feature = static_cast<std::int32_t>(feature);
                    best[k].threshold = st.last + (next_value - st.last) / 2.0;
                }
            };
            // The implicit zeros of a node form one group placed at value 0.
            auto add_zero_group = [&](std::size_t k) {
                auto& st = state[k];
                st.zero_done = true;
                if (count[k] == st.nonzero_count) return;
                consider(k, 0.0);
                st.left += total[k] - st.nonzero;
                st.has_last = true;
                st.last = 0.0;
            };

            for (const auto& entry : column) {
                const auto s = slot[node_of_row_[entry.row]];
                if (s < 0) continue;
                const auto k = static_cast<std::size_t>(s);
                auto& st = state[k];
                if (!st.zero_done && entry.value > 0.0) add_zero_group(k);
                consider(k, entry.value);
                st.left += grad[entry.row];
                st.has_last = true;
                st.last = entry.value;
            }
            for (std::size_t k = 0; k < width; ++k) {
                if (!state[k].zero_done) add_zero_group(k);
            }
        }
        return best;
    }

    std::span<const FeatureVector> X_;
    const std::vector<std::vector<ColumnEntry>>& columns_;
    const TrainConfig& config_;
    std::vector<TreeNode> nodes_;
    std::vector<std::uint32_t> node_of_row_;
};

}  // namespace

double logistic_loss(double margin, Label y) {
    return is_positive(y) ? softplus(-margin) : softplus(margin);
}

double mean_logistic_loss(std::span<const double> margins, std::span<const Label> y) {
    double total = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) total += logistic_loss(margins[i], y[i]);
    return margins.empty() ? 0.0 : total / static_cast<double>(margins.size());
}

BoostedModel train_gbdt(std::span<const FeatureVector> X, std::span<const Label> y, const TrainConfig& config,
                        TrainingTrace* trace) {
    validate(config);
    check_training_inputs(X, y);

    const std::size_t n = X.size();
    const std::size_t width = X.front().width;
    std::vector<std::vector<ColumnEntry>> columns(width);
    for (std::size_t row = 0; row < n; ++row) {
        for (const auto& e : X[row].entries) {
            if (e.value != 0.0) columns[e.index].push_back({static_cast<std::uint32_t>(row), e.value});
        }
    }
    for (auto& column : columns) {
        std::stable_sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    }

    BoostedModel model;
    model.config = config;
    model.feature_width = width;
    model.base_score = 0.0;

    std::vector<double> margins(n, model.base_score);
    double loss = mean_logistic_loss(margins, y);
    if (trace) {
        trace->loss.assign(1, loss);
        trace->halted = false;
    }

    TreeBuilder builder(X, columns, config);
    std::vector<GradPair> grad(n);
    std::vector<std::uint32_t> leaf_of_row;
    std::vector<double> candidate(n);
    for (std::size_t round = 0; round < config.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margins[i]);
            grad[i] = {p - target(y[i]), p * (1.0 - p)};
        }
        RegressionTree tree = builder.build(grad, leaf_of_row);
        for (std::size_t i = 0; i < n; ++i) candidate[i] = margins[i] + tree.nodes()[leaf_of_row[i]].value;
        const double next_loss = mean_logistic_loss(candidate, y);
        if (next_loss > loss) {
            if (trace) trace->halted = true;
            break;
        }
        margins.swap(candidate);
        loss = next_loss;
        model.trees.push_back(std::move(tree));
        if (trace) trace->loss.push_back(loss);
    }
    return model;
}

double predict_margin(const BoostedModel& model, const FeatureVector& x) {
    if (x.width != model.feature_width) {
        throw PreconditionError("feature width " + std::to_string(x.width) + " does not match model width " +
                                std::to_string(model.feature_width));
    }
    double margin = model.base_score;
    for (const auto& tree : model.trees) margin += tree.evaluate(x);
    return margin;
}

namespace {

double open_unit(double p) {
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    return std::clamp(p, lo, hi);
}

}  // namespace

double predict(const BoostedModel& model, const FeatureVector& x) { return open_unit(sigmoid(predict_margin(model, x))); }

Label classify(const BoostedModel& model, const FeatureVector& x) { return label_from_bool(predict(model, x) > 0.5); }

namespace {

constexpr const char* kModelMagic = "rhymecheck-gbdt";
constexpr const char* kLogisticMagic = "rhymecheck-logreg";
constexpr int kModelVersion = 1;

std::string hex(double v) {
    std::ostringstream out;
    out << std::hexfloat << v;
    return out.str();
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw DataError("truncated model file");
        return w;
    }

    void expect(const std::string& keyword) {
        const auto w = word();
        if (w != keyword) throw DataError("corrupt model file: expected '" + keyword + "', found '" + w + "'");
    }

    double real() {
        const auto w = word();
        char* end = nullptr;
        const double v = std::strtod(w.c_str(), &end);
        if (end != w.c_str() + w.size()) throw DataError("corrupt model file: bad number '" + w + "'");
        return v;
    }

    std::uint64_t integer() {
        const auto w = word();
        char* end = nullptr;
        const auto v = std::strtoull(w.c_str(), &end, 10);
        if (w.empty() || w.front() == '-' || end != w.c_str() + w.size()) {
            throw DataError("corrupt model file: bad integer '" + w + "'");
        }
        return v;
    }

    std::int64_t signed_integer() {
        const auto w = word();
        char* end = nullptr;
        const auto v = std::strtoll(w.c_str(), &end, 10);
        if (w.empty() || end != w.c_str() + w.size()) throw DataError("corrupt model file: bad integer '" + w + "'");
        return v;
    }

    std::istream& stream() { return in_; }

private:
    std::istream& in_;
};

void check_header(Reader& reader, const char* magic) {
    const auto found = reader.word();
    if (found != magic) throw DataError("not a " + std::string(magic) + " model file");
    const auto version = reader.integer();
    if (version != kModelVersion) {
        throw DataError("unsupported model version " + std::to_string(version) + " (expected " +
                        std::to_string(kModelVersion) + ")");
    }
}

}  // namespace

void write_model(std::ostream& out, const BoostedModel& model) {
    const auto& c = model.config;
    out << kModelMagic << ' ' << kModelVersion << '\n';
    out << "config rounds " << c.rounds << " max_depth " << c.max_depth << " learning_rate " << hex(c.learning_rate)
        << " l2_lambda " << hex(c.l2_lambda) << " min_child_weight " << hex(c.min_child_weight) << " seed " << c.seed
        << '\n';
    out << "feature_width " << model.feature_width << '\n';
    out << "base_score " << hex(model.base_score) << '\n';
    out << "trees " << model.trees.size() << '\n';
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const auto& nodes = model.trees[t].nodes();
        out << "tree " << t << " nodes " << nodes.size() << '\n';
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& node = nodes[i];
            if (node.is_leaf()) {
                out << "  leaf " << hex(node.value) << '\n';
            } else {
                out << "  split " << node.feature << ' ' << hex(node.threshold) << ' ' << node.left << ' ' << node.right
                    << '\n';
            }
        }
    }
    out << "end\n";
}

BoostedModel read_model(std::istream& in) {
    Reader reader(in);
    check_header(reader, kModelMagic);
    BoostedModel model;
    auto& c = model.config;
    reader.expect("config");
    reader.expect("rounds");
    c.rounds = reader.integer();
    reader.expect("max_depth");
    c.max_depth = reader.integer();
    reader.expect("learning_rate");
    c.learning_rate = reader.real();
    reader.expect("l2_lambda");
    c.l2_lambda = reader.real();
    reader.expect("min_child_weight");
    c.min_child_weight = reader.real();
    reader.expect("seed");
    c.seed = reader.integer();
    try {
        validate(c);
    } catch (const PreconditionError& e) {
        throw DataError(std::string("corrupt model file: ") + e.what());
    }
    reader.expect("feature_width");
    model.feature_width = reader.integer();
    reader.expect("base_score");
    model.base_score = reader.real();
    reader.expect("trees");
    const auto tree_count = reader.integer();
    if (tree_count > c.rounds) throw DataError("corrupt model file: more trees than rounds");
    for (std::uint64_t t = 0; t < tree_count; ++t) {
        reader.expect("tree");
        if (reader.integer() != t) throw DataError("corrupt model file: trees out of order");
        reader.expect("nodes");
        const auto node_count = reader.integer();
        if (node_count == 0 || node_count > (std::uint64_t{1} << (c.max_depth + 1))) {
            throw DataError("corrupt model file: bad node count");
        }
        std::vector<TreeNode> nodes(node_count);
        for (auto& node : nodes) {
            const auto kind = reader.word();
            if (kind == "leaf") {
                node.value = reader.real();
            } else if (kind == "split") {
                const auto feature = reader.signed_integer();
                if (feature < 0 || static_cast<std::uint64_t>(feature) >= model.feature_width) {
                    throw DataError("corrupt model file: split feature outside width");
                }
                node.feature = static_cast<std::int32_t>(feature);
                node.threshold = reader.real();
                node.left = static_cast<std::int32_t>(reader.signed_integer());
                node.right = static_cast<std::int32_t>(reader.signed_integer());
            } else {
                throw DataError("corrupt model file: unknown node kind '" + kind + "'");
            }
        }
        RegressionTree tree(std::move(nodes));
        if (tree.depth() > c.max_depth) throw DataError("corrupt model file: tree deeper than max_depth");
        model.trees.push_back(std::move(tree));
    }
    reader.expect("end");
    return model;
}

void save_model(const std::string& path, const BoostedModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file '" + path + "'");
    write_model(out, model);
}

BoostedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    return read_model(in);
}

LogisticModel train_logreg(std::span<const FeatureVector> X, std::span<const Label> y, double l2,
                           std::size_t iterations, LogisticTrace* trace) {
    check_training_inputs(X, y);
    if (!(l2 >= 0.0)) throw PreconditionError("l2 must be >= 0");
    const std::size_t n = X.size();
    const std::size_t width = X.front().width;

    LogisticModel model;
    model.feature_width = width;
    model.weights.assign(width, 0.0);

    double max_norm = 0.0;
    for (const auto& row : X) {
        double norm = 1.0;  // bias column
        for (const auto& e : row.entries) norm += e.value * e.value;
        max_norm = std::max(max_norm, norm);
    }
    const double step = 1.0 / (0.25 * max_norm + l2);

    auto margin_of = [&](const FeatureVector& row) {
        double m = model.bias;
        for (const auto& e : row.entries) m += model.weights[e.index] * e.value;
        return m;
    };
    auto objective = [&] {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) loss += logistic_loss(margin_of(X[i]), y[i]);
        double norm = 0.0;
        for (double w : model.weights) norm += w * w;
        return loss / static_cast<double>(n) + 0.5 * l2 * norm;
    };

    if (trace) {
        trace->loss.assign(1, objective());
        trace->step_size = step;
    }
    std::vector<double> grad(width);
    for (std::size_t it = 0; it < iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = sigmoid(margin_of(X[i])) - target(y[i]);
            grad_bias += r;
            for (const auto& e : X[i].entries) grad[e.index] += r * e.value;
        }
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < width; ++j) model.weights[j] -= step * (grad[j] * scale + l2 * model.weights[j]);
        model.bias -= step * grad_bias * scale;
        if (trace) trace->loss.push_back(objective());
    }
    return model;
}

double predict(const LogisticModel& model, const FeatureVector& x) {
    if (x.width != model.feature_width) throw PreconditionError("feature width does not match model width");
    double m = model.bias;
    for (const auto& e : x.entries) m += model.weights[e.index] * e.value;
    return open_unit(sigmoid(m));
}

Label classify(const LogisticModel& model, const FeatureVector& x) { return label_from_bool(predict(model, x) > 0.5); }

void write_model(std::ostream& out, const LogisticModel& model) {
    out << kLogisticMagic << ' ' << kModelVersion << '\n';
    out << "feature_width " << model.feature_width << '\n';
    out << "bias " << hex(model.bias) << '\n';
    for (double w : model.weights) out << hex(w) << '\n';
    out << "end\n";
}

LogisticModel read_logistic_model(std::istream& in) {
    Reader reader(in);
    check_header(reader, kLogisticMagic);
    LogisticModel model;
    reader.expect("feature_width");
    model.feature_width = reader.integer();
    reader.expect("bias");
    model.bias = reader.real();
    model.weights.resize(model.feature_width);
    for (auto& w : model.weights) w = reader.real();
    reader.expect("end");
    return model;
}

}  // namespace rhymecheck

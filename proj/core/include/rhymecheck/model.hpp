#pragma once

// Gradient-boosted regression trees with a logistic link, trained by exact greedy split
// search on first/second-order logistic-loss statistics. A plain L2-regularised logistic
// regression is provided as a cross-check baseline.

#include "rhymecheck/corpus.hpp"
#include "rhymecheck/features.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rhymecheck {

struct TrainConfig {
    std::size_t rounds = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.3;
    double l2_lambda = 1.0;
    double min_child_weight = 1.0;
    std::uint64_t seed = kDefaultSeed;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Throws PreconditionError if any field is out of range.
void validate(const TrainConfig& config);

struct TreeNode {
    static constexpr std::int32_t kLeaf = -1;

    std::int32_t feature = kLeaf;  // kLeaf marks a leaf
    double threshold = 0.0;        // rows with value < threshold go left
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;            // leaf output (already scaled by the learning rate)

    bool is_leaf() const { return feature == kLeaf; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes);

    const std::vector<TreeNode>& nodes() const { return nodes_; }

    // Index of the leaf that `x` falls into.
    std::size_t leaf_for(const FeatureVector& x) const;
    double evaluate(const FeatureVector& x) const { return nodes_[leaf_for(x)].value; }

    // Number of split levels on the longest root-to-leaf path (0 for a single leaf).
    std::size_t depth() const;
    std::size_t leaf_count() const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

private:
    std::vector<TreeNode> nodes_{TreeNode{}};
};

struct BoostedModel {
    std::vector<RegressionTree> trees;
    double base_score = 0.0;  // initial margin (log-odds)
    TrainConfig config;
    std::size_t feature_width = 0;

    friend bool operator==(const BoostedModel&, const BoostedModel&) = default;
};

struct TrainingTrace {
    // loss[0] is the mean logistic loss of the base score; loss[r] follows round r.
    std::vector<double> loss;
    // True when a round would have raised the training loss; that tree was discarded and
    // training ended early.
    bool halted = false;
};

// Requires |X| = |y| >= 2, both classes present and a nonzero common feature width.
BoostedModel train_gbdt(std::span<const FeatureVector> X, std::span<const Label> y, const TrainConfig& config,
                        TrainingTrace* trace = nullptr);

double predict_margin(const BoostedModel& model, const FeatureVector& x);
// Probability of the stereotypical class, strictly inside (0, 1).
double predict(const BoostedModel& model, const FeatureVector& x);
Label classify(const BoostedModel& model, const FeatureVector& x);

double sigmoid(double margin);
// Numerically stable logistic loss of one example at the given margin.
double logistic_loss(double margin, Label y);
double mean_logistic_loss(std::span<const double> margins, std::span<const Label> y);

// Versioned text dump; floating point values use hex notation so the round trip is exact.
void write_model(std::ostream& out, const BoostedModel& model);
BoostedModel read_model(std::istream& in);
void save_model(const std::string& path, const BoostedModel& model);
BoostedModel load_model(const std::string& path);

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::size_t feature_width = 0;

    friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

struct LogisticTrace {
    std::vector<double> loss;  // regularised objective before each step and after the last
    double step_size = 0.0;
};

// Full-batch gradient descent on mean logistic loss + l2/2 * |w|^2 with step 1/L, where L
// bounds the gradient's Lipschitz constant, so the objective never increases.
LogisticModel train_logreg(std::span<const FeatureVector> X, std::span<const Label> y, double l2,
                           std::size_t iterations, LogisticTrace* trace = nullptr);

double predict(const LogisticModel& model, const FeatureVector& x);
Label classify(const LogisticModel& model, const FeatureVector& x);

void write_model(std::ostream& out, const LogisticModel& model);
LogisticModel read_logistic_model(std::istream& in);

}  // namespace rhymecheck

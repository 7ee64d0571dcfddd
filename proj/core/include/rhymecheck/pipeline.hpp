#pragma once

// End-to-end experiment runs: split, segment, train-only lexicon and vocabulary, featurise,
// train, predict on the held-out partition, score at segment and document level.

#include "rhymecheck/corpus.hpp"
#include "rhymecheck/eval.hpp"
#include "rhymecheck/features.hpp"
#include "rhymecheck/heuristics.hpp"
#include "rhymecheck/model.hpp"
#include "rhymecheck/textproc.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rhymecheck {

enum class ModelKind { gbdt, logreg };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

struct ExperimentSpec {
    std::string name;
    Scheme scheme = Scheme::FULL;
    bool use_heuristic_encoder = false;
    ModelKind model = ModelKind::gbdt;
    SplitRatios ratios;
    std::uint64_t seed = kDefaultSeed;
    std::string heuristic_lexicon_path;
    std::string sentiment_lexicon_path;
    TrainConfig gbdt;
    double logreg_l2 = 1e-4;
    std::size_t logreg_iterations = 300;
    double sentiment_threshold = kDefaultSentimentThreshold;
};

// "<scheme>/<model>[+HE]" unless the spec is named.
std::string display_name(const ExperimentSpec& spec);

// key = value lines; '#' comments. Relative lexicon paths resolve against `base_dir`.
ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& base_dir = ".");
ExperimentSpec load_experiment_spec(const std::string& path);
void write_experiment_spec(std::ostream& out, const ExperimentSpec& spec);

// The four segmentation schemes, each with and without the heuristic encoder.
std::vector<ExperimentSpec> scheme_grid(const ExperimentSpec& base);

// Seeds derived from the master seed. Split: mix_seed(seed, 1); model: mix_seed(seed, 2).
std::uint64_t split_seed(std::uint64_t master);
std::uint64_t model_seed(std::uint64_t master);

// Train/test view over a split. Test documents become readable only after
// seal_training(); earlier access throws LeakageError. Every access is logged.
class PartitionedCorpus {
public:
    PartitionedCorpus(const std::vector<Document>& docs, const CorpusSplit& split);

    // Annotated documents of the training partition, generated ones included.
    const std::vector<const Document*>& train();
    void seal_training();
    bool sealed() const { return sealed_; }
    // Annotated original documents of the test partition.
    const std::vector<const Document*>& test();

    const std::vector<std::string>& access_log() const { return log_; }

private:
    std::vector<const Document*> train_;
    std::vector<const Document*> test_;
    bool sealed_ = false;
    std::vector<std::string> log_;
};

struct ExperimentResources {
    HeuristicLexicon heuristics;
    SentimentLexicon sentiment;
};

// Loads the lexicons named by the spec (both required when the encoder is enabled).
ExperimentResources load_resources(const ExperimentSpec& spec);

// Everything fitted on the training partition: vocabulary, train-restricted lexicon and
// the classifier.
struct TrainedPipeline {
    ExperimentSpec spec;
    Vocabulary vocabulary;
    HeuristicLexicon lexicon;
    SentimentLexicon sentiment;
    BoostedModel gbdt;
    LogisticModel logreg;
    std::size_t train_documents = 0;
    std::size_t train_segments = 0;
    double train_seconds = 0.0;

    FeatureVector featurize(const Segment& seg) const;
    double probability(const Segment& seg) const;
};

// Fits on partitions.train() only.
TrainedPipeline fit_pipeline(const ExperimentSpec& spec, PartitionedCorpus& partitions,
                             const ExperimentResources& resources);

// Writes spec.txt, vocabulary.tsv, lexicon.txt, sentiment.tsv and model.txt into `dir`.
void save_pipeline(const std::string& dir, const TrainedPipeline& pipeline);
TrainedPipeline load_pipeline(const std::string& dir);

struct SegmentPrediction {
    std::string doc_id;
    LineSpan span;
    Label truth = Label::non_stereotypical;
    Label predicted = Label::non_stereotypical;
    double probability = 0.0;
};

struct DocumentPrediction {
    std::string doc_id;
    Label truth = Label::non_stereotypical;
    bool candidate = false;  // any segment predicted stereotypical
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::size_t train_documents = 0;
    std::size_t test_documents = 0;
    std::size_t train_segments = 0;
    std::size_t vocabulary_size = 0;
    std::size_t lexicon_entries = 0;  // train-restricted heuristic lexicon size
    std::size_t trees = 0;
    ConfusionMatrix segment_confusion;
    Metrics segment_metrics;
    ConfusionMatrix document_confusion;
    Metrics document_metrics;
    std::vector<SegmentPrediction> segment_predictions;
    std::vector<DocumentPrediction> document_predictions;
    std::vector<std::string> candidates;
    std::vector<std::string> partition_access;
    double train_seconds = 0.0;
    double total_seconds = 0.0;
};

// Seals training on `partitions` and scores the test partition.
ExperimentReport evaluate_pipeline(const TrainedPipeline& pipeline, PartitionedCorpus& partitions);

// The split a spec induces on a corpus (seeded with split_seed(spec.seed)).
CorpusSplit experiment_split(const ExperimentSpec& spec, const std::vector<Document>& corpus);

ExperimentReport run_experiment(const ExperimentSpec& spec, const std::vector<Document>& corpus,
                                const ExperimentResources& resources);
ExperimentReport run_experiment(const ExperimentSpec& spec, const std::vector<Document>& corpus);

struct RecomputedMetrics {
    ConfusionMatrix segment;
    ConfusionMatrix document;
};

// Rebuilds both confusion matrices from the stored predictions alone.
RecomputedMetrics recompute_metrics(const ExperimentReport& report);

struct GridEntry {
    ExperimentSpec spec;
    std::optional<ExperimentReport> report;
    std::string error;
};

// Runs every spec; a failing spec is reported in its entry and the grid continues.
// Entries keep the order of `specs` regardless of `parallelism`.
std::vector<GridEntry> run_grid(std::span<const ExperimentSpec> specs, const std::vector<Document>& corpus,
                                std::size_t parallelism = 1);

inline constexpr const char* kMetricColumns[] = {"Accuracy", "Precision", "Recall", "F1-Score"};

// Human-readable summary.
void write_report_table(std::ostream& out, const ExperimentReport& report);
// JSON lines: one "experiment" record, then "segment" and "document" prediction records.
// Timing is omitted unless requested so that reruns are byte-identical.
void write_report_records(std::ostream& out, const ExperimentReport& report, bool include_timing = false);

void write_grid_table(std::ostream& out, std::span<const GridEntry> entries);
void write_grid_records(std::ostream& out, std::span<const GridEntry> entries);

}  // namespace rhymecheck

#include "rhymecheck/pipeline.hpp"

#include "rhymecheck/errors.hpp"
#include "rhymecheck/features.hpp"
#include "rhymecheck/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace rhymecheck {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::gbdt ? "gbdt" : "logreg"; }

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    if (text == "gbdt") return ModelKind::gbdt;
    if (text == "logreg") return ModelKind::logreg;
    return std::nullopt;
}

std::string display_name(const ExperimentSpec& spec) {
    if (!spec.name.empty()) return spec.name;
    std::string name = std::string(to_string(spec.scheme)) + "/" + std::string(to_string(spec.model));
    if (spec.use_heuristic_encoder) name += "+HE";
    return name;
}

namespace {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T parsed{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, parsed);
    if (value.empty() || ec != std::errc{} || ptr != end) throw DataError("bad value '" + value + "' for " + key);
    return parsed;
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "off" || value == "0" || value == "no") return false;
    throw DataError("bad boolean '" + value + "' for " + key);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& base_dir) {
    ExperimentSpec spec;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("expected key = value on spec line " + std::to_string(line_no));
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key == "name") {
            spec.name = value;
        } else if (key == "scheme") {
            const auto scheme = parse_scheme(value);
            if (!scheme) throw DataError("unknown scheme '" + value + "'");
            spec.scheme = *scheme;
        } else if (key == "heuristic_encoder") {
            spec.use_heuristic_encoder = parse_flag(key, value);
        } else if (key == "model") {
            const auto model = parse_model_kind(value);
            if (!model) throw DataError("unknown model '" + value + "'");
            spec.model = *model;
        } else if (key == "ratios") {
            std::array<double, 3> r{};
            std::istringstream parts(value);
            std::string part;
            std::size_t k = 0;
            while (std::getline(parts, part, ',')) {
                if (k == 3) throw DataError("ratios needs three comma-separated values");
                r[k++] = parse_number<double>(key, trim(part));
            }
            if (k != 3) throw DataError("ratios needs three comma-separated values");
            spec.ratios = {r[0], r[1], r[2]};
        } else if (key == "seed") {
            spec.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "heuristic_lexicon") {
            spec.heuristic_lexicon_path = resolve(base_dir, value);
        } else if (key == "sentiment_lexicon") {
            spec.sentiment_lexicon_path = resolve(base_dir, value);
        } else if (key == "rounds") {
            spec.gbdt.rounds = parse_number<std::size_t>(key, value);
        } else if (key == "max_depth") {
            spec.gbdt.max_depth = parse_number<std::size_t>(key, value);
        } else if (key == "learning_rate") {
            spec.gbdt.learning_rate = parse_number<double>(key, value);
        } else if (key == "l2_lambda") {
            spec.gbdt.l2_lambda = parse_number<double>(key, value);
        } else if (key == "min_child_weight") {
            spec.gbdt.min_child_weight = parse_number<double>(key, value);
        } else if (key == "logreg_l2") {
            spec.logreg_l2 = parse_number<double>(key, value);
        } else if (key == "logreg_iterations") {
            spec.logreg_iterations = parse_number<std::size_t>(key, value);
        } else if (key == "sentiment_threshold") {
            spec.sentiment_threshold = parse_number<double>(key, value);
        } else {
            throw DataError("unknown spec key '" + key + "' on line " + std::to_string(line_no));
        }
    }
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open experiment spec '" + path + "'");
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_experiment_spec(in, dir.empty() ? "." : dir);
}

void write_experiment_spec(std::ostream& out, const ExperimentSpec& spec) {
    if (!spec.name.empty()) out << "name = " << spec.name << '\n';
    out << "scheme = " << to_string(spec.scheme) << '\n';
    out << "heuristic_encoder = " << (spec.use_heuristic_encoder ? "true" : "false") << '\n';
    out << "model = " << to_string(spec.model) << '\n';
    out << "ratios = " << spec.ratios.train << ',' << spec.ratios.validation << ',' << spec.ratios.test << '\n';
    out << "seed = " << spec.seed << '\n';
    if (!spec.heuristic_lexicon_path.empty()) out << "heuristic_lexicon = " << spec.heuristic_lexicon_path << '\n';
    if (!spec.sentiment_lexicon_path.empty()) out << "sentiment_lexicon = " << spec.sentiment_lexicon_path << '\n';
    out << "rounds = " << spec.gbdt.rounds << '\n';
    out << "max_depth = " << spec.gbdt.max_depth << '\n';
    out << "learning_rate = " << spec.gbdt.learning_rate << '\n';
    out << "l2_lambda = " << spec.gbdt.l2_lambda << '\n';
    out << "min_child_weight = " << spec.gbdt.min_child_weight << '\n';
    out << "logreg_l2 = " << spec.logreg_l2 << '\n';
    out << "logreg_iterations = " << spec.logreg_iterations << '\n';
    out << "sentiment_threshold = " << spec.sentiment_threshold << '\n';
}

std::vector<ExperimentSpec> scheme_grid(const ExperimentSpec& base) {
    std::vector<ExperimentSpec> specs;
    for (Scheme scheme : {Scheme::L1, Scheme::L2, Scheme::L3, Scheme::FULL}) {
        for (bool he : {false, true}) {
            ExperimentSpec spec = base;
            spec.name.clear();
            spec.scheme = scheme;
            spec.use_heuristic_encoder = he;
            specs.push_back(std::move(spec));
        }
    }
    return specs;
}

std::uint64_t split_seed(std::uint64_t master) { return mix_seed(master, 1); }
std::uint64_t model_seed(std::uint64_t master) { return mix_seed(master, 2); }

PartitionedCorpus::PartitionedCorpus(const std::vector<Document>& docs, const CorpusSplit& split) {
    std::unordered_map<std::string_view, const Document*> by_id;
    for (const auto& doc : docs) by_id.emplace(doc.id, &doc);
    for (const auto& id : split.train) {
        const Document* doc = by_id.at(id);
        if (!doc->needs_annotation) train_.push_back(doc);
    }
    // Generated children of test documents are neither trained on nor scored.
    for (const auto& id : split.test) {
        const Document* doc = by_id.at(id);
        if (!doc->needs_annotation && doc->provenance == Provenance::original) test_.push_back(doc);
    }
}

const std::vector<const Document*>& PartitionedCorpus::train() {
    if (sealed_) throw LeakageError("training partition accessed after training was sealed");
    if (log_.empty() || log_.back() != "train") log_.push_back("train");
    return train_;
}

void PartitionedCorpus::seal_training() {
    sealed_ = true;
    log_.push_back("seal");
}

const std::vector<const Document*>& PartitionedCorpus::test() {
    if (!sealed_) throw LeakageError("test partition accessed before training was sealed");
    if (log_.back() != "test") log_.push_back("test");
    return test_;
}

ExperimentResources load_resources(const ExperimentSpec& spec) {
    ExperimentResources resources;
    if (spec.use_heuristic_encoder) {
        if (spec.heuristic_lexicon_path.empty() || spec.sentiment_lexicon_path.empty()) {
            throw PreconditionError("the heuristic encoder needs heuristic_lexicon and sentiment_lexicon paths");
        }
    }
    if (!spec.heuristic_lexicon_path.empty()) {
        resources.heuristics = load_heuristic_lexicon(spec.heuristic_lexicon_path);
    }
    if (!spec.sentiment_lexicon_path.empty()) {
        resources.sentiment = load_sentiment_lexicon(spec.sentiment_lexicon_path);
    }
    return resources;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

FeatureVector TrainedPipeline::featurize(const Segment& seg) const {
    if (!spec.use_heuristic_encoder) return vectorize(seg, vocabulary);
    return vectorize(seg, vocabulary, encode(seg.text, lexicon, sentiment, EncoderOptions{spec.sentiment_threshold}));
}

double TrainedPipeline::probability(const Segment& seg) const {
    const auto x = featurize(seg);
    return spec.model == ModelKind::gbdt ? predict(gbdt, x) : predict(logreg, x);
}

TrainedPipeline fit_pipeline(const ExperimentSpec& spec, PartitionedCorpus& partitions,
                             const ExperimentResources& resources) {
    validate(spec.gbdt);
    TrainedPipeline pipeline;
    pipeline.spec = spec;
    pipeline.sentiment = resources.sentiment;

    const auto& train_docs = partitions.train();
    std::vector<Segment> train_segments;
    std::vector<std::string> train_lines;
    for (const Document* doc : train_docs) {
        for (auto& seg : segment(*doc, spec.scheme)) train_segments.push_back(std::move(seg));
        for (const auto& line : doc->lines) train_lines.push_back(line.text);
    }
    pipeline.lexicon = restrict_to_partition(resources.heuristics, train_lines);
    pipeline.vocabulary = fit_vocabulary(train_segments);
    pipeline.train_documents = train_docs.size();
    pipeline.train_segments = train_segments.size();

    std::vector<FeatureVector> X;
    std::vector<Label> y;
    X.reserve(train_segments.size());
    for (const auto& seg : train_segments) {
        X.push_back(pipeline.featurize(seg));
        y.push_back(seg.label);
    }

    const auto started = std::chrono::steady_clock::now();
    if (spec.model == ModelKind::gbdt) {
        TrainConfig config = spec.gbdt;
        config.seed = model_seed(spec.seed);
        pipeline.gbdt = train_gbdt(X, y, config);
    } else {
        pipeline.logreg = train_logreg(X, y, spec.logreg_l2, spec.logreg_iterations);
    }
    pipeline.train_seconds = seconds_since(started);
    return pipeline;
}

namespace {

std::filesystem::path bundle_file(const std::string& dir, const char* name) { return std::filesystem::path(dir) / name; }

template <typename Write>
void write_file(const std::filesystem::path& path, Write write) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write(out);
}

std::ifstream open_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

void save_pipeline(const std::string& dir, const TrainedPipeline& pipeline) {
    std::filesystem::create_directories(dir);
    write_file(bundle_file(dir, "spec.txt"), [&](std::ostream& out) { write_experiment_spec(out, pipeline.spec); });
    write_file(bundle_file(dir, "vocabulary.tsv"),
               [&](std::ostream& out) { write_vocabulary(out, pipeline.vocabulary); });
    write_file(bundle_file(dir, "lexicon.txt"),
               [&](std::ostream& out) { write_heuristic_lexicon(out, pipeline.lexicon); });
    write_file(bundle_file(dir, "sentiment.tsv"), [&](std::ostream& out) {
        std::vector<std::pair<std::string, double>> entries(pipeline.sentiment.polarity.begin(),
                                                            pipeline.sentiment.polarity.end());
        std::sort(entries.begin(), entries.end());
        out << std::setprecision(17);
        for (const auto& [word, polarity] : entries) out << word << '\t' << polarity << '\n';
    });
    write_file(bundle_file(dir, "model.txt"), [&](std::ostream& out) {
        if (pipeline.spec.model == ModelKind::gbdt) {
            write_model(out, pipeline.gbdt);
        } else {
            write_model(out, pipeline.logreg);
        }
    });
}

TrainedPipeline load_pipeline(const std::string& dir) {
    TrainedPipeline pipeline;
    {
        auto in = open_file(bundle_file(dir, "spec.txt"));
        pipeline.spec = parse_experiment_spec(in, dir);
    }
    {
        auto in = open_file(bundle_file(dir, "vocabulary.tsv"));
        pipeline.vocabulary = parse_vocabulary(in);
    }
    {
        auto in = open_file(bundle_file(dir, "lexicon.txt"));
        pipeline.lexicon = parse_heuristic_lexicon(in);
        pipeline.lexicon.scope = LexiconScope::train_only;
    }
    {
        auto in = open_file(bundle_file(dir, "sentiment.tsv"));
        pipeline.sentiment = parse_sentiment_lexicon(in);
    }
    {
        auto in = open_file(bundle_file(dir, "model.txt"));
        if (pipeline.spec.model == ModelKind::gbdt) {
            pipeline.gbdt = read_model(in);
        } else {
            pipeline.logreg = read_logistic_model(in);
        }
    }
    const std::size_t width = feature_width(pipeline.vocabulary, pipeline.spec.use_heuristic_encoder);
    const std::size_t model_width =
        pipeline.spec.model == ModelKind::gbdt ? pipeline.gbdt.feature_width : pipeline.logreg.feature_width;
    if (width != model_width) throw DataError("model width does not match the bundled vocabulary");
    return pipeline;
}

ExperimentReport evaluate_pipeline(const TrainedPipeline& pipeline, PartitionedCorpus& partitions) {
    const auto& spec = pipeline.spec;
    ExperimentReport report;
    report.spec = spec;
    report.train_documents = pipeline.train_documents;
    report.train_segments = pipeline.train_segments;
    report.vocabulary_size = pipeline.vocabulary.size();
    report.lexicon_entries = pipeline.lexicon.male_names.size() + pipeline.lexicon.female_names.size() +
                             pipeline.lexicon.stereotype_phrases.size();
    report.trees = spec.model == ModelKind::gbdt ? pipeline.gbdt.trees.size() : 0;
    report.train_seconds = pipeline.train_seconds;

    partitions.seal_training();
    const auto& test_docs = partitions.test();
    report.test_documents = test_docs.size();
    if (test_docs.empty()) throw PreconditionError("the test partition is empty");
    std::vector<Label> seg_truth, seg_pred, doc_truth, doc_pred;
    for (const Document* doc : test_docs) {
        std::vector<Label> preds;
        for (const auto& seg : segment(*doc, spec.scheme)) {
            const double p = pipeline.probability(seg);
            const Label predicted = label_from_bool(p > 0.5);
            preds.push_back(predicted);
            seg_truth.push_back(seg.label);
            seg_pred.push_back(predicted);
            report.segment_predictions.push_back({doc->id, seg.span, seg.label, predicted, p});
        }
        const bool candidate = aggregate_document(*doc, spec.scheme, preds);
        const Label truth = document_label(*doc);
        doc_truth.push_back(truth);
        doc_pred.push_back(label_from_bool(candidate));
        report.document_predictions.push_back({doc->id, truth, candidate});
        if (candidate) report.candidates.push_back(doc->id);
    }
    report.segment_confusion = confusion(seg_truth, seg_pred);
    report.segment_metrics = macro_metrics(report.segment_confusion);
    report.document_confusion = confusion(doc_truth, doc_pred);
    report.document_metrics = macro_metrics(report.document_confusion);
    report.partition_access = partitions.access_log();
    return report;
}

CorpusSplit experiment_split(const ExperimentSpec& spec, const std::vector<Document>& corpus) {
    return split_corpus(corpus, spec.ratios, split_seed(spec.seed));
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const std::vector<Document>& corpus,
                                const ExperimentResources& resources) {
    const auto started = std::chrono::steady_clock::now();
    validate_corpus(corpus);
    PartitionedCorpus partitions(corpus, experiment_split(spec, corpus));
    const TrainedPipeline pipeline = fit_pipeline(spec, partitions, resources);
    ExperimentReport report = evaluate_pipeline(pipeline, partitions);
    report.total_seconds = seconds_since(started);
    return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const std::vector<Document>& corpus) {
    return run_experiment(spec, corpus, load_resources(spec));
}

RecomputedMetrics recompute_metrics(const ExperimentReport& report) {
    RecomputedMetrics out;
    std::vector<Label> truth, pred;
    for (const auto& p : report.segment_predictions) {
        truth.push_back(p.truth);
        pred.push_back(p.predicted);
    }
    out.segment = confusion(truth, pred);
    truth.clear();
    pred.clear();
    for (const auto& p : report.document_predictions) {
        truth.push_back(p.truth);
        pred.push_back(label_from_bool(p.candidate));
    }
    out.document = confusion(truth, pred);
    return out;
}

std::vector<GridEntry> run_grid(std::span<const ExperimentSpec> specs, const std::vector<Document>& corpus,
                                std::size_t parallelism) {
    auto run_one = [&corpus](const ExperimentSpec& spec) {
        GridEntry entry{spec, std::nullopt, {}};
        try {
            entry.report = run_experiment(spec, corpus);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        return entry;
    };
    std::vector<GridEntry> entries;
    entries.reserve(specs.size());
    const std::size_t width = std::max<std::size_t>(parallelism, 1);
    for (std::size_t begin = 0; begin < specs.size(); begin += width) {
        const std::size_t end = std::min(specs.size(), begin + width);
        if (width == 1) {
            entries.push_back(run_one(specs[begin]));
            continue;
        }
        std::vector<std::future<GridEntry>> pending;
        for (std::size_t i = begin; i < end; ++i) {
            pending.push_back(std::async(std::launch::async, run_one, std::cref(specs[i])));
        }
        for (auto& f : pending) entries.push_back(f.get());
    }
    return entries;
}

namespace {

using Json = nlohmann::ordered_json;

Json metrics_json(const ConfusionMatrix& cm, const Metrics& m) {
    return Json{{"tp", cm.tp},
                {"fp", cm.fp},
                {"fn", cm.fn},
                {"tn", cm.tn},
                {"accuracy", m.accuracy},
                {"precision", m.macro_precision},
                {"recall", m.macro_recall},
                {"f1", m.macro_f1}};
}

Json spec_json(const ExperimentSpec& spec) {
    return Json{{"name", display_name(spec)},
                {"scheme", to_string(spec.scheme)},
                {"heuristic_encoder", spec.use_heuristic_encoder},
                {"model", to_string(spec.model)},
                {"ratios", {spec.ratios.train, spec.ratios.validation, spec.ratios.test}},
                {"seed", spec.seed},
                {"rounds", spec.gbdt.rounds},
                {"max_depth", spec.gbdt.max_depth},
                {"learning_rate", spec.gbdt.learning_rate},
                {"l2_lambda", spec.gbdt.l2_lambda},
                {"min_child_weight", spec.gbdt.min_child_weight}};
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

void metrics_row(std::ostream& out, const std::string& label, const Metrics& m) {
    out << std::left << std::setw(28) << label << std::right;
    for (double v : {m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1}) out << std::setw(11) << fixed(v);
    out << '\n';
}

void metrics_header(std::ostream& out, const std::string& first) {
    out << std::left << std::setw(28) << first << std::right;
    for (const char* column : kMetricColumns) out << std::setw(11) << column;
    out << '\n';
}

}  // namespace

void write_report_table(std::ostream& out, const ExperimentReport& report) {
    out << "experiment " << display_name(report.spec) << " (seed " << report.spec.seed << ")\n";
    out << "train: " << report.train_documents << " documents, " << report.train_segments << " segments, vocabulary "
        << report.vocabulary_size << ", lexicon entries " << report.lexicon_entries;
    if (report.spec.model == ModelKind::gbdt) out << ", trees " << report.trees;
    out << "\ntest: " << report.test_documents << " documents\n\n";
    metrics_header(out, "level [macro averaged]");
    metrics_row(out, "segment", report.segment_metrics);
    metrics_row(out, "document", report.document_metrics);
    out << "\nrectification candidates (" << report.candidates.size() << "):";
    for (const auto& id : report.candidates) out << ' ' << id;
    out << '\n';
}

void write_report_records(std::ostream& out, const ExperimentReport& report, bool include_timing) {
    Json head{{"record", "experiment"},
              {"spec", spec_json(report.spec)},
              {"train_documents", report.train_documents},
              {"test_documents", report.test_documents},
              {"train_segments", report.train_segments},
              {"vocabulary_size", report.vocabulary_size},
              {"lexicon_entries", report.lexicon_entries},
              {"trees", report.trees},
              {"segment", metrics_json(report.segment_confusion, report.segment_metrics)},
              {"document", metrics_json(report.document_confusion, report.document_metrics)},
              {"candidates", report.candidates},
              {"partition_access", report.partition_access}};
    if (include_timing) head["timing"] = Json{{"train_seconds", report.train_seconds}, {"total_seconds", report.total_seconds}};
    out << head.dump() << '\n';
    for (const auto& p : report.segment_predictions) {
        Json rec{{"record", "segment"},
                 {"doc_id", p.doc_id},
                 {"lo", p.span.lo},
                 {"hi", p.span.hi},
                 {"truth", is_positive(p.truth) ? 1 : 0},
                 {"predicted", is_positive(p.predicted) ? 1 : 0},
                 {"probability", p.probability}};
        out << rec.dump() << '\n';
    }
    for (const auto& p : report.document_predictions) {
        Json rec{{"record", "document"},
                 {"doc_id", p.doc_id},
                 {"truth", is_positive(p.truth) ? 1 : 0},
                 {"candidate", p.candidate}};
        out << rec.dump() << '\n';
    }
}

void write_grid_table(std::ostream& out, std::span<const GridEntry> entries) {
    for (const char* level : {"segment", "document"}) {
        out << level << " level [macro averaged]\n";
        metrics_header(out, "setting");
        for (const auto& entry : entries) {
            if (!entry.report) {
                out << std::left << std::setw(28) << display_name(entry.spec) << "error: " << entry.error << '\n';
                continue;
            }
            const auto& m = std::string_view(level) == "segment" ? entry.report->segment_metrics
                                                                 : entry.report->document_metrics;
            metrics_row(out, display_name(entry.spec), m);
        }
        out << '\n';
    }
}

void write_grid_records(std::ostream& out, std::span<const GridEntry> entries) {
    for (const auto& entry : entries) {
        Json rec{{"record", "grid_row"}, {"spec", spec_json(entry.spec)}};
        if (entry.report) {
            rec["segment"] = metrics_json(entry.report->segment_confusion, entry.report->segment_metrics);
            rec["document"] = metrics_json(entry.report->document_confusion, entry.report->document_metrics);
        } else {
            rec["error"] = entry.error;
        }
        out << rec.dump() << '\n';
    }
}

}  // namespace rhymecheck

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "rhymecheck/corpus.hpp"
#include "rhymecheck/errors.hpp"
#include "rhymecheck/heuristics.hpp"
#include "rhymecheck/pipeline.hpp"
#include "rhymecheck/promptkit.hpp"
#include "rhymecheck/stats.hpp"

#ifndef RHYMECHECK_DEFAULT_DATA_DIR
#define RHYMECHECK_DEFAULT_DATA_DIR "data"
#endif

namespace rhymecheck::cli {

namespace {

using Json = nlohmann::ordered_json;

// Bad flag values that CLI11 cannot check on its own.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { table, records };

Format parse_format(const std::string& text) { return text == "records" ? Format::records : Format::table; }

void add_format_option(CLI::App* cmd, std::string& format) {
    cmd->add_option("--format", format, "Output style: table (human) or records (JSON lines)")
        ->check(CLI::IsMember({"table", "records"}))
        ->default_val("table");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

SplitRatios parse_ratios(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--ratios expects three comma-separated numbers, got '" + text + "'");
        }
    }
    if (parts.size() != 3) throw UsageError("--ratios expects three comma-separated numbers, got '" + text + "'");
    const double sum = parts[0] + parts[1] + parts[2];
    if (std::min({parts[0], parts[1], parts[2]}) < 0.0 || std::abs(sum - 1.0) > 1e-9) {
        throw UsageError("--ratios must be non-negative and sum to 1, got '" + text + "'");
    }
    return SplitRatios{parts[0], parts[1], parts[2]};
}

std::string data_file(const char* name) { return (std::filesystem::path(default_data_dir()) / name).string(); }

std::string fixed(double value, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << value;
    return os.str();
}

// Experiment flags shared by train, run and grid. A --spec file is the base; flags override it.
struct ExperimentFlags {
    std::string spec_path;
    std::string name;
    std::string scheme;
    std::string model;
    std::string ratios;
    std::uint64_t seed = kDefaultSeed;
    std::string lexicon;
    std::string sentiment;
    std::size_t rounds = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* rounds_opt = nullptr;
    CLI::Option* he_opt = nullptr;
    CLI::Option* no_he_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--spec", spec_path, "Experiment spec file (key = value)");
        cmd->add_option("--name", name, "Experiment name");
        cmd->add_option("--scheme", scheme, "Segmentation: L1, L2, L3 or FULL");
        cmd->add_option("--model", model, "Classifier: gbdt or logreg");
        cmd->add_option("--ratios", ratios, "Split ratios train,validation,test");
        seed_opt = cmd->add_option("--seed", seed, "Master seed");
        cmd->add_option("--lexicon", lexicon, "Heuristic lexicon file");
        cmd->add_option("--sentiment", sentiment, "Sentiment lexicon file");
        rounds_opt = cmd->add_option("--rounds", rounds, "Boosting rounds");
        he_opt = cmd->add_flag("--he", "Append the heuristic encoder bits to the features");
        no_he_opt = cmd->add_flag("--no-he", "Bag of words only");
        he_opt->excludes(no_he_opt);
    }

    ExperimentSpec resolve() const {
        ExperimentSpec spec;
        if (!spec_path.empty()) {
            spec = load_experiment_spec(spec_path);
        } else {
            spec.heuristic_lexicon_path = data_file("demo_lexicon.txt");
            spec.sentiment_lexicon_path = data_file("sentiment_lexicon.tsv");
        }
        if (!name.empty()) spec.name = name;
        if (!scheme.empty()) {
            const auto parsed = parse_scheme(scheme);
            if (!parsed) throw UsageError("unknown scheme '" + scheme + "'");
            spec.scheme = *parsed;
        }
        if (!model.empty()) {
            const auto parsed = parse_model_kind(model);
            if (!parsed) throw UsageError("unknown model '" + model + "'");
            spec.model = *parsed;
        }
        if (!ratios.empty()) spec.ratios = parse_ratios(ratios);
        if (seed_opt->count() > 0) spec.seed = seed;
        if (!lexicon.empty()) spec.heuristic_lexicon_path = lexicon;
        if (!sentiment.empty()) spec.sentiment_lexicon_path = sentiment;
        if (rounds_opt->count() > 0) spec.gbdt.rounds = rounds;
        if (he_opt->count() > 0) spec.use_heuristic_encoder = true;
        if (no_he_opt->count() > 0) spec.use_heuristic_encoder = false;
        if (spec.name.empty()) spec.name = display_name(spec);
        return spec;
    }
};

// ---- ingest ---------------------------------------------------------------

int cmd_ingest(const std::string& corpus_path, Format format, std::ostream& out) {
    const auto docs = load_corpus(corpus_path);
    const CorpusStats stats = corpus_stats(docs);
    const std::vector<std::pair<std::string, CorpusStats::Row>> rows = {
        {"Stereotypical Rhymes", stats.stereotypical_rhymes},
        {"Non-Stereotypical Rhymes", stats.non_stereotypical_rhymes},
        {"Stereotypical Poems", stats.stereotypical_poems},
        {"Non-Stereotypical Poems", stats.non_stereotypical_poems},
        {"Augmented", stats.augmented},
        {"Rectified", stats.rectified},
        {"Unannotated", stats.unannotated},
        {"Total (original)", stats.total_original},
        {"Total (with generated)", stats.total_with_generated},
    };
    if (format == Format::records) {
        for (const auto& [category, row] : rows) {
            out << Json{{"record", "corpus_stats"}, {"category", category}, {"verses", row.verses}, {"lines", row.lines}}
                       .dump()
                << '\n';
        }
        return kExitOk;
    }
    out << std::left << std::setw(28) << "Category" << std::right << std::setw(8) << "Verses" << std::setw(8)
        << "Lines" << '\n';
    for (const auto& [category, row] : rows) {
        out << std::left << std::setw(28) << category << std::right << std::setw(8) << row.verses << std::setw(8)
            << row.lines << '\n';
    }
    return kExitOk;
}

// ---- split ----------------------------------------------------------------

int cmd_split(const std::string& corpus_path, const std::string& ratios, std::uint64_t seed,
              const std::string& out_dir, Format format, std::ostream& out) {
    const auto docs = load_corpus(corpus_path);
    const CorpusSplit split = split_corpus(docs, parse_ratios(ratios), seed);
    const std::vector<std::pair<const char*, const std::vector<std::string>*>> parts = {
        {"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::map<std::string, const Document*> by_id;
        for (const auto& doc : docs) by_id[doc.id] = &doc;
        for (const auto& [name, ids] : parts) {
            std::vector<Document> subset;
            for (const auto& id : *ids) subset.push_back(*by_id.at(id));
            save_corpus((std::filesystem::path(out_dir) / (std::string(name) + ".jsonl")).string(), subset);
        }
    }

    if (format == Format::records) {
        for (const auto& [name, ids] : parts) {
            for (const auto& id : *ids) out << Json{{"record", "split"}, {"id", id}, {"partition", name}}.dump() << '\n';
        }
        return kExitOk;
    }
    for (const auto& [name, ids] : parts) {
        out << name << " (" << ids->size() << "):";
        for (const auto& id : *ids) out << ' ' << id;
        out << '\n';
    }
    return kExitOk;
}

// ---- encode ---------------------------------------------------------------

int cmd_encode(const std::vector<std::string>& lines, const std::string& lexicon_path,
               const std::string& sentiment_path, double threshold, Format format, std::ostream& out) {
    const HeuristicLexicon hlex = load_heuristic_lexicon(lexicon_path);
    const SentimentLexicon slex = load_sentiment_lexicon(sentiment_path);
    for (const auto& line : lines) {
        const HeuristicVector v = encode(line, hlex, slex, EncoderOptions{threshold});
        if (format == Format::records) {
            const auto tokens = tokenize(line);
            Json bits = Json::array();
            for (auto b : v.bits) bits.push_back(static_cast<int>(b));
            out << Json{{"record", "encoding"},
                        {"text", line},
                        {"bits", bits},
                        {"sentiment", sentiment_score(tokens, slex)}}
                       .dump()
                << '\n';
        } else {
            out << to_string(v) << '\n';
        }
    }
    return kExitOk;
}

// ---- train / eval / run / grid ----------------------------------------------

int cmd_train(const ExperimentSpec& spec, const std::string& corpus_path, const std::string& out_dir, Format format,
              std::ostream& out) {
    const auto docs = load_corpus(corpus_path);
    validate_corpus(docs);
    PartitionedCorpus partitions(docs, experiment_split(spec, docs));
    const TrainedPipeline pipeline = fit_pipeline(spec, partitions, load_resources(spec));
    save_pipeline(out_dir, pipeline);
    const std::size_t trees = spec.model == ModelKind::gbdt ? pipeline.gbdt.trees.size() : 0;
    if (format == Format::records) {
        out << Json{{"record", "trained"},
                    {"name", spec.name},
                    {"bundle", out_dir},
                    {"train_documents", pipeline.train_documents},
                    {"train_segments", pipeline.train_segments},
                    {"vocabulary", pipeline.vocabulary.size()},
                    {"trees", trees}}
                   .dump()
            << '\n';
    } else {
        out << "trained " << display_name(spec) << " on " << pipeline.train_documents << " documents ("
            << pipeline.train_segments << " segments, vocabulary " << pipeline.vocabulary.size();
        if (spec.model == ModelKind::gbdt) out << ", " << trees << " trees";
        out << ")\nbundle written to " << out_dir << '\n';
    }
    return kExitOk;
}

void print_report(const ExperimentReport& report, Format format, bool timing, std::ostream& out) {
    if (format == Format::records) {
        write_report_records(out, report, timing);
    } else {
        write_report_table(out, report);
    }
}

int cmd_eval(const std::string& bundle, const std::string& corpus_path, Format format, bool timing,
             std::ostream& out) {
    const TrainedPipeline loaded = load_pipeline(bundle);
    const auto docs = load_corpus(corpus_path);
    validate_corpus(docs);
    PartitionedCorpus partitions(docs, experiment_split(loaded.spec, docs));
    TrainedPipeline pipeline = loaded;
    // Counts only; the fitted state comes from the bundle.
    pipeline.train_documents = partitions.train().size();
    pipeline.train_segments = 0;
    for (const Document* doc : partitions.train()) pipeline.train_segments += segment(*doc, loaded.spec.scheme).size();
    print_report(evaluate_pipeline(pipeline, partitions), format, timing, out);
    return kExitOk;
}

int cmd_run(const ExperimentSpec& spec, const std::string& corpus_path, Format format, bool timing,
            std::ostream& out) {
    const auto docs = load_corpus(corpus_path);
    print_report(run_experiment(spec, docs), format, timing, out);
    return kExitOk;
}

int cmd_grid(const ExperimentSpec& base, const std::string& corpus_path, std::size_t parallelism, Format format,
             std::ostream& out, std::ostream& err) {
    const auto docs = load_corpus(corpus_path);
    const auto specs = scheme_grid(base);
    const auto entries = run_grid(specs, docs, parallelism);
    if (format == Format::records) {
        write_grid_records(out, entries);
    } else {
        write_grid_table(out, entries);
    }
    bool failed = false;
    for (const auto& entry : entries) {
        if (!entry.report) {
            err << "error: " << display_name(entry.spec) << ": " << entry.error << '\n';
            failed = true;
        }
    }
    return failed ? kExitData : kExitOk;
}

// ---- alpha / ttest / survey -------------------------------------------------

int cmd_alpha(const std::string& path, Format format, std::ostream& out) {
    auto in = open_input(path);
    const AgreementTable table = parse_agreement_table(in);
    const double alpha = krippendorff_alpha(table);
    if (format == Format::records) {
        out << Json{{"record", "alpha"}, {"units", table.items.size()}, {"alpha", alpha}}.dump() << '\n';
    } else {
        out << "units  " << table.items.size() << "\nalpha  " << fixed(alpha) << '\n';
    }
    return kExitOk;
}

int cmd_ttest(const std::string& path, Format format, std::ostream& out) {
    auto in = open_input(path);
    const auto [x, y] = parse_score_pairs(in);
    const TTestResult r = paired_ttest(x, y);
    if (format == Format::records) {
        out << Json{{"record", "ttest"}, {"pairs", x.size()}, {"t", r.t}, {"df", r.df}, {"p", r.p_two_tailed}}.dump()
            << '\n';
    } else {
        out << "pairs  " << x.size() << "\nt      " << fixed(r.t) << "\ndf     " << r.df << "\np      "
            << fixed(r.p_two_tailed) << " (two-tailed)\n";
    }
    return kExitOk;
}

int cmd_survey(const std::string& path, Format format, std::ostream& out) {
    auto in = open_input(path);
    const auto records = parse_survey(in);
    const SurveySummary s = summarize_survey(records);
    if (format == Format::records) {
        auto counts = [](const ChoiceCounts& c) {
            return Json{{"Human", c.human}, {"ChatGPT", c.llm}, {"NoDifference", c.no_difference}};
        };
        auto test = [](const TTestResult& t) { return Json{{"t", t.t}, {"df", t.df}, {"p", t.p_two_tailed}}; };
        out << Json{{"record", "survey"},
                    {"responses", records.size()},
                    {"reduction", test(s.reduction)},
                    {"creativity", test(s.creativity)},
                    {"q3", counts(s.q3)},
                    {"q4", counts(s.q4)}}
                   .dump()
            << '\n';
        return kExitOk;
    }
    out << "responses   " << records.size() << '\n';
    out << "reduction   t=" << fixed(s.reduction.t) << " df=" << s.reduction.df << " p=" << fixed(s.reduction.p_two_tailed)
        << '\n';
    out << "creativity  t=" << fixed(s.creativity.t) << " df=" << s.creativity.df
        << " p=" << fixed(s.creativity.p_two_tailed) << '\n';
    out << "q3          Human=" << s.q3.human << " ChatGPT=" << s.q3.llm << " NoDifference=" << s.q3.no_difference
        << '\n';
    out << "q4          Human=" << s.q4.human << " ChatGPT=" << s.q4.llm << " NoDifference=" << s.q4.no_difference
        << '\n';
    return kExitOk;
}

// ---- prompt -----------------------------------------------------------------

// Accepts plain ids (one per line) or the document records of an eval/run report.
std::set<std::string> read_candidates(const std::string& path) {
    auto in = open_input(path);
    std::set<std::string> ids;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string text = line.substr(first, last - first + 1);
        if (text.front() != '{') {
            ids.insert(text);
            continue;
        }
        Json rec;
        try {
            rec = Json::parse(text);
        } catch (const Json::exception&) {
            throw RecordError("malformed candidate record", number);
        }
        if (rec.value("record", "") == "document" && rec.value("candidate", false)) {
            ids.insert(rec.value("doc_id", ""));
        }
    }
    return ids;
}

struct PromptFlags {
    std::string kind;
    std::string corpus;
    std::vector<std::string> ids;
    std::string candidates;
    std::string complete = "none";
    std::string journal;
    std::string out_corpus;
    std::size_t parallelism = 1;
};

int cmd_prompt(const PromptFlags& flags, Format format, std::ostream& out, std::ostream& err) {
    const auto kind = parse_prompt_kind(flags.kind);
    if (!kind) throw UsageError("--kind must be augment or rectify");
    auto docs = load_corpus(flags.corpus);

    std::set<std::string> flagged;
    if (*kind == PromptKind::rectification && !flags.candidates.empty()) {
        flagged = read_candidates(flags.candidates);
    } else {
        for (const auto& doc : docs) {
            if (!doc.needs_annotation && is_positive(document_label(doc))) flagged.insert(doc.id);
        }
    }

    std::vector<const Document*> targets;
    if (!flags.ids.empty()) {
        for (const auto& id : flags.ids) {
            const auto it = std::find_if(docs.begin(), docs.end(), [&](const Document& d) { return d.id == id; });
            if (it == docs.end()) throw DataError("unknown document id '" + id + "'");
            targets.push_back(&*it);
        }
    } else {
        for (const auto& doc : docs) {
            if (!flagged.count(doc.id)) continue;
            if (*kind == PromptKind::augmentation && doc.provenance != Provenance::original) continue;
            targets.push_back(&doc);
        }
    }

    const auto now = std::chrono::system_clock::now();
    std::vector<PromptJob> jobs;
    std::vector<Document> parents;
    for (const Document* doc : targets) {
        jobs.push_back(*kind == PromptKind::augmentation
                           ? build_augmentation_prompt(*doc, now)
                           : build_rectification_prompt(*doc, flagged.count(doc->id) > 0, now));
        parents.push_back(*doc);
    }

    if (flags.complete == "none") {
        for (const auto& job : jobs) {
            if (format == Format::records) {
                out << Json{{"record", "prompt"},
                            {"doc_id", job.doc_id},
                            {"kind", to_string(job.kind)},
                            {"created_at", format_timestamp(job.created_at)},
                            {"prompt", job.prompt_text}}
                           .dump()
                    << '\n';
            } else {
                out << "== " << job.doc_id << " (" << to_string(job.kind) << ") ==\n" << job.prompt_text << "\n\n";
            }
        }
        return kExitOk;
    }

    std::unique_ptr<CompletionClient> client;
    if (flags.complete == "stub") {
        client = std::make_unique<StubCompletionClient>();
    } else {
        client = CommandCompletionClient::from_environment();
        if (!client) throw UsageError(std::string("--complete command needs ") + kCompletionCommandEnv + " to be set");
    }
    std::unique_ptr<PromptJournal> journal;
    if (!flags.journal.empty()) journal = std::make_unique<PromptJournal>(flags.journal);

    const auto outcomes = run_completions(*client, jobs, parents, journal.get(), flags.parallelism);
    bool failed = false;
    for (const auto& outcome : outcomes) {
        if (!outcome.document) {
            err << "error: " << outcome.job.doc_id << ": " << outcome.error << '\n';
            failed = true;
            continue;
        }
        const Document& doc = *outcome.document;
        if (format == Format::records) {
            write_document(out, doc);
        } else {
            out << "registered " << doc.id << " from " << outcome.job.doc_id
                << (doc.needs_annotation ? " (needs annotation)" : "") << '\n';
        }
        docs.push_back(doc);
    }
    if (!flags.out_corpus.empty()) {
        validate_corpus(docs);
        save_corpus(flags.out_corpus, docs);
    }
    return failed ? kExitData : kExitOk;
}

// Parses `args`; returns an exit code when parsing already finished the invocation (help or error).
std::optional<int> dispatch(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.emplace_back("rhymecheck");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }
    return std::nullopt;
}

}  // namespace

std::string default_data_dir() { return RHYMECHECK_DEFAULT_DATA_DIR; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Corpus, classifier and statistics toolkit for gender stereotypes in rhymes and poems",
                 "rhymecheck"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.");

    std::string format = "table";
    std::string corpus;

    auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print verse/line counts per label");
    ingest->add_option("--corpus", corpus, "Corpus file (JSON lines)")->required();
    add_format_option(ingest, format);

    std::string ratios = "0.8,0,0.2";
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir;
    auto* split = app.add_subcommand("split", "Document-level stratified split");
    split->add_option("--corpus", corpus, "Corpus file (JSON lines)")->required();
    split->add_option("--ratios", ratios, "train,validation,test")->default_val("0.8,0,0.2");
    split->add_option("--seed", seed, "Split seed")->default_val(kDefaultSeed);
    split->add_option("--out-dir", out_dir, "Write train/validation/test corpus files here");
    add_format_option(split, format);

    std::vector<std::string> encode_lines;
    std::string lexicon = data_file("demo_lexicon.txt");
    std::string sentiment = data_file("sentiment_lexicon.tsv");
    double threshold = kDefaultSentimentThreshold;
    auto* enc = app.add_subcommand("encode", "Print the 5-bit heuristic vector of a line");
    enc->add_option("--line", encode_lines, "Text to encode (repeatable)")->required();
    enc->add_option("--lexicon", lexicon, "Heuristic lexicon file")->default_val(lexicon);
    enc->add_option("--sentiment", sentiment, "Sentiment lexicon file")->default_val(sentiment);
    enc->add_option("--threshold", threshold, "Sentiment threshold")->default_val(kDefaultSentimentThreshold);
    add_format_option(enc, format);

    ExperimentFlags train_flags, run_flags, grid_flags;
    std::string bundle;
    auto* train = app.add_subcommand("train", "Fit a classifier on the training partition and save a bundle");
    train->add_option("--corpus", corpus, "Corpus file (JSON lines)")->required();
    train->add_option("--out", bundle, "Bundle directory")->required();
    train_flags.attach(train);
    add_format_option(train, format);

    bool timing = false;
    auto* eval = app.add_subcommand("eval", "Score a saved bundle on the test partition");
    eval->add_option("--corpus", corpus, "Corpus file (JSON lines)")->required();
    eval->add_option("--model", bundle, "Bundle directory written by train")->required();
    eval->add_flag("--timing", timing, "Include timings in records");
    add_format_option(eval, format);

    auto* run = app.add_subcommand("run", "Train and evaluate one experiment");
    run->add_option("--corpus", corpus, "Corpus file (JSON lines)")->required();
    run->add_flag("--timing", timing, "Include timings in records");
    run_flags.attach(run);
    add_format_option(run, format);

    std::size_t parallelism = 1;
    auto* grid = app.add_subcommand("grid", "Run the 4 schemes x heuristic encoder on/off grid");
    grid->add_option("--corpus", corpus, "Corpus file (JSON lines)")->required();
    grid->add_option("--parallel", parallelism, "Concurrent experiments")->default_val(1)->check(CLI::PositiveNumber);
    grid_flags.attach(grid);
    add_format_option(grid, format);

    std::string file;
    auto* alpha = app.add_subcommand("alpha", "Krippendorff's alpha for two raters with binary labels");
    alpha->add_option("--file", file, "Two columns of 0/1 labels")->required();
    add_format_option(alpha, format);

    auto* ttest = app.add_subcommand("ttest", "Paired t-test on two columns of scores");
    ttest->add_option("--file", file, "Two columns of scores")->required();
    add_format_option(ttest, format);

    auto* survey = app.add_subcommand("survey", "Summarize a human vs LLM rewrite survey");
    survey->add_option("--file", file, "Survey TSV")->required();
    add_format_option(survey, format);

    PromptFlags prompt_flags;
    auto* prompt = app.add_subcommand("prompt", "Build augmentation or rectification prompts");
    prompt->add_option("--kind", prompt_flags.kind, "augment or rectify")
        ->required()
        ->check(CLI::IsMember({"augment", "augmentation", "rectify", "rectification"}));
    prompt->add_option("--corpus", prompt_flags.corpus, "Corpus file (JSON lines)")->required();
    prompt->add_option("--id", prompt_flags.ids, "Document id (repeatable); default is every eligible document");
    prompt->add_option("--candidates", prompt_flags.candidates,
                       "Flagged ids for rectify: plain ids or document records from eval");
    prompt->add_option("--complete", prompt_flags.complete, "Send prompts: none, stub or command")
        ->check(CLI::IsMember({"none", "stub", "command"}))
        ->default_val("none");
    prompt->add_option("--journal", prompt_flags.journal, "Append jobs and responses to this JSONL file");
    prompt->add_option("--out", prompt_flags.out_corpus, "Write the corpus plus registered documents here");
    prompt->add_option("--parallel", prompt_flags.parallelism, "Concurrent completions")
        ->default_val(1)
        ->check(CLI::PositiveNumber);
    add_format_option(prompt, format);

    try {
        if (args.empty()) {
            out << app.help();
            return kExitUsage;
        }
        if (const auto finished = dispatch(app, args, out, err)) return *finished;
        const Format fmt = parse_format(format);

        if (ingest->parsed()) return cmd_ingest(corpus, fmt, out);
        if (split->parsed()) return cmd_split(corpus, ratios, seed, out_dir, fmt, out);
        if (enc->parsed()) return cmd_encode(encode_lines, lexicon, sentiment, threshold, fmt, out);
        if (train->parsed()) return cmd_train(train_flags.resolve(), corpus, bundle, fmt, out);
        if (eval->parsed()) return cmd_eval(bundle, corpus, fmt, timing, out);
        if (run->parsed()) return cmd_run(run_flags.resolve(), corpus, fmt, timing, out);
        if (grid->parsed()) return cmd_grid(grid_flags.resolve(), corpus, parallelism, fmt, out, err);
        if (alpha->parsed()) return cmd_alpha(file, fmt, out);
        if (ttest->parsed()) return cmd_ttest(file, fmt, out);
        if (survey->parsed()) return cmd_survey(file, fmt, out);
        if (prompt->parsed()) return cmd_prompt(prompt_flags, fmt, out, err);
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const CompletionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace rhymecheck::cli

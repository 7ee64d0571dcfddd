#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli/cli.hpp"
#include "fixtures.hpp"
#include "rhymecheck/pipeline.hpp"
#include "rhymecheck/promptkit.hpp"
#include "rhymecheck/stats.hpp"

namespace rhymecheck {
namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
    const auto path = fixtures::scratch_dir("cli-" + name) / name;
    std::ofstream(path) << text;
    return path.string();
}

const std::string kCorpus = fixtures::data_path("demo_corpus.jsonl");

TEST(Cli, EncodeWorkedExample) {
    const auto r = run({"encode", "--line", "had a wife but couldn't keep her"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "0 1 1 1 0\n");
    const auto rec = run({"encode", "--line", "had a wife but couldn't keep her", "--format", "records"});
    const auto j = nlohmann::json::parse(rec.out);
    EXPECT_EQ(j["bits"], nlohmann::json::array({0, 1, 1, 1, 0}));
}

TEST(Cli, IngestPrintsTableShape) {
    const auto r = run({"ingest", "--corpus", kCorpus});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* row : {"Stereotypical Rhymes", "Non-Stereotypical Rhymes", "Stereotypical Poems",
                            "Non-Stereotypical Poems", "Verses", "Lines"}) {
        EXPECT_NE(r.out.find(row), std::string::npos) << row;
    }
    const auto rec = run({"ingest", "--corpus", kCorpus, "--format", "records"});
    std::istringstream lines(rec.out);
    std::string line;
    const auto stats = corpus_stats(load_corpus(kCorpus));
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j["record"], "corpus_stats");
        if (j["category"] == "Stereotypical Rhymes") {
            EXPECT_EQ(j["verses"], stats.stereotypical_rhymes.verses);
            EXPECT_EQ(j["lines"], stats.stereotypical_rhymes.lines);
        }
    }
}

TEST(Cli, IngestDuplicateIdIsDataError) {
    const std::string rec = R"({"id":"twice","kind":"rhyme","lines":[{"text":"x","label":0}]})";
    const auto r = run({"ingest", "--corpus", write_file("dup.jsonl", rec + "\n" + rec + "\n")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("twice"), std::string::npos);
}

TEST(Cli, TTestZeroVarianceIsDataError) {
    const auto r = run({"ttest", "--file", write_file("pairs.tsv", "3\t3\n4\t4\n5\t5\n")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("zero variance"), std::string::npos);
}

TEST(Cli, TTestAndAlphaMatchLibrary) {
    const auto path = fixtures::data_path("demo_scores.tsv");
    const auto r = run({"ttest", "--file", path, "--format", "records"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    const auto [x, y] = parse_score_pairs(in);
    const auto expected = paired_ttest(x, y);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["t"].get<double>(), expected.t);
    EXPECT_EQ(j["p"].get<double>(), expected.p_two_tailed);

    const auto a = run({"alpha", "--file", fixtures::data_path("demo_agreement.tsv"), "--format", "records"});
    ASSERT_EQ(a.code, 0) << a.err;
    std::ifstream ain(fixtures::data_path("demo_agreement.tsv"));
    EXPECT_EQ(nlohmann::json::parse(a.out)["alpha"].get<double>(), krippendorff_alpha(parse_agreement_table(ain)));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"ingest"}).code, 1);
    EXPECT_EQ(run({"ingest", "--corpus", kCorpus, "--bogus"}).code, 1);
    EXPECT_EQ(run({"ingest", "--corpus", kCorpus, "--format", "xml"}).code, 1);
    EXPECT_EQ(run({"split", "--corpus", kCorpus, "--ratios", "0.5,0.5"}).code, 1);
    EXPECT_EQ(run({"split", "--corpus", kCorpus, "--ratios", "0.5,0.6,0.1"}).code, 1);
    EXPECT_EQ(run({"run", "--corpus", kCorpus, "--scheme", "L7"}).code, 1);
    EXPECT_EQ(run({"prompt", "--kind", "translate", "--corpus", kCorpus}).code, 1);
}

TEST(Cli, HelpOnEverySubcommand) {
    for (const char* sub : {"ingest", "split", "encode", "train", "eval", "run", "grid", "alpha", "ttest", "survey",
                            "prompt"}) {
        const auto r = run({sub, "--help"});
        EXPECT_EQ(r.code, 0) << sub;
        EXPECT_NE(r.out.find("--format"), std::string::npos) << sub;
    }
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, MissingFileIsDataError) {
    EXPECT_EQ(run({"ingest", "--corpus", "/nonexistent.jsonl"}).code, 2);
    EXPECT_EQ(run({"alpha", "--file", "/nonexistent.tsv"}).code, 2);
}

TEST(Cli, SplitRecordsCoverCorpus) {
    const auto r = run({"split", "--corpus", kCorpus, "--seed", "5", "--format", "records"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto docs = load_corpus(kCorpus);
    const auto split = split_corpus(docs, {}, 5);
    std::istringstream lines(r.out);
    std::string line;
    std::vector<std::string> test_ids;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        ++n;
        if (j["partition"] == "test") test_ids.push_back(j["id"]);
    }
    EXPECT_EQ(n, docs.size());
    EXPECT_EQ(test_ids, split.test);
}

// The train/eval pair and the one-shot run agree with calling the pipeline directly.
TEST(Cli, TrainEvalAndRunAreThinAdapters) {
    const auto spec_path = fixtures::data_path("demo.spec");
    const auto bundle = fixtures::scratch_dir("cli-bundle").string();
    const auto t = run({"train", "--corpus", kCorpus, "--spec", spec_path, "--out", bundle});
    ASSERT_EQ(t.code, 0) << t.err;
    const auto e = run({"eval", "--corpus", kCorpus, "--model", bundle, "--format", "records"});
    ASSERT_EQ(e.code, 0) << e.err;
    const auto r = run({"run", "--corpus", kCorpus, "--spec", spec_path, "--format", "records"});
    ASSERT_EQ(r.code, 0) << r.err;

    std::ostringstream direct;
    write_report_records(direct, run_experiment(load_experiment_spec(spec_path), load_corpus(kCorpus)));
    EXPECT_EQ(r.out, direct.str());
    EXPECT_EQ(e.out, direct.str());
}

TEST(Cli, GridEmitsEightRows) {
    const auto r = run({"grid", "--corpus", kCorpus, "--rounds", "5", "--format", "records", "--parallel", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) rows += nlohmann::json::parse(line)["record"] == "grid_row";
    EXPECT_EQ(rows, 8);
}

TEST(Cli, PromptBuildAndStubCompletion) {
    const auto p = run({"prompt", "--kind", "rectify", "--corpus", kCorpus, "--format", "records"});
    ASSERT_EQ(p.code, 0) << p.err;
    std::istringstream lines(p.out);
    std::string line;
    int prompts = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j["prompt"].get<std::string>().rfind(std::string(kRectificationInstruction), 0), 0u);
        ++prompts;
    }
    const auto docs = load_corpus(kCorpus);
    int flagged = 0;
    for (const auto& d : docs) flagged += is_positive(document_label(d));
    EXPECT_EQ(prompts, flagged);

    const auto candidates = write_file("candidates.txt", "# from eval\nmade_of\n");
    const auto only = run({"prompt", "--kind", "rectify", "--corpus", kCorpus, "--candidates", candidates});
    ASSERT_EQ(only.code, 0) << only.err;
    EXPECT_NE(only.out.find("== made_of"), std::string::npos);
    EXPECT_EQ(only.out.find("== peter_pumpkin"), std::string::npos);
    const auto refused = run({"prompt", "--kind", "rectify", "--corpus", kCorpus, "--candidates", candidates,
                              "--id", "twinkle"});
    EXPECT_EQ(refused.code, 2);

    const auto out_corpus = (fixtures::scratch_dir("cli-prompt") / "grown.jsonl").string();
    const auto c = run({"prompt", "--kind", "augment", "--corpus", kCorpus, "--id", "georgie_porgie", "--complete",
                        "stub", "--out", out_corpus, "--format", "records"});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto grown = load_corpus(out_corpus);
    EXPECT_EQ(grown.size(), docs.size() + 1);
    EXPECT_EQ(grown.back().id, "georgie_porgie~aug");
    EXPECT_EQ(grown.back().parent_id, "georgie_porgie");
    const auto ingest = run({"ingest", "--corpus", out_corpus});
    EXPECT_EQ(ingest.code, 0);
}

TEST(Cli, SurveySummary) {
    const auto r = run({"survey", "--file", fixtures::data_path("demo_survey.tsv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("reduction"), std::string::npos);
}

}  // namespace
}  // namespace rhymecheck

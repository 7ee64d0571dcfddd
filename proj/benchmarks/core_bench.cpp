#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "rhymecheck/heuristics.hpp"
#include "rhymecheck/model.hpp"
#include "rhymecheck/pipeline.hpp"
#include "rhymecheck/stats.hpp"
#include "rhymecheck/textproc.hpp"

using namespace rhymecheck;

namespace {

const std::string kVerse =
    "Peter, Peter, pumpkin eater,\nHad a wife but couldn't keep her;\nHe put her in a pumpkin shell\n"
    "And there he kept her very well.";

void BM_Tokenize(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(tokenize(kVerse));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * kVerse.size()));
}
BENCHMARK(BM_Tokenize);

void BM_Encode(benchmark::State& state) {
    const auto hlex = load_heuristic_lexicon(fixtures::data_path("demo_lexicon.txt"));
    const auto slex = load_sentiment_lexicon(fixtures::data_path("sentiment_lexicon.tsv"));
    for (auto _ : state) benchmark::DoNotOptimize(encode(kVerse, hlex, slex));
}
BENCHMARK(BM_Encode);

void BM_TrainGbdt(benchmark::State& state) {
    SplitMix64 rng(1);
    fixtures::Dataset d;
    const auto rows = static_cast<std::size_t>(state.range(0));
    const std::size_t width = 400;
    for (std::size_t i = 0; i < rows; ++i) {
        FeatureVector x{{}, width};
        for (std::uint32_t f = 0; f < width; ++f) {
            if (rng.uniform() < 0.03) x.entries.push_back({f, 1.0});
        }
        d.X.push_back(std::move(x));
        d.y.push_back(label_from_bool(i % 3 == 0));
    }
    TrainConfig cfg;
    cfg.rounds = 50;
    for (auto _ : state) benchmark::DoNotOptimize(train_gbdt(d.X, d.y, cfg));
}
BENCHMARK(BM_TrainGbdt)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_TCdf(benchmark::State& state) {
    double t = -4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(t_cdf(t, 16.0));
        t = t > 4.0 ? -4.0 : t + 0.01;
    }
}
BENCHMARK(BM_TCdf);

void BM_RunExperiment(benchmark::State& state) {
    const auto corpus = fixtures::planted_corpus(3, 150);
    const ExperimentResources resources{fixtures::planted_lexicon(), fixtures::planted_sentiment()};
    ExperimentSpec spec;
    spec.scheme = Scheme::L2;
    spec.use_heuristic_encoder = true;
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(spec, corpus, resources));
}
BENCHMARK(BM_RunExperiment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

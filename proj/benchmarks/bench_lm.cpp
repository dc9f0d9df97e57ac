#include <benchmark/benchmark.h>

#include <vector>

#include "tokparity/neural_lm.hpp"
#include "tokparity/ngram_lm.hpp"
#include "tokparity/rng.hpp"

namespace {

std::vector<std::vector<int>> token_corpus(std::size_t vocab, std::size_t seqs, std::size_t len) {
    std::mt19937_64 rng(99);
    std::vector<std::vector<int>> out(seqs);
    for (auto& seq : out) {
        seq.resize(len);
        for (auto& id : seq)
            id = static_cast<int>(tokparity::uniform_below(rng, vocab));
    }
    return out;
}

void BM_NGramNextDist(benchmark::State& state) {
    const std::size_t vocab = 512;
    const auto corpus = token_corpus(vocab, 64, 128);
    const auto lm = tokparity::NGramLm::train(corpus, vocab);
    const std::vector<int> context = {5, 9, 11, 42};
    for (auto _ : state) {
        auto dist = lm.next_dist(context);
        benchmark::DoNotOptimize(dist.data());
    }
}
BENCHMARK(BM_NGramNextDist);

void BM_NeuralForward(benchmark::State& state) {
    const std::size_t vocab = 512;
    tokparity::NeuralLmConfig config;
    config.embed_dim = 16;
    config.context_window = 32;
    config.hidden_dim = 32;
    config.seed = 3;
    const auto lm = tokparity::NeuralLm::init(vocab, config);
    const auto corpus = token_corpus(vocab, 1, 32);
    for (auto _ : state) {
        auto dist = lm.next_dist(corpus[0]);
        benchmark::DoNotOptimize(dist.data());
    }
}
BENCHMARK(BM_NeuralForward);

void BM_NeuralTrainEpoch(benchmark::State& state) {
    const std::size_t vocab = 512;
    tokparity::NeuralLmConfig config;
    config.embed_dim = 16;
    config.context_window = 32;
    config.hidden_dim = 32;
    config.seed = 3;
    const auto corpus = token_corpus(vocab, 16, 128);
    for (auto _ : state) {
        auto lm = tokparity::NeuralLm::init(vocab, config);
        tokparity::TrainConfig tc;
        tc.epochs = 1;
        tc.batch_size = 32;
        tc.learning_rate = 0.1;
        auto log = lm.train(corpus, {}, tokparity::TrainMode::Full, tc);
        benchmark::DoNotOptimize(log.epochs_run);
    }
}
BENCHMARK(BM_NeuralTrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

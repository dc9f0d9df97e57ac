#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "tokparity/bpe.hpp"

namespace {

std::vector<std::string> bench_corpus() {
    std::vector<std::string> corpus;
    for (int i = 0; i < 200; ++i) {
        corpus.push_back(
            "She finished her memoir after years of notes. Critics praised her early designs "
            "and the committee invited her to the coast. He kept his notes in a leather "
            "satchel, and the final word in the studio was always his.");
    }
    return corpus;
}

void BM_BpeTrain(benchmark::State& state) {
    const auto corpus = bench_corpus();
    for (auto _ : state) {
        auto model = tokparity::TokenizerModel::train(corpus, static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(model.vocab_size());
    }
}
BENCHMARK(BM_BpeTrain)->Arg(320)->Arg(512);

void BM_BpeEncode(benchmark::State& state) {
    const auto corpus = bench_corpus();
    const auto model = tokparity::TokenizerModel::train(corpus, 512);
    const std::string& text = corpus.front();
    std::size_t bytes = 0;
    for (auto _ : state) {
        auto ids = model.encode(text);
        benchmark::DoNotOptimize(ids.data());
        bytes += text.size();
    }
    state.SetBytesProcessed(static_cast<int64_t>(bytes));
}
BENCHMARK(BM_BpeEncode);

void BM_BpeDecode(benchmark::State& state) {
    const auto corpus = bench_corpus();
    const auto model = tokparity::TokenizerModel::train(corpus, 512);
    const auto ids = model.encode(corpus.front());
    for (auto _ : state) {
        auto text = model.decode(ids);
        benchmark::DoNotOptimize(text.data());
    }
}
BENCHMARK(BM_BpeDecode);

}  // namespace

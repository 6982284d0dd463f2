#include <benchmark/benchmark.h>

#include <sstream>
#include <string>
#include <vector>

#include "rsvp/embeddings.hpp"
#include "rsvp/metrics.hpp"
#include "rsvp/rng.hpp"

using namespace rsvp;

namespace {

std::string sentence(Rng& rng, int len) {
  static const std::vector<std::string> vocab = {
      "airplane", "runway", "terminal", "harbor", "vehicle",
      "bridge",   "tank",   "pier",     "dock",   "crane"};
  std::string out;
  for (int i = 0; i < len; ++i) {
    if (i) out += ' ';
    out += vocab[rng.uniform_below(vocab.size())];
  }
  return out;
}

EmbeddingTable synthetic_table(int dim, int tokens) {
  std::ostringstream text;
  Rng rng(9);
  for (int t = 0; t < tokens; ++t) {
    text << "tok" << t;
    for (int d = 0; d < dim; ++d) text << ' ' << rng.gaussian();
    text << '\n';
  }
  std::istringstream in(text.str());
  return load_embeddings(in);
}

}  // namespace

static void BM_Bleu4(benchmark::State& state) {
  Rng rng(4);
  const std::string cand = sentence(rng, static_cast<int>(state.range(0)));
  const std::string ref = sentence(rng, static_cast<int>(state.range(0)));
  MetricConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(bleu_n(cand, {ref}, 4, cfg));
}
BENCHMARK(BM_Bleu4)->Arg(10)->Arg(50)->Arg(200);

static void BM_RougeL(benchmark::State& state) {
  Rng rng(5);
  const std::string cand = sentence(rng, static_cast<int>(state.range(0)));
  const std::string ref = sentence(rng, static_cast<int>(state.range(0)));
  MetricConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(rouge_l(cand, ref, cfg));
}
BENCHMARK(BM_RougeL)->Arg(10)->Arg(50)->Arg(200);

static void BM_Cider(benchmark::State& state) {
  Rng rng(6);
  const int n = static_cast<int>(state.range(0));
  std::vector<std::string> cands;
  std::vector<std::vector<std::string>> refs;
  for (int i = 0; i < n; ++i) {
    cands.push_back(sentence(rng, 12));
    refs.push_back({sentence(rng, 12), sentence(rng, 12)});
  }
  MetricConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(cider(cands, refs, cfg));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Cider)->Arg(16)->Arg(128);

static void BM_SIou(benchmark::State& state) {
  EmbeddingTable table = synthetic_table(64, 500);
  Rng rng(7);
  std::string a, b;
  for (int i = 0; i < 12; ++i) {
    a += (i ? " tok" : "tok") + std::to_string(rng.uniform_below(500));
    b += (i ? " tok" : "tok") + std::to_string(rng.uniform_below(500));
  }
  MetricConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(s_iou(a, b, table, cfg));
}
BENCHMARK(BM_SIou);

BENCHMARK_MAIN();

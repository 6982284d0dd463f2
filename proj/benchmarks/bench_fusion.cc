#include <benchmark/benchmark.h>

#include "rsvp/fusion.hpp"
#include "rsvp/rng.hpp"

using namespace rsvp;

namespace {

Tensor2D random_tensor(int r, int c, Rng& rng) {
  Tensor2D t(r, c);
  for (auto& v : t.data) v = rng.gaussian();
  return t;
}

}  // namespace

static void BM_SaeEncode(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  KernelConfig cfg;
  cfg.patch = 8;
  FusionParams p = init_fusion_params(cfg);
  BinaryMask mask(side, side);
  Rng rng(1);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      mask.set(x, y, rng.uniform_below(2) ? 1 : 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(sae_encode(mask, p.sae, cfg));
}
BENCHMARK(BM_SaeEncode)->Arg(32)->Arg(64);

static void BM_HybridFuse(benchmark::State& state) {
  KernelConfig cfg;
  cfg.d_v = static_cast<int>(state.range(0));
  FusionParams p = init_fusion_params(cfg);
  Rng rng(2);
  Tensor2D V = random_tensor(64, cfg.d_v, rng);
  Tensor2D E = random_tensor(16, cfg.d_v, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hybrid_fuse(V, E, p.fuse));
}
BENCHMARK(BM_HybridFuse)->Arg(8)->Arg(32);

static void BM_FuseBackward(benchmark::State& state) {
  KernelConfig cfg;
  cfg.d_v = static_cast<int>(state.range(0));
  FusionParams p = init_fusion_params(cfg);
  Rng rng(3);
  Tensor2D V = random_tensor(16, cfg.d_v, rng);
  Tensor2D E = random_tensor(8, cfg.d_v, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        fuse_backward(V, E, p, LossStage::projected));
}
BENCHMARK(BM_FuseBackward)->Arg(8)->Arg(16);

static void BM_KernelCheck(benchmark::State& state) {
  KernelConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernel_check(cfg, 5, 1));
}
BENCHMARK(BM_KernelCheck)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

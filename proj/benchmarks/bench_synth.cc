#include <benchmark/benchmark.h>

#include "rsvp/prompt_synth.hpp"
#include "rsvp/rng.hpp"

using namespace rsvp;

static void BM_AugmentBox(benchmark::State& state) {
  const BBox b{100, 100, 50, 80};
  AugmentConfig cfg;
  Rng rng(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(augment_box(b, cfg, rng, 1024, 1024));
}
BENCHMARK(BM_AugmentBox);

static void BM_SamplePatchPoints(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  SegmentationMap seg;
  seg.width = side;
  seg.height = side;
  seg.class_ids.assign(static_cast<size_t>(side) * side, 0);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      seg.class_ids[static_cast<size_t>(y) * side + x] = (x + y) % 2;
  seg.legend = {{0, "water"}, {1, "land"}};
  Rng rng(2);
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_patch_points(seg, 32, rng));
  state.SetItemsProcessed(state.iterations() *
                          ((side + 31) / 32) * ((side + 31) / 32));
}
BENCHMARK(BM_SamplePatchPoints)->Arg(64)->Arg(256)->Arg(1024);

static void BM_SampleMaskPoints(benchmark::State& state) {
  std::vector<Pixel> mask;
  for (int y = 0; y < 200; ++y)
    for (int x = 0; x < 200; ++x)
      if ((x * 31 + y * 17) % 3 == 0) mask.push_back(Pixel{x, y});
  Rng rng(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sample_mask_points(mask, static_cast<int>(state.range(0)), rng));
}
BENCHMARK(BM_SampleMaskPoints)->Arg(8)->Arg(64);

BENCHMARK_MAIN();

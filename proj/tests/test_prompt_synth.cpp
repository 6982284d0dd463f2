#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "helpers.hpp"
#include "rsvp/errors.hpp"
#include "rsvp/prompt_synth.hpp"
#include "rsvp/templates.hpp"

using namespace rsvp;

namespace {

SegmentationMap make_map(int w, int h,
                         const std::function<int(int, int)>& id_at,
                         std::map<int, std::string> legend,
                         int ignore_id = 255) {
  SegmentationMap seg;
  seg.width = w;
  seg.height = h;
  seg.legend = std::move(legend);
  seg.ignore_id = ignore_id;
  seg.class_ids.resize(size_t(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) seg.class_ids[size_t(y) * w + x] = id_at(x, y);
  return seg;
}

}  // namespace

TEST_CASE("augment_box alpha=0 is the identity") {
  Rng rng(1);
  AugmentConfig cfg;
  cfg.alpha = 0.0;
  BBox b{10, 20, 30, 40};
  for (int i = 0; i < 10; ++i)
    CHECK(augment_box(b, cfg, rng, 1000, 1000) == b);
}

TEST_CASE("augment_box draws exactly four gaussians in (x, y, w, h) order") {
  // Oracle: replay the same stream by hand and build the expected box.
  const uint64_t seed = 314;
  BBox b{50, 60, 20, 10};
  AugmentConfig cfg;
  cfg.alpha = 0.25;
  cfg.clamp_to_image = false;

  Rng replay(seed);
  const double gx = replay.gaussian(0.0, cfg.alpha * b.w);
  const double gy = replay.gaussian(0.0, cfg.alpha * b.h);
  const double gw = replay.gaussian(0.0, cfg.alpha * b.w);
  const double gh = replay.gaussian(0.0, cfg.alpha * b.h);
  BBox expect{b.x + gx, b.y + gy, std::max(b.w + gw, cfg.min_size),
              std::max(b.h + gh, cfg.min_size)};

  Rng rng(seed);
  AugmentedBox got = augment_box_detail(b, cfg, rng, 1000, 1000);
  CHECK(got.box == expect);
  CHECK(got.pre_clamp == expect);
  CHECK_FALSE(got.degenerate);

  // The two generators must now be in the same state.
  CHECK(rng.next_u64() == replay.next_u64());
}

TEST_CASE("augment_box noise statistics track alpha * size") {
  // Independent moment estimate: stds of the four coordinates should come
  // out near (alpha*w, alpha*h, alpha*w, alpha*h).
  Rng rng(7);
  BBox b{100, 100, 50, 80};
  AugmentConfig cfg;
  cfg.alpha = 0.1;
  cfg.clamp_to_image = false;
  const int n = 20000;
  double sum[4] = {0, 0, 0, 0}, sq[4] = {0, 0, 0, 0};
  for (int i = 0; i < n; ++i) {
    AugmentedBox a = augment_box_detail(b, cfg, rng, 4000, 4000);
    const double v[4] = {a.pre_clamp.x, a.pre_clamp.y, a.pre_clamp.w,
                         a.pre_clamp.h};
    for (int k = 0; k < 4; ++k) {
      sum[k] += v[k];
      sq[k] += v[k] * v[k];
    }
  }
  const double want_mean[4] = {100, 100, 50, 80};
  const double want_std[4] = {5, 8, 5, 8};
  for (int k = 0; k < 4; ++k) {
    const double mean = sum[k] / n;
    const double sd = std::sqrt(sq[k] / n - mean * mean);
    CHECK(std::abs(mean - want_mean[k]) < 0.2);
    CHECK(std::abs(sd - want_std[k]) / want_std[k] < 0.05);
  }
}

TEST_CASE("augment_box clamps into the image and floors tiny sizes") {
  Rng rng(5);
  AugmentConfig cfg;
  cfg.alpha = 0.8;  // violent noise so clamping actually triggers
  BBox b{5, 5, 40, 40};
  int degenerate = 0, truncated = 0;
  for (int i = 0; i < 2000; ++i) {
    AugmentedBox a = augment_box_detail(b, cfg, rng, 64, 64);
    CHECK(a.box.x >= 0.0);
    CHECK(a.box.y >= 0.0);
    CHECK(a.box.x2() <= 64.0);
    CHECK(a.box.y2() <= 64.0);
    CHECK(a.box.w > 0.0);
    CHECK(a.box.h > 0.0);
    CHECK(a.pre_clamp.w >= cfg.min_size);
    CHECK(a.pre_clamp.h >= cfg.min_size);
    if (a.degenerate) {
      // No overlap with the image: a 1x1 stand-in at the nearest edge.
      ++degenerate;
      CHECK(a.box.w == 1.0);
      CHECK(a.box.h == 1.0);
    } else {
      // Clamp only ever shrinks (modulo the ulp lost rebuilding w as
      // (x + w) - x); the floor ran before it, not after.
      CHECK(a.box.w <= a.pre_clamp.w + 1e-9);
      CHECK(a.box.h <= a.pre_clamp.h + 1e-9);
      if (a.box.w < cfg.min_size || a.box.h < cfg.min_size) ++truncated;
    }
  }
  CHECK(degenerate > 0);   // noise this violent must push some boxes fully out
  CHECK(truncated > 0);    // ...and slice others to sub-min_size slivers
  CHECK_THROWS_AS(augment_box(BBox{0, 0, 0, 10}, cfg, rng, 64, 64),
                  std::invalid_argument);
  AugmentConfig bad;
  bad.alpha = -0.1;
  CHECK_THROWS_AS(augment_box(b, bad, rng, 64, 64), std::invalid_argument);
}

TEST_CASE("sample_patch_points: one point per cell, inside, correctly labeled") {
  // 64x64, left half water (0), right half forest (1), patch 32 -> 4 cells.
  SegmentationMap seg = make_map(
      64, 64, [](int x, int) { return x < 32 ? 0 : 1; },
      {{0, "water"}, {1, "forest"}});
  for (uint64_t s = 0; s < 100; ++s) {
    Rng rng(s);
    auto pts = sample_patch_points(seg, 32, rng);
    REQUIRE(pts.size() == 4);
    // Cells in row-major order: (0,0) (32,0) (0,32) (32,32).
    const int cell_x[4] = {0, 32, 0, 32};
    const int cell_y[4] = {0, 0, 32, 32};
    for (int i = 0; i < 4; ++i) {
      const int px = int(pts[i].point.x), py = int(pts[i].point.y);
      CHECK(px >= cell_x[i]);
      CHECK(px < cell_x[i] + 32);
      CHECK(py >= cell_y[i]);
      CHECK(py < cell_y[i] + 32);
      CHECK(pts[i].category == (px < 32 ? "water" : "forest"));
    }
  }
}

TEST_CASE("sample_patch_points keeps partial edge cells") {
  // 70x40 with patch 32: 3 x 2 cells, the right/bottom ones partial.
  SegmentationMap seg =
      make_map(70, 40, [](int, int) { return 0; }, {{0, "field"}});
  Rng rng(9);
  auto pts = sample_patch_points(seg, 32, rng);
  REQUIRE(pts.size() == 6);
  // The third cell in each row spans x in [64, 70).
  CHECK(pts[2].point.x >= 64);
  CHECK(pts[2].point.x < 70);
  CHECK(pts[5].point.y >= 32);
  CHECK(pts[5].point.y < 40);
}

TEST_CASE("sample_patch_points drops ignore pixels and validates the legend") {
  SegmentationMap seg = make_map(
      32, 32, [](int, int) { return 255; }, {{0, "water"}});
  Rng rng(3);
  CHECK(sample_patch_points(seg, 32, rng).empty());

  SegmentationMap bad = make_map(32, 32, [](int, int) { return 7; }, {});
  CHECK_THROWS_AS(sample_patch_points(bad, 32, rng), LegendError);
}

TEST_CASE("sample_patch_points is deterministic per seed") {
  SegmentationMap seg = make_map(
      96, 96, [](int x, int y) { return (x / 8 + y / 8) % 2; },
      {{0, "a"}, {1, "b"}});
  Rng r1(42), r2(42);
  auto a = sample_patch_points(seg, 32, r1);
  auto b = sample_patch_points(seg, 32, r2);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].point == b[i].point);
    CHECK(a[i].category == b[i].category);
  }
}

TEST_CASE("sample_mask_points draws without replacement when possible") {
  std::vector<Pixel> mask;
  for (int i = 0; i < 20; ++i) mask.push_back({i, i * 2});
  Rng rng(8);
  auto pts = sample_mask_points(mask, 10, rng);
  REQUIRE(pts.size() == 10);
  std::set<std::pair<double, double>> uniq;
  for (const auto& p : pts) {
    uniq.insert({p.x, p.y});
    CHECK(p.y == 2 * p.x);  // every point really comes from the mask
  }
  CHECK(uniq.size() == 10);  // no repeats

  // Canonical ordering: a shuffled copy of the mask yields the same sample.
  std::vector<Pixel> shuffled(mask.rbegin(), mask.rend());
  Rng rng2(8);
  auto pts2 = sample_mask_points(shuffled, 10, rng2);
  for (size_t i = 0; i < pts.size(); ++i) CHECK(pts[i] == pts2[i]);

  // Fewer mask pixels than k: sampling with replacement, still in-mask.
  Rng rng3(1);
  auto over = sample_mask_points({{1, 1}, {2, 2}}, 5, rng3);
  CHECK(over.size() == 5);
  for (const auto& p : over) CHECK((p.x == p.y));

  CHECK_THROWS_AS(sample_mask_points({}, 1, rng3), std::invalid_argument);
  CHECK_THROWS_AS(sample_mask_points(mask, 0, rng3), std::invalid_argument);
}

TEST_CASE("mask_of_class scans row-major") {
  SegmentationMap seg = make_map(
      4, 3, [](int x, int y) { return (x == 1 && y == 0) || y == 2 ? 1 : 0; },
      {{0, "bg"}, {1, "road"}});
  auto mask = mask_of_class(seg, 1);
  REQUIRE(mask.size() == 5);
  CHECK(mask[0] == Pixel{1, 0});
  CHECK(mask[1] == Pixel{0, 2});
  CHECK(mask[4] == Pixel{3, 2});
}

TEST_CASE("freeform_to_box bounds the vertices") {
  FreeFormPrompt f;
  f.vertices = {{10, 40}, {30, 12}, {22, 50}};
  BBox b = freeform_to_box(f, 100, 100);
  CHECK(b == BBox{10, 12, 20, 38});

  // Clamped against the image and floored to 1x1.
  FreeFormPrompt dot;
  dot.vertices = {{98.5, 5}};
  BBox d = freeform_to_box(dot, 100, 100);
  CHECK(d.w >= 1.0);
  CHECK(d.x2() <= 100.0);
  CHECK_THROWS_AS(freeform_to_box(FreeFormPrompt{}, 10, 10),
                  std::invalid_argument);
}

TEST_CASE("default templates carry the stock instruction set") {
  TemplateSet ts = TemplateSet::defaults();
  for (TaskKind t : all_task_kinds()) CHECK(!ts.for_task(t).empty());

  auto has = [&](TaskKind t, const std::string& s) {
    const auto& v = ts.for_task(t);
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  CHECK(has(TaskKind::referring_object_classification,
            "Please identify the object category of each marked region in the "
            "image."));
  CHECK(has(TaskKind::referring_object_classification,
            "Please identify the labels of each marked point in the image."));
  CHECK(has(TaskKind::region_caption_brief,
            "Please provide a brief caption of each marked region in the "
            "image."));
  CHECK(has(TaskKind::region_caption_detailed,
            "Please provide a detailed caption of each marked point in the "
            "image."));
  CHECK(has(TaskKind::relationship_analysis,
            "Please analyze the relationship between all marked regions in "
            "the image."));
  CHECK(has(TaskKind::relationship_analysis,
            "Please analyze how the marked objects interact with each other "
            "in the given scene."));
  CHECK(has(TaskKind::summary_caption,
            "Please provide a summarized caption based on all the marked "
            "regions in the image."));
}

TEST_CASE("template flavor filter") {
  TemplateSet ts = TemplateSet::defaults();
  auto points = ts.for_task_flavor(TaskKind::referring_object_classification,
                                   PromptFlavor::point);
  REQUIRE(points.size() == 1);
  CHECK(points[0].find("point") != std::string::npos);

  auto regions = ts.for_task_flavor(TaskKind::referring_object_classification,
                                    PromptFlavor::region);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].find("region") != std::string::npos);

  // When the filter would empty the set, the full set is used instead.
  auto fallback =
      ts.for_task_flavor(TaskKind::summary_caption, PromptFlavor::point);
  CHECK(fallback == ts.for_task(TaskKind::summary_caption));

  TemplateSet empty;
  CHECK_THROWS_AS(empty.for_task(TaskKind::summary_caption), TemplateError);
}

TEST_CASE("select_instruction is uniform-deterministic") {
  TemplateSet ts;
  ts.by_task[TaskKind::scene_classification] = {"only one"};
  Rng rng(1);
  CHECK(select_instruction(TaskKind::scene_classification, ts, rng) ==
        "only one");

  // Equal seeds, equal choices.
  TemplateSet multi;
  multi.by_task[TaskKind::scene_classification] = {"a", "b", "c"};
  Rng r1(33), r2(33);
  for (int i = 0; i < 20; ++i)
    CHECK(select_instruction(TaskKind::scene_classification, multi, r1) ==
          select_instruction(TaskKind::scene_classification, multi, r2));

  // All templates reachable.
  Rng r3(5);
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i)
    seen.insert(select_instruction(TaskKind::scene_classification, multi, r3));
  CHECK(seen.size() == 3);
}

TEST_CASE("render_instruction slot expansion") {
  CHECK(render_instruction("Classify {regions} now.", {1, 2}) ==
        "Classify <Region 1>, <Region 2> now.");
  CHECK(render_instruction("Labels of {marks}?", {3}) ==
        "Labels of <Mark 3>?");
  CHECK(render_instruction("No slots here.", {1}) == "No slots here.");
  CHECK_THROWS_AS(render_instruction("Bad {slot}.", {1}), SlotError);
}

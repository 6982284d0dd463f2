#include "rsvp/prompt_synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsvp/errors.hpp"

namespace rsvp {

AugmentedBox augment_box_detail(const BBox& b, const AugmentConfig& cfg,
                                Rng& rng, int image_width, int image_height) {
  if (!b.valid()) {
    throw std::invalid_argument("augment_box: invalid input box");
  }
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha) || cfg.min_size < 1.0) {
    throw std::invalid_argument("augment_box: invalid config");
  }
  const double sx = cfg.alpha * b.w;
  const double sy = cfg.alpha * b.h;
  BBox noisy{
      b.x + rng.gaussian(0.0, sx),
      b.y + rng.gaussian(0.0, sy),
      b.w + rng.gaussian(0.0, sx),
      b.h + rng.gaussian(0.0, sy),
  };
  noisy.w = std::max(noisy.w, cfg.min_size);
  noisy.h = std::max(noisy.h, cfg.min_size);

  AugmentedBox out;
  out.pre_clamp = noisy;
  if (cfg.clamp_to_image) {
    ClampResult c = clamp_box(noisy, image_width, image_height);
    out.box = c.box;
    out.degenerate = c.degenerate;
  } else {
    out.box = noisy;
  }
  return out;
}

BBox augment_box(const BBox& b, const AugmentConfig& cfg, Rng& rng,
                 int image_width, int image_height) {
  return augment_box_detail(b, cfg, rng, image_width, image_height).box;
}

std::vector<LabeledPoint> sample_patch_points(const SegmentationMap& seg,
                                              int patch_px, Rng& rng) {
  if (patch_px < 1) {
    throw std::invalid_argument("sample_patch_points: patch_px < 1");
  }
  if (seg.width <= 0 || seg.height <= 0 ||
      seg.class_ids.size() != std::size_t(seg.width) * seg.height) {
    throw std::invalid_argument("sample_patch_points: malformed map");
  }
  std::vector<LabeledPoint> out;
  for (int cy = 0; cy < seg.height; cy += patch_px) {
    const int ch = std::min(patch_px, seg.height - cy);
    for (int cx = 0; cx < seg.width; cx += patch_px) {
      const int cw = std::min(patch_px, seg.width - cx);
      const int px = cx + int(rng.uniform_below(std::uint64_t(cw)));
      const int py = cy + int(rng.uniform_below(std::uint64_t(ch)));
      const int id = seg.class_at(px, py);
      if (id == seg.ignore_id) continue;
      out.push_back({PointPrompt{double(px), double(py)}, seg.class_name(id)});
    }
  }
  return out;
}

bool operator==(const Pixel& a, const Pixel& b) {
  return a.x == b.x && a.y == b.y;
}

std::vector<PointPrompt> sample_mask_points(std::vector<Pixel> mask, int k,
                                            Rng& rng) {
  if (mask.empty()) {
    throw std::invalid_argument("sample_mask_points: empty mask");
  }
  if (k < 1) {
    throw std::invalid_argument("sample_mask_points: k < 1");
  }
  std::sort(mask.begin(), mask.end(), [](const Pixel& a, const Pixel& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  std::vector<PointPrompt> out;
  out.reserve(std::size_t(k));
  if (mask.size() >= std::size_t(k)) {
    // Partial Fisher-Yates: the first k slots end up a uniform sample
    // without replacement.
    for (int i = 0; i < k; ++i) {
      const std::size_t j =
          i + rng.uniform_below(std::uint64_t(mask.size() - i));
      std::swap(mask[i], mask[j]);
      out.push_back(PointPrompt{double(mask[i].x), double(mask[i].y)});
    }
  } else {
    for (int i = 0; i < k; ++i) {
      const Pixel& p = mask[rng.uniform_below(std::uint64_t(mask.size()))];
      out.push_back(PointPrompt{double(p.x), double(p.y)});
    }
  }
  return out;
}

std::vector<Pixel> mask_of_class(const SegmentationMap& seg, int class_id) {
  std::vector<Pixel> out;
  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      if (seg.class_at(x, y) == class_id) out.push_back({x, y});
    }
  }
  return out;
}

BBox freeform_to_box(const FreeFormPrompt& f, int image_width,
                     int image_height) {
  if (f.vertices.empty()) {
    throw std::invalid_argument("freeform_to_box: no vertices");
  }
  double x1 = f.vertices[0].x, x2 = x1;
  double y1 = f.vertices[0].y, y2 = y1;
  for (const PointPrompt& v : f.vertices) {
    x1 = std::min(x1, v.x);
    x2 = std::max(x2, v.x);
    y1 = std::min(y1, v.y);
    y2 = std::max(y2, v.y);
  }
  BBox box{x1, y1, std::max(x2 - x1, 1.0), std::max(y2 - y1, 1.0)};
  return clamp_box(box, image_width, image_height).box;
}

}  // namespace rsvp

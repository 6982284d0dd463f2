#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rsvp/rng.hpp"
#include "rsvp/triple.hpp"

namespace rsvp {

// Size-aware Gaussian box noise. Each of (x, y, w, h) receives independent
// zero-mean noise with standard deviation alpha * w (for x and w) or
// alpha * h (for y and h), so the covariance is proportional to
// diag(w^2, h^2, w^2, h^2).
struct AugmentConfig {
  double alpha = 0.1;
  bool clamp_to_image = true;
  double min_size = 1.0;
};

struct AugmentedBox {
  BBox box;        // after the min-size floor and optional clamp
  BBox pre_clamp;  // after the floor, before clamping
  bool degenerate = false;
};

// Draws 4 gaussians in (x, y, w, h) order (two uniforms each). alpha = 0
// is the identity up to a no-op floor/clamp.
AugmentedBox augment_box_detail(const BBox& b, const AugmentConfig& cfg,
                                Rng& rng, int image_width, int image_height);
BBox augment_box(const BBox& b, const AugmentConfig& cfg, Rng& rng,
                 int image_width, int image_height);

struct LabeledPoint {
  PointPrompt point;
  std::string category;
};

// Tiles the raster into patch_px x patch_px cells (partial cells at the
// right/bottom edges kept), samples one integer pixel uniformly per cell in
// row-major cell order, and labels it by the class at that pixel. Points
// landing on ignore_id are dropped. Throws LegendError when a sampled pixel's
// id is absent from the legend.
std::vector<LabeledPoint> sample_patch_points(const SegmentationMap& seg,
                                              int patch_px, Rng& rng);

struct Pixel {
  int x = 0;
  int y = 0;
};

bool operator==(const Pixel& a, const Pixel& b);

// Uniformly selects k pixels from the mask: without replacement when the mask
// has at least k pixels, with replacement otherwise. The mask is canonically
// ordered by (y, x) before sampling so the result depends only on the set and
// the seed. Throws std::invalid_argument on an empty mask or k < 1.
std::vector<PointPrompt> sample_mask_points(std::vector<Pixel> mask, int k,
                                            Rng& rng);

// All pixels of the map holding class_id.
std::vector<Pixel> mask_of_class(const SegmentationMap& seg, int class_id);

// Axis-aligned bounding box of the vertices, clamped to the image and at
// least 1x1. How free-form strokes become box prompts at inference.
BBox freeform_to_box(const FreeFormPrompt& f, int image_width,
                     int image_height);

}  // namespace rsvp

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rsvp {

// Axis-aligned box in continuous pixel coordinates, origin at the image
// top-left, x rightward, y downward. Stored as top-left corner plus size.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x2() const { return x + w; }
  double y2() const { return y + h; }
  double area() const { return w * h; }
  bool valid() const;
};

bool operator==(const BBox& a, const BBox& b);

struct PointPrompt {
  double x = 0.0;
  double y = 0.0;
};

bool operator==(const PointPrompt& a, const PointPrompt& b);

// User-drawn stroke or polygon, at least one vertex.
struct FreeFormPrompt {
  std::vector<PointPrompt> vertices;
};

bool operator==(const FreeFormPrompt& a, const FreeFormPrompt& b);

enum class PromptKind { box, point, free_form, full_image };

const char* to_string(PromptKind kind);
PromptKind prompt_kind_from_string(const std::string& name);

// One visual prompt of a Triple. `payload` must hold the alternative that
// matches `kind` (box and full_image both carry a BBox); mark ids start at 1
// and are unique within a Triple.
struct VisualPrompt {
  PromptKind kind = PromptKind::box;
  int mark_id = 1;
  std::variant<BBox, PointPrompt, FreeFormPrompt> payload;

  const BBox& box() const;
  const PointPrompt& point() const;
  const FreeFormPrompt& free_form() const;
  bool payload_matches_kind() const;
};

bool operator==(const VisualPrompt& a, const VisualPrompt& b);

VisualPrompt make_box_prompt(int mark_id, const BBox& box);
VisualPrompt make_point_prompt(int mark_id, const PointPrompt& point);
VisualPrompt make_free_form_prompt(int mark_id, FreeFormPrompt free_form);

// The [0, 0, width, height] prompt that turns an image-level task into a
// region task. Always mark_id 1. Throws std::invalid_argument on non-positive
// dimensions.
VisualPrompt full_image_box(int width, int height);

struct ClampResult {
  BBox box;
  // Set when the input had no overlap with the image; the result is then a
  // 1x1 box at the nearest in-bounds corner.
  bool degenerate = false;
};

// Intersects the box with [0,width]x[0,height]. Total: never throws.
ClampResult clamp_box(const BBox& b, int width, int height);

// |a o b| / |a u b| under area measure, in [0,1].
double geometric_iou(const BBox& a, const BBox& b);

}  // namespace rsvp

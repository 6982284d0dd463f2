#include "rsvp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rsvp {

bool BBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

bool operator==(const BBox& a, const BBox& b) {
  return a.x == b.x && a.y == b.y && a.w == b.w && a.h == b.h;
}

bool operator==(const PointPrompt& a, const PointPrompt& b) {
  return a.x == b.x && a.y == b.y;
}

bool operator==(const FreeFormPrompt& a, const FreeFormPrompt& b) {
  return a.vertices == b.vertices;
}

const char* to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::box: return "box";
    case PromptKind::point: return "point";
    case PromptKind::free_form: return "free_form";
    case PromptKind::full_image: return "full_image";
  }
  return "box";
}

PromptKind prompt_kind_from_string(const std::string& name) {
  if (name == "box") return PromptKind::box;
  if (name == "point") return PromptKind::point;
  if (name == "free_form") return PromptKind::free_form;
  if (name == "full_image") return PromptKind::full_image;
  throw std::invalid_argument("unknown prompt kind: " + name);
}

const BBox& VisualPrompt::box() const { return std::get<BBox>(payload); }

const PointPrompt& VisualPrompt::point() const {
  return std::get<PointPrompt>(payload);
}

const FreeFormPrompt& VisualPrompt::free_form() const {
  return std::get<FreeFormPrompt>(payload);
}

bool VisualPrompt::payload_matches_kind() const {
  switch (kind) {
    case PromptKind::box:
    case PromptKind::full_image:
      return std::holds_alternative<BBox>(payload);
    case PromptKind::point:
      return std::holds_alternative<PointPrompt>(payload);
    case PromptKind::free_form:
      return std::holds_alternative<FreeFormPrompt>(payload);
  }
  return false;
}

bool operator==(const VisualPrompt& a, const VisualPrompt& b) {
  return a.kind == b.kind && a.mark_id == b.mark_id && a.payload == b.payload;
}

VisualPrompt make_box_prompt(int mark_id, const BBox& box) {
  return VisualPrompt{PromptKind::box, mark_id, box};
}

VisualPrompt make_point_prompt(int mark_id, const PointPrompt& point) {
  return VisualPrompt{PromptKind::point, mark_id, point};
}

VisualPrompt make_free_form_prompt(int mark_id, FreeFormPrompt free_form) {
  return VisualPrompt{PromptKind::free_form, mark_id, std::move(free_form)};
}

VisualPrompt full_image_box(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("full_image_box: non-positive image size " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  }
  return VisualPrompt{PromptKind::full_image, 1,
                      BBox{0.0, 0.0, double(width), double(height)}};
}

ClampResult clamp_box(const BBox& b, int width, int height) {
  const double wd = double(width);
  const double hd = double(height);
  const double x1 = std::max(b.x, 0.0);
  const double y1 = std::max(b.y, 0.0);
  const double x2 = std::min(b.x2(), wd);
  const double y2 = std::min(b.y2(), hd);
  if (x2 > x1 && y2 > y1) {
    return ClampResult{BBox{x1, y1, x2 - x1, y2 - y1}, false};
  }
  // No overlap: place a 1x1 box at the closest in-bounds position.
  const double cx = std::clamp(b.x, 0.0, std::max(wd - 1.0, 0.0));
  const double cy = std::clamp(b.y, 0.0, std::max(hd - 1.0, 0.0));
  return ClampResult{BBox{cx, cy, 1.0, 1.0}, true};
}

double geometric_iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x2(), b.x2()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y2(), b.y2()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace rsvp

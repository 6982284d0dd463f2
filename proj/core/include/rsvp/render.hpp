#pragma once

#include <string>
#include <vector>

#include "rsvp/image.hpp"
#include "rsvp/triple.hpp"

namespace rsvp {

struct RenderStyle {
  int stroke_width = 2;
  std::vector<Rgb> palette;  // cycled by mark_id; defaults filled by default_style()
  int label_scale = 2;       // integer scale of the 5x7 digit font
  int point_radius = 4;
};

RenderStyle default_style();
void validate(const RenderStyle& s);

// palette[(mark_id - 1) mod |palette|], stable across runs.
Rgb color_for_mark(const RenderStyle& s, int mark_id);

// 5x7 digit font, one 5-bit mask per row, row 0 at the top.
const uint8_t* digit_rows(int digit);
bool glyph_pixel(int digit, int x, int y);

// Pixel rectangle the mark label occupies, after in-bounds clamping.
struct LabelBox {
  int x = 0, y = 0, w = 0, h = 0;
  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
};

LabelBox label_placement(const VisualPrompt& p, const RenderStyle& s,
                         int image_width, int image_height);

// Draws boxes as rectangle outlines (integer rect from rounding the corners,
// stroke growing inward), points as filled discs, free-form strokes as
// polylines, each labeled with its mark_id near the top-left anchor. Prompts
// are drawn in order, later marks over earlier ones; geometry outside the
// raster is clipped. A prompt that misses the raster entirely is skipped
// with a warning. The input image is untouched.
Image render_marks(const Image& image, const std::vector<VisualPrompt>& prompts,
                   const RenderStyle& style,
                   std::vector<std::string>* warnings = nullptr);

// Decode, overlay, re-encode. Deterministic bytes for equal inputs.
std::vector<uint8_t> render_triple(const Triple& t,
                                   const std::vector<uint8_t>& image_png,
                                   const RenderStyle& style,
                                   std::vector<std::string>* warnings = nullptr);

}  // namespace rsvp

#include "rsvp/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsvp/errors.hpp"
#include "rsvp/png_io.hpp"

namespace rsvp {
namespace {

const uint8_t kDigits[10][7] = {
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},  // 0
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},  // 1
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},  // 2
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},  // 3
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},  // 4
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},  // 5
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},  // 6
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},  // 8
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},  // 9
};

constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;

struct IntRect {
  int x0, y0, x1, y1;  // half-open
  int w() const { return x1 - x0; }
  int h() const { return y1 - y0; }
};

int iround(double v) { return static_cast<int>(std::llround(v)); }

IntRect box_rect(const BBox& b) {
  return IntRect{iround(b.x), iround(b.y), iround(b.x2()), iround(b.y2())};
}

bool rect_intersects_image(const IntRect& r, int w, int h) {
  return r.x0 < w && r.x1 > 0 && r.y0 < h && r.y1 > 0 && r.w() > 0 && r.h() > 0;
}

// Outline membership for a stroke growing inward from the rect edges.
bool on_outline(const IntRect& r, int stroke, int px, int py) {
  if (px < r.x0 || px >= r.x1 || py < r.y0 || py >= r.y1) return false;
  return px < r.x0 + stroke || px >= r.x1 - stroke || py < r.y0 + stroke ||
         py >= r.y1 - stroke;
}

void draw_outline(Image& img, const IntRect& r, int stroke, Rgb c) {
  for (int py = std::max(0, r.y0); py < std::min(img.height(), r.y1); ++py)
    for (int px = std::max(0, r.x0); px < std::min(img.width(), r.x1); ++px)
      if (on_outline(r, stroke, px, py)) img.set(px, py, c);
}

void draw_disc(Image& img, int cx, int cy, int radius, Rgb c) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius)
        img.set(cx + dx, cy + dy, c);
}

// Thick Bresenham segment: a stroke x stroke square stamped per line pixel.
void draw_segment(Image& img, int x0, int y0, int x1, int y1, int stroke,
                  Rgb c) {
  int half = stroke / 2;
  auto stamp = [&](int x, int y) {
    for (int dy = 0; dy < stroke; ++dy)
      for (int dx = 0; dx < stroke; ++dx)
        img.set(x - half + dx, y - half + dy, c);
  };
  int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  int x = x0, y = y0;
  while (true) {
    stamp(x, y);
    if (x == x1 && y == y1) break;
    int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

std::vector<int> digits_of(int n) {
  std::vector<int> out;
  if (n == 0) return {0};
  while (n > 0) {
    out.push_back(n % 10);
    n /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

int glyph_block_width(int mark_id, int scale) {
  int n = static_cast<int>(digits_of(mark_id).size());
  return n * kGlyphW * scale + (n - 1) * scale;  // 1 scaled px between digits
}

void draw_label(Image& img, const LabelBox& at, int mark_id, int scale,
                Rgb c) {
  int x = at.x;
  for (int digit : digits_of(mark_id)) {
    for (int gy = 0; gy < kGlyphH; ++gy) {
      for (int gx = 0; gx < kGlyphW; ++gx) {
        if (!glyph_pixel(digit, gx, gy)) continue;
        for (int sy = 0; sy < scale; ++sy)
          for (int sx = 0; sx < scale; ++sx)
            img.set(x + gx * scale + sx, at.y + gy * scale + sy, c);
      }
    }
    x += (kGlyphW + 1) * scale;
  }
}

// Unclamped label anchor for a prompt; the block sits just inside a box's
// top-left corner, beside a point's disc, at a stroke's bounding corner.
std::pair<int, int> label_anchor(const VisualPrompt& p, const RenderStyle& s) {
  switch (p.kind) {
    case PromptKind::box:
    case PromptKind::full_image: {
      IntRect r = box_rect(p.box());
      return {r.x0 + s.stroke_width + 1, r.y0 + s.stroke_width + 1};
    }
    case PromptKind::point: {
      int cx = iround(p.point().x), cy = iround(p.point().y);
      return {cx + s.point_radius + 2, cy + s.point_radius + 2};
    }
    case PromptKind::free_form: {
      const auto& v = p.free_form().vertices;
      double mx = v[0].x, my = v[0].y;
      for (const auto& q : v) {
        mx = std::min(mx, q.x);
        my = std::min(my, q.y);
      }
      return {iround(mx) + s.stroke_width + 1, iround(my) + s.stroke_width + 1};
    }
  }
  return {0, 0};
}

// True when the prompt's footprint misses the raster completely.
bool outside_image(const VisualPrompt& p, const RenderStyle& s, int w, int h) {
  switch (p.kind) {
    case PromptKind::box:
    case PromptKind::full_image:
      return clamp_box(p.box(), w, h).degenerate;
    case PromptKind::point: {
      int cx = iround(p.point().x), cy = iround(p.point().y);
      int r = s.point_radius;
      return cx + r < 0 || cx - r >= w || cy + r < 0 || cy - r >= h;
    }
    case PromptKind::free_form: {
      const auto& v = p.free_form().vertices;
      double x0 = v[0].x, y0 = v[0].y, x1 = v[0].x, y1 = v[0].y;
      for (const auto& q : v) {
        x0 = std::min(x0, q.x);
        y0 = std::min(y0, q.y);
        x1 = std::max(x1, q.x);
        y1 = std::max(y1, q.y);
      }
      // Inflate by the stroke so an axis-aligned (zero-area) stroke still
      // counts as visible.
      double m = s.stroke_width;
      return clamp_box(BBox{x0 - m, y0 - m, (x1 - x0) + 2 * m,
                            (y1 - y0) + 2 * m},
                       w, h)
          .degenerate;
    }
  }
  return true;
}

}  // namespace

RenderStyle default_style() {
  RenderStyle s;
  s.palette = {
      {230, 25, 75},   // red
      {60, 180, 75},   // green
      {255, 225, 25},  // yellow
      {0, 130, 200},   // blue
      {245, 130, 48},  // orange
      {145, 30, 180},  // purple
      {70, 240, 240},  // cyan
      {240, 50, 230},  // magenta
  };
  return s;
}

void validate(const RenderStyle& s) {
  if (s.stroke_width < 1) throw std::invalid_argument("stroke_width must be >= 1");
  if (s.palette.empty()) throw std::invalid_argument("palette must be non-empty");
  if (s.label_scale < 1) throw std::invalid_argument("label_scale must be >= 1");
  if (s.point_radius < 1) throw std::invalid_argument("point_radius must be >= 1");
}

Rgb color_for_mark(const RenderStyle& s, int mark_id) {
  return s.palette[static_cast<size_t>(mark_id - 1) % s.palette.size()];
}

const uint8_t* digit_rows(int digit) {
  if (digit < 0 || digit > 9) throw std::invalid_argument("digit out of range");
  return kDigits[digit];
}

bool glyph_pixel(int digit, int x, int y) {
  if (x < 0 || x >= kGlyphW || y < 0 || y >= kGlyphH) return false;
  return (digit_rows(digit)[y] >> (kGlyphW - 1 - x)) & 1;
}

LabelBox label_placement(const VisualPrompt& p, const RenderStyle& s,
                         int image_width, int image_height) {
  validate(s);
  auto [ax, ay] = label_anchor(p, s);
  LabelBox b;
  b.w = glyph_block_width(p.mark_id, s.label_scale);
  b.h = kGlyphH * s.label_scale;
  b.x = std::clamp(ax, 0, std::max(0, image_width - b.w));
  b.y = std::clamp(ay, 0, std::max(0, image_height - b.h));
  return b;
}

Image render_marks(const Image& image, const std::vector<VisualPrompt>& prompts,
                   const RenderStyle& style,
                   std::vector<std::string>* warnings) {
  validate(style);
  Image out = image;
  for (const auto& p : prompts) {
    if (outside_image(p, style, image.width(), image.height())) {
      if (warnings)
        warnings->push_back("mark " + std::to_string(p.mark_id) +
                            " lies outside the image; skipped");
      continue;
    }
    Rgb c = color_for_mark(style, p.mark_id);
    switch (p.kind) {
      case PromptKind::box:
      case PromptKind::full_image: {
        IntRect r = box_rect(p.box());
        if (rect_intersects_image(r, out.width(), out.height()))
          draw_outline(out, r, style.stroke_width, c);
        break;
      }
      case PromptKind::point:
        draw_disc(out, iround(p.point().x), iround(p.point().y),
                  style.point_radius, c);
        break;
      case PromptKind::free_form: {
        const auto& v = p.free_form().vertices;
        if (v.size() == 1) {
          draw_disc(out, iround(v[0].x), iround(v[0].y), style.stroke_width, c);
        } else {
          for (size_t i = 0; i + 1 < v.size(); ++i)
            draw_segment(out, iround(v[i].x), iround(v[i].y),
                         iround(v[i + 1].x), iround(v[i + 1].y),
                         style.stroke_width, c);
        }
        break;
      }
    }
    LabelBox lb = label_placement(p, style, out.width(), out.height());
    draw_label(out, lb, p.mark_id, style.label_scale, c);
  }
  return out;
}

std::vector<uint8_t> render_triple(const Triple& t,
                                   const std::vector<uint8_t>& image_png,
                                   const RenderStyle& style,
                                   std::vector<std::string>* warnings) {
  validate_triple(t);
  Image img;
  try {
    img = decode_png(image_png);
  } catch (const ParseError& e) {
    throw ParseError("cannot decode '" + t.image_path + "': " + e.what(),
                     e.offset());
  }
  Image overlaid = render_marks(img, t.prompts, style, warnings);
  return encode_png(overlaid);
}

}  // namespace rsvp

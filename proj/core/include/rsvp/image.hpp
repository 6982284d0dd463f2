#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rsvp {

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Plain 8-bit RGB raster, row-major, no padding.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {0, 0, 0})
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0)
      throw std::invalid_argument("image dimensions must be positive");
    pixels_.assign(static_cast<size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool contains(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  Rgb& at(int x, int y) { return pixels_[idx(x, y)]; }
  const Rgb& at(int x, int y) const { return pixels_[idx(x, y)]; }

  // No-op outside the raster; rendering relies on this for clipping.
  void set(int x, int y, Rgb c) {
    if (contains(x, y)) pixels_[idx(x, y)] = c;
  }

  const std::vector<Rgb>& pixels() const { return pixels_; }
  std::vector<Rgb>& pixels() { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  size_t idx(int x, int y) const {
    if (!contains(x, y)) throw std::out_of_range("pixel out of range");
    return static_cast<size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

}  // namespace rsvp

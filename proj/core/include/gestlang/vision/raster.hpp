#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gestlang::vision {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Row-major 8-bit RGB image, at least 64x64.
class FrameRaster {
 public:
  static constexpr int kMinSide = 64;

  // Throws Error(kInvalidRaster) below the minimum size or on a pixel-count
  // mismatch.
  FrameRaster(int width, int height, Rgb fill = {});
  FrameRaster(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }

  Rgb at(int x, int y) const {
    const auto* p = &pixels_[3 * (static_cast<std::size_t>(y) * width_ + x)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) {
    auto* p = &pixels_[3 * (static_cast<std::size_t>(y) * width_ + x)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  std::span<const std::uint8_t> bytes() const { return pixels_; }
  std::span<std::uint8_t> bytes() { return pixels_; }

  friend bool operator==(const FrameRaster&, const FrameRaster&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1, row-major

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v = true) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }
  long area() const { return static_cast<long>(w) * h; }

  friend bool operator==(const Box&, const Box&) = default;
};

bool intersects(const Box& a, const Box& b);
double iou(const Box& a, const Box& b);

// 32x32x3 values in [0,1], stored height x width x channel.
struct Patch {
  static constexpr int kSize = 32;
  static constexpr int kChannels = 3;
  static constexpr int kValues = kSize * kSize * kChannels;

  std::array<float, kValues> values{};

  float at(int x, int y, int c) const { return values[(y * kSize + x) * kChannels + c]; }
  float& at(int x, int y, int c) { return values[(y * kSize + x) * kChannels + c]; }

  friend bool operator==(const Patch&, const Patch&) = default;
};

}  // namespace gestlang::vision

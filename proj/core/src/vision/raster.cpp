#include "gestlang/vision/raster.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gestlang/errors.hpp"

namespace gestlang::vision {

FrameRaster::FrameRaster(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < kMinSide || height < kMinSide) {
    throw Error(ErrorKind::kInvalidRaster, "frame must be at least 64x64, got " + std::to_string(width) +
                                               "x" + std::to_string(height));
  }
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

FrameRaster::FrameRaster(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), pixels_(std::move(rgb)) {
  if (width < kMinSide || height < kMinSide) {
    throw Error(ErrorKind::kInvalidRaster, "frame must be at least 64x64");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorKind::kInvalidRaster, "pixel buffer size does not match frame dimensions");
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

bool intersects(const Box& a, const Box& b) {
  return a.x < b.right() && b.x < a.right() && a.y < b.bottom() && b.y < a.bottom();
}

double iou(const Box& a, const Box& b) {
  const int ix = std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const int iy = std::max(0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = static_cast<double>(ix) * iy;
  const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace gestlang::vision

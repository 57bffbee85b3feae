#include "gestlang/vision/segmentation.hpp"

#include <algorithm>
#include <vector>

#include "gestlang/errors.hpp"

namespace gestlang::vision {

Hsv rgb_to_hsv(Rgb c) {
  const double r = c.r / 255.0;
  const double g = c.g / 255.0;
  const double b = c.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? d / mx : 0.0;
  if (d <= 0.0) return out;
  if (mx == r) {
    out.h = 60.0 * (g - b) / d;
  } else if (mx == g) {
    out.h = 60.0 * ((b - r) / d + 2.0);
  } else {
    out.h = 60.0 * ((r - g) / d + 4.0);
  }
  if (out.h < 0.0) out.h += 360.0;
  return out;
}

bool HsvThreshold::contains(const Hsv& p) const {
  const bool hue_ok = hue_wraps ? (p.h >= hue_min || p.h <= hue_max) : (p.h >= hue_min && p.h <= hue_max);
  return hue_ok && p.s >= sat_min && p.s <= sat_max && p.v >= val_min && p.v <= val_max;
}

bool HsvThreshold::valid() const {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  const bool hue_range = hue_min >= 0.0 && hue_min < 360.0 && hue_max >= 0.0 && hue_max < 360.0;
  return hue_range && (hue_wraps || hue_min <= hue_max) && unit(sat_min) && unit(sat_max) &&
         unit(val_min) && unit(val_max) && sat_min <= sat_max && val_min <= val_max;
}

FrameRaster box_blur(const FrameRaster& frame, int radius) {
  if (radius < 0) throw Error(ErrorKind::kInvalidArgument, "blur radius must be non-negative");
  if (radius == 0) return frame;
  const int w = frame.width();
  const int h = frame.height();
  const int n = 2 * radius + 1;
  auto src = frame.bytes();

  // Horizontal then vertical running sums over edge-clamped windows.
  std::vector<int> tmp(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int c = 0; c < 3; ++c) {
      auto px = [&](int x) { return static_cast<int>(src[(static_cast<std::size_t>(y) * w + std::clamp(x, 0, w - 1)) * 3 + c]); };
      int sum = 0;
      for (int k = -radius; k <= radius; ++k) sum += px(k);
      for (int x = 0; x < w; ++x) {
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = sum;
        sum += px(x + radius + 1) - px(x - radius);
      }
    }
  }
  FrameRaster out(w, h);
  auto dst = out.bytes();
  const int denom = n * n;
  for (int x = 0; x < w; ++x) {
    for (int c = 0; c < 3; ++c) {
      auto px = [&](int y) { return tmp[(static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + x) * 3 + c]; };
      int sum = 0;
      for (int k = -radius; k <= radius; ++k) sum += px(k);
      for (int y = 0; y < h; ++y) {
        dst[(static_cast<std::size_t>(y) * w + x) * 3 + c] = static_cast<std::uint8_t>((sum + denom / 2) / denom);
        sum += px(y + radius + 1) - px(y - radius);
      }
    }
  }
  return out;
}

BinaryMask segment_skin(const FrameRaster& frame, const HsvThreshold& th, int blur_radius) {
  if (!th.valid()) throw Error(ErrorKind::kInvalidArgument, "invalid HSV threshold");
  const FrameRaster blurred = box_blur(frame, blur_radius);
  BinaryMask mask(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      if (th.contains(rgb_to_hsv(blurred.at(x, y)))) mask.set(x, y);
    }
  }
  return mask;
}

FrameRaster mask_to_frame(const BinaryMask& mask, Rgb skin) {
  FrameRaster out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) out.set(x, y, skin);
    }
  }
  return out;
}

}  // namespace gestlang::vision

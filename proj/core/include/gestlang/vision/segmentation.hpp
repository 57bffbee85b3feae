#pragma once

#include "gestlang/vision/raster.hpp"

namespace gestlang::vision {

struct Hsv {
  double h = 0.0;  // degrees [0,360)
  double s = 0.0;  // [0,1]
  double v = 0.0;  // [0,1]
};

Hsv rgb_to_hsv(Rgb c);

// Skin band. With hue_wraps set, the hue range is [hue_min,360) u [0,hue_max].
struct HsvThreshold {
  double hue_min = 0.0;
  double hue_max = 50.0;
  double sat_min = 0.23;
  double sat_max = 0.68;
  double val_min = 0.35;
  double val_max = 1.0;
  bool hue_wraps = false;

  bool contains(const Hsv& hsv) const;
  bool valid() const;
};

inline constexpr int kDefaultBlurRadius = 2;

// Box blur of the given radius (edge-clamped, rounded to 8 bits).
FrameRaster box_blur(const FrameRaster& frame, int radius);

// Mask bit set iff the blurred pixel lies inside the band. Throws
// Error(kInvalidArgument) for a negative radius or an invalid band.
BinaryMask segment_skin(const FrameRaster& frame, const HsvThreshold& th, int blur_radius);

// Paints mask bits in `skin` on a black background (minimum frame size applies).
FrameRaster mask_to_frame(const BinaryMask& mask, Rgb skin);

}  // namespace gestlang::vision

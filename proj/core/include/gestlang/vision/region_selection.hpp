#pragma once

#include <optional>
#include <vector>

#include "gestlang/vision/contour.hpp"
#include "gestlang/vision/segmentation.hpp"
#include "gestlang/vocabulary.hpp"

namespace gestlang::vision {

struct RegionBox {
  Box box;
  double score = 0.0;  // signature distance to the closest bank contour; lower is better
  friend bool operator==(const RegionBox&, const RegionBox&) = default;
};

// Location and scale of the hands found most recently, aged per side. While
// both sides are live, candidates far from both cached boxes are treated as
// outliers. A side missing for more than max_age frames expires, which turns
// the filter off until it is found again.
struct RegionCache {
  std::optional<RegionBox> left;
  std::optional<RegionBox> right;
  int left_age = 0;  // frames since the side was last selected
  int right_age = 0;
  int max_age = 5;
  double max_drift = 60.0;       // px between box centres
  double max_scale_ratio = 2.0;  // of sqrt(box area); an open hand is about 1.7x a fist

  bool live_left() const { return left && left_age <= max_age; }
  bool live_right() const { return right && right_age <= max_age; }
  bool valid() const { return live_left() || live_right(); }
  bool filtering() const { return live_left() && live_right(); }
  friend bool operator==(const RegionCache&, const RegionCache&) = default;
};

struct BankEntry {
  GestureClass gesture;
  ContourFeatures features;
};
using ContourBank = std::vector<BankEntry>;

struct RegionOptions {
  HsvThreshold threshold;
  int blur_radius = kDefaultBlurRadius;
  double min_area_fraction = 0.005;  // of frame area
};

struct HandRegion {
  RegionBox region;
  ContourFeatures contour;
  GestureClass closest;  // bank entry with the lowest distance
};

struct RegionSelection {
  std::optional<HandRegion> left;
  std::optional<HandRegion> right;
  RegionCache cache;
};

RegionSelection select_hand_regions(const FrameRaster& frame, const RegionCache& cache,
                                    const ContourBank& bank, const RegionOptions& options = {});

struct SelectedBoxes {
  std::optional<RegionBox> left;
  std::optional<RegionBox> right;
  RegionCache cache;
};

SelectedBoxes select_regions(const FrameRaster& frame, const RegionCache& cache, const ContourBank& bank,
                             const RegionOptions& options = {});

// Nearest bank entry by signature distance.
std::pair<GestureClass, double> closest_in_bank(const ContourBank& bank, const MomentSignature& sig);

// Bilinear resize of the boxed region to 32x32, values in [0,1].
// Error(kInvalidRegion) when w or h < 2 or the box leaves the frame.
Patch crop_patch(const FrameRaster& frame, const Box& box);

// Box grown by `fraction` of its size on each side, clipped to the frame.
Box pad_box(const Box& box, double fraction, int frame_width, int frame_height);

}  // namespace gestlang::vision

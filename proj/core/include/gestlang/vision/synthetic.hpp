#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "gestlang/vision/region_selection.hpp"
#include "gestlang/vocabulary.hpp"

namespace gestlang::vision {

struct HandPlacement {
  GestureClass gesture = GestureClass::kDigit0;
  double center_x = 0.0;  // px, palm centre
  double center_y = 0.0;
  double scale = 1.0;     // 1.0 = nominal glyph (about 110 px tall)
  double rotation_deg = 0.0;
  int tone = 0;           // skin tone index, wraps
};

// Skin-coloured blob that is not one of the two tracked hands: an ellipse,
// or with `glyph` set a bystander hand drawn at `glyph_scale` (radii unused).
struct Distractor {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius_x = 20.0;
  double radius_y = 20.0;
  std::optional<GestureClass> glyph;
  double glyph_scale = 1.0;
};

struct SceneSpec {
  int width = 640;
  int height = 480;
  std::optional<HandPlacement> left;
  std::optional<HandPlacement> right;
  std::vector<Distractor> distractors;
  double noise_sigma = 0.0;  // additive Gaussian, in units of full scale
  bool clutter = false;      // non-skin background shapes
  std::uint64_t seed = 0;
};

struct RenderedScene {
  FrameRaster frame;
  std::optional<Box> left_box;   // exact extent of the drawn glyph
  std::optional<Box> right_box;
};

// Deterministic in `scene` (including its seed). Throws Error(kInvalidScene)
// when a placement centre lies outside the frame, the glyph boxes overlap,
// or the left hand is not left of the right hand.
RenderedScene render_synthetic_frame(const SceneSpec& scene);

// Canonical upright glyph of each class, rendered alone and segmented.
ContourBank build_contour_bank(const RegionOptions& options = {});

// Augmented single-glyph patch for classifier datasets: rotation +-20 deg,
// scale 0.8-1.2, noise, clutter, box jitter.
Patch render_training_patch(GestureClass gesture, std::uint64_t seed);

// Padding applied around a hand box before cropping, in the pipeline and in
// training data alike.
inline constexpr double kPatchPadding = 0.1;

// Per-frame scene for a gesture-pair stream: hands near fixed left/right
// anchors with small seeded jitter in position, scale and rotation. An absent
// pair gives an empty scene.
struct VideoOptions {
  int width = 640;
  int height = 480;
  double noise_sigma = 0.02;
  bool clutter = false;
  double jitter_px = 6.0;
  double jitter_rotation_deg = 8.0;
  int tone = 0;
};

SceneSpec scene_for_pair(const std::optional<GesturePair>& pair, const VideoOptions& options, std::uint64_t seed);

nlohmann::json to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const nlohmann::json& j);

}  // namespace gestlang::vision

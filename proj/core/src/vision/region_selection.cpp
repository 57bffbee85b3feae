#include "gestlang/vision/region_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gestlang/errors.hpp"

namespace gestlang::vision {
namespace {

bool consistent_with(const Box& candidate, const RegionBox& cached, const RegionCache& cache) {
  const double drift = std::hypot(candidate.center_x() - cached.box.center_x(),
                                  candidate.center_y() - cached.box.center_y());
  if (drift > cache.max_drift) return false;
  const double a = std::sqrt(static_cast<double>(candidate.area()));
  const double b = std::sqrt(static_cast<double>(cached.box.area()));
  if (a <= 0.0 || b <= 0.0) return false;
  return std::max(a / b, b / a) <= cache.max_scale_ratio;
}

}  // namespace

std::pair<GestureClass, double> closest_in_bank(const ContourBank& bank, const MomentSignature& sig) {
  std::pair<GestureClass, double> best{GestureClass::kDigit0, std::numeric_limits<double>::infinity()};
  for (const auto& e : bank) {
    const double d = signature_distance(sig, e.features.moment_signature);
    if (d < best.second) best = {e.gesture, d};
  }
  return best;
}

RegionSelection select_hand_regions(const FrameRaster& frame, const RegionCache& cache,
                                    const ContourBank& bank, const RegionOptions& options) {
  const BinaryMask mask = segment_skin(frame, options.threshold, options.blur_radius);
  const double min_area = std::max(1.0, options.min_area_fraction * frame.width() * frame.height());

  std::vector<HandRegion> candidates;
  for (auto& f : extract_contour_features(mask, min_area)) {
    if (cache.filtering()) {
      if (!consistent_with(f.bbox, *cache.left, cache) && !consistent_with(f.bbox, *cache.right, cache)) continue;
    }
    auto [gesture, score] = closest_in_bank(bank, f.moment_signature);
    candidates.push_back({RegionBox{f.bbox, score}, std::move(f), gesture});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const HandRegion& a, const HandRegion& b) { return a.region.score < b.region.score; });

  std::vector<HandRegion> chosen;
  for (auto& c : candidates) {
    if (chosen.size() == 2) break;
    if (!chosen.empty() && intersects(chosen.front().region.box, c.region.box)) continue;
    chosen.push_back(std::move(c));
  }

  RegionSelection out;
  out.cache = cache;
  ++out.cache.left_age;
  ++out.cache.right_age;
  if (chosen.empty()) return out;
  if (chosen.size() == 2) {
    if (chosen[0].region.box.center_x() > chosen[1].region.box.center_x()) std::swap(chosen[0], chosen[1]);
    out.left = std::move(chosen[0]);
    out.right = std::move(chosen[1]);
  } else if (chosen[0].region.box.center_x() < frame.width() / 2.0) {
    out.left = std::move(chosen[0]);
  } else {
    out.right = std::move(chosen[0]);
  }
  // A hand missing this frame keeps its previous entry while it ages.
  if (out.left) {
    out.cache.left = out.left->region;
    out.cache.left_age = 0;
  }
  if (out.right) {
    out.cache.right = out.right->region;
    out.cache.right_age = 0;
  }
  return out;
}

SelectedBoxes select_regions(const FrameRaster& frame, const RegionCache& cache, const ContourBank& bank,
                             const RegionOptions& options) {
  auto sel = select_hand_regions(frame, cache, bank, options);
  SelectedBoxes out;
  if (sel.left) out.left = sel.left->region;
  if (sel.right) out.right = sel.right->region;
  out.cache = std::move(sel.cache);
  return out;
}

Patch crop_patch(const FrameRaster& frame, const Box& box) {
  if (box.w < 2 || box.h < 2) throw Error(ErrorKind::kInvalidRegion, "region smaller than 2x2");
  if (box.x < 0 || box.y < 0 || box.right() > frame.width() || box.bottom() > frame.height()) {
    throw Error(ErrorKind::kInvalidRegion, "region outside frame");
  }
  Patch patch;
  const double sx = static_cast<double>(box.w) / Patch::kSize;
  const double sy = static_cast<double>(box.h) / Patch::kSize;
  for (int j = 0; j < Patch::kSize; ++j) {
    const double fy = std::clamp(box.y + (j + 0.5) * sy - 0.5, double(box.y), double(box.bottom() - 1));
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, box.bottom() - 1);
    const double wy = fy - y0;
    for (int i = 0; i < Patch::kSize; ++i) {
      const double fx = std::clamp(box.x + (i + 0.5) * sx - 0.5, double(box.x), double(box.right() - 1));
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, box.right() - 1);
      const double wx = fx - x0;
      const Rgb c00 = frame.at(x0, y0), c10 = frame.at(x1, y0), c01 = frame.at(x0, y1), c11 = frame.at(x1, y1);
      auto mix = [&](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
        const double top = a * (1.0 - wx) + b * wx;
        const double bottom = c * (1.0 - wx) + d * wx;
        return static_cast<float>((top * (1.0 - wy) + bottom * wy) / 255.0);
      };
      patch.at(i, j, 0) = mix(c00.r, c10.r, c01.r, c11.r);
      patch.at(i, j, 1) = mix(c00.g, c10.g, c01.g, c11.g);
      patch.at(i, j, 2) = mix(c00.b, c10.b, c01.b, c11.b);
    }
  }
  return patch;
}

Box pad_box(const Box& box, double fraction, int frame_width, int frame_height) {
  const int px = static_cast<int>(std::lround(box.w * fraction));
  const int py = static_cast<int>(std::lround(box.h * fraction));
  const int x0 = std::max(0, box.x - px);
  const int y0 = std::max(0, box.y - py);
  const int x1 = std::min(frame_width, box.right() + px);
  const int y1 = std::min(frame_height, box.bottom() + py);
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace gestlang::vision

#include "gestlang/vision/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <variant>

#include "gestlang/errors.hpp"

namespace gestlang::vision {
namespace {

// Glyph geometry in palm-relative units, y pointing down the image. One unit
// is kPixelsPerUnit px at scale 1.
constexpr double kPixelsPerUnit = 55.0;

struct Ellipse {
  double cx, cy, rx, ry;
};
struct Capsule {
  double ax, ay, bx, by, r;
};
struct Ring {
  double cx, cy, outer, inner;
};
using Primitive = std::variant<Ellipse, Capsule, Ring>;
using Glyph = std::vector<Primitive>;

bool contains(const Primitive& prim, double x, double y) {
  return std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Ellipse>) {
          const double dx = (x - p.cx) / p.rx, dy = (y - p.cy) / p.ry;
          return dx * dx + dy * dy <= 1.0;
        } else if constexpr (std::is_same_v<T, Capsule>) {
          const double vx = p.bx - p.ax, vy = p.by - p.ay;
          const double t = std::clamp(((x - p.ax) * vx + (y - p.ay) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
          const double dx = x - (p.ax + t * vx), dy = y - (p.ay + t * vy);
          return dx * dx + dy * dy <= p.r * p.r;
        } else {
          const double d2 = (x - p.cx) * (x - p.cx) + (y - p.cy) * (y - p.cy);
          return d2 <= p.outer * p.outer && d2 >= p.inner * p.inner;
        }
      },
      prim);
}

std::array<double, 4> bounds(const Primitive& prim) {
  return std::visit(
      [](const auto& p) -> std::array<double, 4> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Ellipse>) {
          return {p.cx - p.rx, p.cy - p.ry, p.cx + p.rx, p.cy + p.ry};
        } else if constexpr (std::is_same_v<T, Capsule>) {
          return {std::min(p.ax, p.bx) - p.r, std::min(p.ay, p.by) - p.r, std::max(p.ax, p.bx) + p.r,
                  std::max(p.ay, p.by) + p.r};
        } else {
          return {p.cx - p.outer, p.cy - p.outer, p.cx + p.outer, p.cy + p.outer};
        }
      },
      prim);
}

constexpr double kFinger = 0.11;
const Ellipse kPalm{0.0, 0.0, 0.5, 0.6};
const Ellipse kFistPalm{0.0, -0.05, 0.55, 0.58};
const Capsule kKnuckles{-0.38, -0.5, 0.38, -0.5, 0.14};
const Capsule kIndex{-0.3, -0.35, -0.38, -1.25, kFinger};
const Capsule kMiddle{-0.1, -0.4, -0.1, -1.35, kFinger};
const Capsule kRing{0.1, -0.4, 0.15, -1.28, kFinger};
const Capsule kPinky{0.3, -0.35, 0.42, -1.05, kFinger * 0.9};
const Capsule kThumbOpen{-0.4, 0.0, -0.95, -0.45, kFinger * 1.1};

Glyph glyph_for(GestureClass g) {
  using G = GestureClass;
  switch (g) {
    case G::kDigit0: return {kFistPalm, kKnuckles};
    case G::kDigit1: return {kPalm, kIndex};
    case G::kDigit2: return {kPalm, Capsule{-0.3, -0.35, -0.5, -1.22, kFinger}, Capsule{-0.05, -0.4, 0.02, -1.35, kFinger}};
    case G::kDigit3: return {kPalm, kIndex, kMiddle, kRing};
    case G::kDigit4: return {kPalm, kIndex, kMiddle, kRing, kPinky};
    case G::kDigit5: return {kPalm, kIndex, kMiddle, kRing, kPinky, kThumbOpen};
    case G::kLeft:
      return {kFistPalm, kKnuckles, Capsule{-0.3, -0.3, -1.4, -0.36, kFinger}, Capsule{-0.1, -0.55, -0.05, -0.85, kFinger}};
    case G::kRight:
      return {kFistPalm, kKnuckles, Capsule{0.3, -0.3, 1.4, -0.36, kFinger}, Capsule{0.1, -0.55, 0.05, -0.85, kFinger}};
    case G::kPic: return {kPalm, kIndex, Capsule{-0.4, 0.1, -1.15, 0.05, kFinger * 1.1}};
    case G::kOk:
      return {kPalm, kMiddle, kRing, kPinky, Ring{-0.58, -0.78, 0.3, 0.14},
              Capsule{-0.35, -0.3, -0.5, -0.55, kFinger}};
  }
  return {kPalm};
}

constexpr std::array<Rgb, 4> kSkinTones = {Rgb{224, 172, 140}, Rgb{210, 150, 115}, Rgb{235, 190, 160},
                                           Rgb{198, 134, 100}};
constexpr std::array<Rgb, 5> kClutterColors = {Rgb{30, 90, 60}, Rgb{40, 70, 110}, Rgb{70, 70, 80},
                                               Rgb{20, 110, 120}, Rgb{90, 100, 60}};

Rgb shade(Rgb c, double f) {
  auto s = [&](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v * f), 0L, 255L)); };
  return {s(c.r), s(c.g), s(c.b)};
}

struct Coverage {
  std::vector<std::pair<Point, double>> pixels;  // pixel + shading factor
  std::optional<Box> box;
};

Coverage rasterize_hand(const HandPlacement& h, int width, int height) {
  const Glyph glyph = glyph_for(h.gesture);
  const double s = kPixelsPerUnit * h.scale;
  const double th = h.rotation_deg * M_PI / 180.0;
  const double c = std::cos(th), sn = std::sin(th);

  double gx0 = 1e9, gy0 = 1e9, gx1 = -1e9, gy1 = -1e9;
  for (const auto& p : glyph) {
    auto b = bounds(p);
    gx0 = std::min(gx0, b[0]);
    gy0 = std::min(gy0, b[1]);
    gx1 = std::max(gx1, b[2]);
    gy1 = std::max(gy1, b[3]);
  }
  const double radius = s * std::max({std::hypot(gx0, gy0), std::hypot(gx1, gy0), std::hypot(gx0, gy1),
                                      std::hypot(gx1, gy1)}) + 2.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(h.center_x - radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(h.center_y - radius)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(h.center_x + radius)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(h.center_y + radius)));

  Coverage cov;
  int bx0 = width, by0 = height, bx1 = -1, by1 = -1;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - h.center_x, dy = y + 0.5 - h.center_y;
      // Inverse rotation into glyph space.
      const double gx = (c * dx + sn * dy) / s;
      const double gy = (-sn * dx + c * dy) / s;
      bool in = false;
      for (const auto& p : glyph) {
        if (contains(p, gx, gy)) {
          in = true;
          break;
        }
      }
      if (!in) continue;
      const double f = 1.0 - 0.08 * std::clamp((gy + 1.4) / 2.0, 0.0, 1.0);
      cov.pixels.push_back({{x, y}, f});
      bx0 = std::min(bx0, x);
      by0 = std::min(by0, y);
      bx1 = std::max(bx1, x);
      by1 = std::max(by1, y);
    }
  }
  if (bx1 >= 0) cov.box = Box{bx0, by0, bx1 - bx0 + 1, by1 - by0 + 1};
  return cov;
}

void paint_background(FrameRaster& frame, bool clutter, std::mt19937_64& rng) {
  const int w = frame.width(), h = frame.height();
  for (int y = 0; y < h; ++y) {
    const double t = static_cast<double>(y) / h;
    const Rgb c{static_cast<std::uint8_t>(14 + 10 * t), static_cast<std::uint8_t>(44 + 16 * t),
                static_cast<std::uint8_t>(62 + 10 * t)};
    for (int x = 0; x < w; ++x) frame.set(x, y, c);
  }
  if (!clutter) return;
  std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h), ur(0.03, 0.15);
  std::uniform_int_distribution<std::size_t> pick(0, kClutterColors.size() - 1);
  for (int i = 0; i < 6; ++i) {
    const double cx = ux(rng), cy = uy(rng);
    const double rx = ur(rng) * w, ry = ur(rng) * h;
    const Rgb col = kClutterColors[pick(rng)];
    for (int y = std::max(0, int(cy - ry)); y < std::min(h, int(cy + ry) + 1); ++y) {
      for (int x = std::max(0, int(cx - rx)); x < std::min(w, int(cx + rx) + 1); ++x) {
        const double dx = (x - cx) / rx, dy = (y - cy) / ry;
        if (dx * dx + dy * dy <= 1.0) frame.set(x, y, col);
      }
    }
  }
}

void add_noise(FrameRaster& frame, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> n(0.0, sigma * 255.0);
  for (auto& b : frame.bytes()) {
    b = static_cast<std::uint8_t>(std::clamp(std::lround(b + n(rng)), 0L, 255L));
  }
}

void check_placement(const HandPlacement& h, const SceneSpec& s) {
  if (h.center_x < 0 || h.center_y < 0 || h.center_x >= s.width || h.center_y >= s.height) {
    throw Error(ErrorKind::kInvalidScene, "hand placement outside frame");
  }
  if (!(h.scale > 0.0)) throw Error(ErrorKind::kInvalidScene, "hand scale must be positive");
}

}  // namespace

RenderedScene render_synthetic_frame(const SceneSpec& scene) {
  if (scene.left) check_placement(*scene.left, scene);
  if (scene.right) check_placement(*scene.right, scene);
  if (scene.left && scene.right && scene.left->center_x >= scene.right->center_x) {
    throw Error(ErrorKind::kInvalidScene, "left hand must be left of the right hand");
  }

  std::optional<Coverage> left, right;
  if (scene.left) left = rasterize_hand(*scene.left, scene.width, scene.height);
  if (scene.right) right = rasterize_hand(*scene.right, scene.width, scene.height);
  if (left && right && left->box && right->box && intersects(*left->box, *right->box)) {
    throw Error(ErrorKind::kInvalidScene, "left and right glyphs overlap");
  }

  std::mt19937_64 rng(scene.seed);
  RenderedScene out{FrameRaster(scene.width, scene.height), std::nullopt, std::nullopt};
  paint_background(out.frame, scene.clutter, rng);

  for (const auto& d : scene.distractors) {
    const Rgb col = kSkinTones[1];
    if (d.glyph) {
      const HandPlacement h{*d.glyph, d.center_x, d.center_y, d.glyph_scale, 0.0, 1};
      for (const auto& [p, f] : rasterize_hand(h, scene.width, scene.height).pixels) {
        out.frame.set(p.x, p.y, shade(col, f));
      }
      continue;
    }
    for (int y = std::max(0, int(d.center_y - d.radius_y)); y < std::min(scene.height, int(d.center_y + d.radius_y) + 1); ++y) {
      for (int x = std::max(0, int(d.center_x - d.radius_x)); x < std::min(scene.width, int(d.center_x + d.radius_x) + 1); ++x) {
        const double dx = (x + 0.5 - d.center_x) / d.radius_x, dy = (y + 0.5 - d.center_y) / d.radius_y;
        if (dx * dx + dy * dy <= 1.0) out.frame.set(x, y, col);
      }
    }
  }

  auto paint = [&](const Coverage& cov, const HandPlacement& h) {
    const Rgb tone = kSkinTones[static_cast<std::size_t>(std::abs(h.tone)) % kSkinTones.size()];
    for (const auto& [p, f] : cov.pixels) out.frame.set(p.x, p.y, shade(tone, f));
  };
  if (left) {
    paint(*left, *scene.left);
    out.left_box = left->box;
  }
  if (right) {
    paint(*right, *scene.right);
    out.right_box = right->box;
  }
  add_noise(out.frame, scene.noise_sigma, rng);
  return out;
}

ContourBank build_contour_bank(const RegionOptions& options) {
  ContourBank bank;
  for (auto g : kAllGestures) {
    SceneSpec s;
    s.width = 320;
    s.height = 320;
    s.left = HandPlacement{g, 160.0, 170.0, 1.0, 0.0, 0};
    auto scene = render_synthetic_frame(s);
    auto mask = segment_skin(scene.frame, options.threshold, options.blur_radius);
    auto features = extract_contour_features(mask, 1.0);
    auto best = std::max_element(features.begin(), features.end(),
                                 [](const auto& a, const auto& b) { return a.area < b.area; });
    if (best == features.end()) throw Error(ErrorKind::kInvalidScene, "bank glyph did not segment");
    bank.push_back({g, std::move(*best)});
  }
  return bank;
}

Patch render_training_patch(GestureClass gesture, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rot(-20.0, 20.0), scl(0.8, 1.2), off(-8.0, 8.0), sig(0.0, 0.08);
  std::uniform_int_distribution<int> tone(0, static_cast<int>(kSkinTones.size()) - 1), jitter(-3, 3);
  std::bernoulli_distribution clutter(0.5);

  SceneSpec s;
  s.width = 192;
  s.height = 192;
  const double rotation = rot(rng), scale = scl(rng);
  const double ox = off(rng), oy = off(rng);
  const int t = tone(rng);
  s.left = HandPlacement{gesture, 96.0 + ox, 106.0 + oy, scale, rotation, t};
  s.noise_sigma = sig(rng);
  s.clutter = clutter(rng);
  s.seed = rng();
  auto scene = render_synthetic_frame(s);
  Box b = *scene.left_box;
  const int jx0 = jitter(rng), jy0 = jitter(rng), jx1 = jitter(rng), jy1 = jitter(rng);
  b = Box{b.x + jx0, b.y + jy0, b.w - jx0 + jx1, b.h - jy0 + jy1};
  b = pad_box(b, kPatchPadding, s.width, s.height);
  b.x = std::max(0, b.x);
  b.y = std::max(0, b.y);
  b.w = std::min(b.w, s.width - b.x);
  b.h = std::min(b.h, s.height - b.y);
  return crop_patch(scene.frame, b);
}

SceneSpec scene_for_pair(const std::optional<GesturePair>& pair, const VideoOptions& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> j(-1.0, 1.0);
  SceneSpec s;
  s.width = o.width;
  s.height = o.height;
  s.noise_sigma = o.noise_sigma;
  s.clutter = o.clutter;
  s.seed = rng();
  if (!pair) return s;
  auto place = [&](GestureClass g, double ax) {
    const double x = ax + o.jitter_px * j(rng);
    const double y = 0.55 * o.height + o.jitter_px * j(rng);
    const double scale = (o.height / 480.0) * (1.0 + 0.05 * j(rng));
    return HandPlacement{g, x, y, scale, o.jitter_rotation_deg * j(rng), o.tone};
  };
  s.left = place(pair->left, 0.28 * o.width);
  s.right = place(pair->right, 0.72 * o.width);
  return s;
}

nlohmann::json to_json(const SceneSpec& s) {
  using nlohmann::json;
  auto hand = [](const HandPlacement& h) {
    return json{{"gesture", std::string(to_string(h.gesture))}, {"x", h.center_x}, {"y", h.center_y},
                {"scale", h.scale}, {"rotation_deg", h.rotation_deg}, {"tone", h.tone}};
  };
  json j{{"width", s.width}, {"height", s.height}, {"noise_sigma", s.noise_sigma},
         {"clutter", s.clutter}, {"seed", s.seed}};
  j["left"] = s.left ? hand(*s.left) : json(nullptr);
  j["right"] = s.right ? hand(*s.right) : json(nullptr);
  j["distractors"] = json::array();
  for (const auto& d : s.distractors) {
    json e{{"x", d.center_x}, {"y", d.center_y}, {"rx", d.radius_x}, {"ry", d.radius_y}};
    if (d.glyph) {
      e["glyph"] = std::string(to_string(*d.glyph));
      e["glyph_scale"] = d.glyph_scale;
    }
    j["distractors"].push_back(std::move(e));
  }
  return j;
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  try {
    SceneSpec s;
    s.width = j.value("width", 640);
    s.height = j.value("height", 480);
    s.noise_sigma = j.value("noise_sigma", 0.0);
    s.clutter = j.value("clutter", false);
    s.seed = j.value("seed", std::uint64_t{0});
    auto hand = [](const nlohmann::json& h) {
      auto g = parse_gesture(h.at("gesture").get<std::string>());
      if (!g) throw Error(ErrorKind::kFormat, "unknown gesture " + h.at("gesture").get<std::string>());
      return HandPlacement{*g, h.at("x").get<double>(), h.at("y").get<double>(), h.value("scale", 1.0),
                           h.value("rotation_deg", 0.0), h.value("tone", 0)};
    };
    if (j.contains("left") && !j["left"].is_null()) s.left = hand(j["left"]);
    if (j.contains("right") && !j["right"].is_null()) s.right = hand(j["right"]);
    if (j.contains("distractors")) {
      for (const auto& d : j["distractors"]) {
        Distractor x{d.at("x").get<double>(), d.at("y").get<double>(), d.value("rx", 20.0), d.value("ry", 20.0),
                     std::nullopt, d.value("glyph_scale", 1.0)};
        if (d.contains("glyph") && !d["glyph"].is_null()) {
          x.glyph = parse_gesture(d["glyph"].get<std::string>());
          if (!x.glyph) throw Error(ErrorKind::kFormat, "unknown gesture " + d["glyph"].get<std::string>());
        }
        s.distractors.push_back(x);
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("bad scene description: ") + e.what());
  }
}

}  // namespace gestlang::vision

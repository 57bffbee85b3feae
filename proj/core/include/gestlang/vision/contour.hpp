#pragma once

#include <array>
#include <span>
#include <vector>

#include "gestlang/vision/raster.hpp"

namespace gestlang::vision {

struct Point {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Point&, const Point&) = default;
};

struct PointF {
  double x = 0.0;
  double y = 0.0;
};

struct ConvexityDefect {
  Point start;
  Point end;
  Point farthest;
  double depth = 0.0;  // px from the hull edge
};

// Log-scaled Hu invariants: sign(h) * max(0, log10|h| + 12), so values below
// 1e-12 map to 0 and the scale is continuous through h = 0.
using MomentSignature = std::array<double, 7>;

struct ContourFeatures {
  std::vector<Point> boundary;  // outer boundary pixels, Moore-traced clockwise on screen
  double area = 0.0;            // foreground pixel count
  std::vector<Point> hull;      // counter-clockwise on screen, no repeated vertices
  PointF hull_center;
  std::vector<ConvexityDefect> defects;
  std::vector<Point> curvature_points;  // sharp convex turns (finger tips)
  MomentSignature moment_signature{};
  Box bbox;
  PointF centroid;
};

struct Component {
  std::vector<Point> pixels;  // raster order
  Box bbox;
};

// 8-connected foreground components in raster order of their first pixel.
std::vector<Component> connected_components(const BinaryMask& mask);

// Moment invariants of a pixel set, treating each pixel as a unit square and
// integrating exactly, so 90-degree rotations, translations, and integer
// up-scaling leave them unchanged.
std::array<double, 7> hu_moments(std::span<const Point> pixels);
MomentSignature log_signature(const std::array<double, 7>& hu);
double signature_distance(const MomentSignature& a, const MomentSignature& b);

std::vector<Point> convex_hull(std::span<const Point> points);

ContourFeatures describe_component(const Component& component);

// One entry per component with area >= min_area (Error(kInvalidArgument)
// if min_area <= 0).
std::vector<ContourFeatures> extract_contour_features(const BinaryMask& mask, double min_area);

}  // namespace gestlang::vision

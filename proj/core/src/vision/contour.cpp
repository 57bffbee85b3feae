#include "gestlang/vision/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "gestlang/errors.hpp"

namespace gestlang::vision {
namespace {

// Clockwise on screen (y down), starting west.
constexpr std::array<Point, 8> kNeighbors = {
    Point{-1, 0}, Point{-1, -1}, Point{0, -1}, Point{1, -1},
    Point{1, 0},  Point{1, 1},   Point{0, 1},  Point{-1, 1}};

int direction_of(Point from, Point to) {
  const Point d{to.x - from.x, to.y - from.y};
  for (int i = 0; i < 8; ++i) {
    if (kNeighbors[i] == d) return i;
  }
  return 0;
}

long cross(Point o, Point a, Point b) {
  return static_cast<long>(a.x - o.x) * (b.y - o.y) - static_cast<long>(a.y - o.y) * (b.x - o.x);
}

double distance_to_line(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
  return std::abs(dx * (p.y - a.y) - dy * (p.x - a.x)) / len;
}

// Moore-neighbour boundary trace with the "return to start by the first
// move" stopping rule.
template <class Inside>
std::vector<Point> trace_boundary(Point start, Inside inside) {
  std::vector<Point> out{start};
  Point cur = start;
  int back = 0;  // direction from cur to the last background pixel examined
  std::optional<Point> first_move;
  for (;;) {
    std::optional<Point> next;
    int next_back = 0;
    for (int k = 1; k <= 8; ++k) {
      const int dir = (back + k) % 8;
      const Point p{cur.x + kNeighbors[dir].x, cur.y + kNeighbors[dir].y};
      if (inside(p)) {
        const int prev_dir = (dir + 7) % 8;
        next = p;
        next_back = direction_of(p, {cur.x + kNeighbors[prev_dir].x, cur.y + kNeighbors[prev_dir].y});
        break;
      }
    }
    if (!next) break;  // isolated pixel
    if (cur == start) {
      if (first_move && *next == *first_move) {
        out.pop_back();  // the closing visit to start
        break;
      }
      if (!first_move) first_move = *next;
    }
    cur = *next;
    back = next_back;
    out.push_back(cur);
  }
  return out;
}

// Integral of t^p over a unit interval centred at u.
double unit_integral(double u, int p) {
  switch (p) {
    case 0: return 1.0;
    case 1: return u;
    case 2: return u * u + 1.0 / 12.0;
    default: return u * u * u + u / 4.0;
  }
}

std::vector<Point> curvature_points(const std::vector<Point>& boundary, PointF centroid) {
  std::vector<Point> out;
  const int n = static_cast<int>(boundary.size());
  if (n < 16) return out;
  const int k = std::clamp(n / 25, 4, 20);
  std::vector<double> angle(n, M_PI);
  for (int i = 0; i < n; ++i) {
    const Point p = boundary[i];
    const Point a = boundary[(i - k + n) % n];
    const Point b = boundary[(i + k) % n];
    const double ax = a.x - p.x, ay = a.y - p.y, bx = b.x - p.x, by = b.y - p.y;
    const double la = std::hypot(ax, ay), lb = std::hypot(bx, by);
    if (la == 0.0 || lb == 0.0) continue;
    const double c = std::clamp((ax * bx + ay * by) / (la * lb), -1.0, 1.0);
    // Convex peaks only: the chord midpoint is nearer the centroid than p.
    const double mx = (a.x + b.x) / 2.0, my = (a.y + b.y) / 2.0;
    const double dp = std::hypot(p.x - centroid.x, p.y - centroid.y);
    const double dm = std::hypot(mx - centroid.x, my - centroid.y);
    if (dm < dp) angle[i] = std::acos(c);
  }
  constexpr double kSharp = M_PI / 3.0;
  for (int i = 0; i < n; ++i) {
    if (angle[i] >= kSharp) continue;
    bool is_min = true;
    for (int j = -k; j <= k && is_min; ++j) {
      const int q = (i + j + n) % n;
      if (j != 0 && (angle[q] < angle[i] || (angle[q] == angle[i] && j < 0))) is_min = false;
    }
    if (is_min) out.push_back(boundary[i]);
  }
  return out;
}

}  // namespace

std::vector<Component> connected_components(const BinaryMask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Component> out;
  std::vector<Point> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || label[static_cast<std::size_t>(y) * w + x] >= 0) continue;
      const int id = static_cast<int>(out.size());
      Component c;
      stack.assign(1, Point{x, y});
      label[static_cast<std::size_t>(y) * w + x] = id;
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        c.pixels.push_back(p);
        for (const auto& d : kNeighbors) {
          const int nx = p.x + d.x, ny = p.y + d.y;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask.at(nx, ny)) continue;
          auto& l = label[static_cast<std::size_t>(ny) * w + nx];
          if (l >= 0) continue;
          l = id;
          stack.push_back({nx, ny});
        }
      }
      std::sort(c.pixels.begin(), c.pixels.end(),
                [](Point a, Point b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
      int x0 = w, y0 = h, x1 = -1, y1 = -1;
      for (const auto& p : c.pixels) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
      }
      c.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::array<double, 7> hu_moments(std::span<const Point> pixels) {
  std::array<double, 7> hu{};
  if (pixels.empty()) return hu;
  const double n = static_cast<double>(pixels.size());
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pixels) {
    cx += p.x + 0.5;
    cy += p.y + 0.5;
  }
  cx /= n;
  cy /= n;

  double mu[4][4] = {};
  for (const auto& p : pixels) {
    const double u = p.x + 0.5 - cx;
    const double v = p.y + 0.5 - cy;
    double iu[4], iv[4];
    for (int k = 0; k < 4; ++k) {
      iu[k] = unit_integral(u, k);
      iv[k] = unit_integral(v, k);
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; a + b <= 3; ++b) mu[a][b] += iu[a] * iv[b];
    }
  }
  auto eta = [&](int p, int q) { return mu[p][q] / std::pow(n, 1.0 + (p + q) / 2.0); };
  const double n20 = eta(2, 0), n02 = eta(0, 2), n11 = eta(1, 1);
  const double n30 = eta(3, 0), n03 = eta(0, 3), n21 = eta(2, 1), n12 = eta(1, 2);

  const double a = n30 + n12, b = n21 + n03;
  hu[0] = n20 + n02;
  hu[1] = (n20 - n02) * (n20 - n02) + 4.0 * n11 * n11;
  hu[2] = (n30 - 3 * n12) * (n30 - 3 * n12) + (3 * n21 - n03) * (3 * n21 - n03);
  hu[3] = a * a + b * b;
  hu[4] = (n30 - 3 * n12) * a * (a * a - 3 * b * b) + (3 * n21 - n03) * b * (3 * a * a - b * b);
  hu[5] = (n20 - n02) * (a * a - b * b) + 4 * n11 * a * b;
  hu[6] = (3 * n21 - n03) * a * (a * a - 3 * b * b) - (n30 - 3 * n12) * b * (3 * a * a - b * b);
  return hu;
}

MomentSignature log_signature(const std::array<double, 7>& hu) {
  // sign(h) * (log10|h| + kDecades), clamped at zero. Unlike -sign(h) log10|h|
  // this is continuous through h = 0, so the near-zero skew invariant of an
  // almost symmetric blob stays close to that of its symmetric template.
  constexpr double kDecades = 12.0;
  MomentSignature s{};
  for (int i = 0; i < 7; ++i) {
    const double h = hu[i];
    const double mag = h == 0.0 ? 0.0 : std::max(0.0, std::log10(std::abs(h)) + kDecades);
    s[i] = std::copysign(mag, h);
  }
  return s;
}

double signature_distance(const MomentSignature& a, const MomentSignature& b) {
  double d = 0.0;
  for (int i = 0; i < 7; ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(d);
}

std::vector<Point> convex_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

ContourFeatures describe_component(const Component& comp) {
  ContourFeatures f;
  f.area = static_cast<double>(comp.pixels.size());
  f.bbox = comp.bbox;

  double sx = 0.0, sy = 0.0;
  for (const auto& p : comp.pixels) {
    sx += p.x;
    sy += p.y;
  }
  f.centroid = {sx / f.area, sy / f.area};

  // Local occupancy grid over the bbox for the tracer.
  const Box& bb = comp.bbox;
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(bb.w) * bb.h, 0);
  for (const auto& p : comp.pixels) occ[static_cast<std::size_t>(p.y - bb.y) * bb.w + (p.x - bb.x)] = 1;
  auto inside = [&](Point p) {
    const int lx = p.x - bb.x, ly = p.y - bb.y;
    return lx >= 0 && ly >= 0 && lx < bb.w && ly < bb.h && occ[static_cast<std::size_t>(ly) * bb.w + lx] != 0;
  };
  f.boundary = trace_boundary(comp.pixels.front(), inside);

  f.hull = convex_hull(f.boundary);
  {
    double a2 = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t m = f.hull.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Point p = f.hull[i], q = f.hull[(i + 1) % m];
      const double c = static_cast<double>(p.x) * q.y - static_cast<double>(q.x) * p.y;
      a2 += c;
      cx += (p.x + q.x) * c;
      cy += (p.y + q.y) * c;
    }
    if (std::abs(a2) > 1e-9) {
      f.hull_center = {cx / (3.0 * a2), cy / (3.0 * a2)};
    } else {
      f.hull_center = f.centroid;
    }
  }

  // Defects: deepest boundary point between consecutive hull vertices, taken
  // in boundary order.
  if (f.hull.size() >= 3) {
    std::map<Point, std::size_t> first_index;
    for (std::size_t i = 0; i < f.boundary.size(); ++i) first_index.emplace(f.boundary[i], i);
    std::vector<std::size_t> idx;
    for (const auto& h : f.hull) idx.push_back(first_index.at(h));
    std::sort(idx.begin(), idx.end());
    const std::size_t n = f.boundary.size();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t i0 = idx[k];
      const std::size_t i1 = idx[(k + 1) % idx.size()];
      const std::size_t span = (i1 + n - i0) % n;
      if (span < 2) continue;
      const Point a = f.boundary[i0], b = f.boundary[i1];
      ConvexityDefect best{a, b, a, 0.0};
      for (std::size_t s = 1; s < span; ++s) {
        const Point p = f.boundary[(i0 + s) % n];
        const double d = distance_to_line(p, a, b);
        if (d > best.depth) {
          best.depth = d;
          best.farthest = p;
        }
      }
      if (best.depth > 0.0) f.defects.push_back(best);
    }
  }

  f.curvature_points = curvature_points(f.boundary, f.centroid);
  f.moment_signature = log_signature(hu_moments(comp.pixels));
  return f;
}

std::vector<ContourFeatures> extract_contour_features(const BinaryMask& mask, double min_area) {
  if (!(min_area > 0.0)) throw Error(ErrorKind::kInvalidArgument, "min_area must be positive");
  std::vector<ContourFeatures> out;
  for (const auto& comp : connected_components(mask)) {
    if (static_cast<double>(comp.pixels.size()) >= min_area) out.push_back(describe_component(comp));
  }
  return out;
}

}  // namespace gestlang::vision

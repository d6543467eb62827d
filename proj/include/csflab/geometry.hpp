#pragma once

// Discrete curves in a 2-D coordinate chart.
//
// A PolyCurve is an ordered vertex list stored column-wise in a 2xN matrix.
// Closed curves use cyclic indexing. When `period` is positive the second
// coordinate is identified modulo `period` (flat cylinder chart); every edge
// vector is then unwrapped to the nearest periodic copy, so a curve that
// winds once around the cylinder closes up with an offset of (0, +-period).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "csflab/errors.hpp"

namespace csf {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Vertices2 = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

template <typename Scalar>
inline Scalar cross2(const Point2<Scalar>& a, const Point2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Nearest periodic copy of a displacement; identity when period <= 0.
template <typename Scalar>
inline Point2<Scalar> wrap_delta(Point2<Scalar> d, Scalar period) {
  if (period > Scalar(0)) d.y() -= period * std::round(d.y() / period);
  return d;
}

template <typename Scalar>
struct PolyCurve {
  Vertices2<Scalar> vertices;
  bool closed = true;
  Scalar period = Scalar(0);

  PolyCurve() = default;
  PolyCurve(Vertices2<Scalar> v, bool is_closed, Scalar per = Scalar(0))
      : vertices(std::move(v)), closed(is_closed), period(per) {}

  Eigen::Index size() const { return vertices.cols(); }
  Eigen::Index edge_count() const { return closed ? size() : size() - 1; }
  bool periodic() const { return period > Scalar(0); }

  Point2<Scalar> vertex(Eigen::Index i) const { return vertices.col(wrap_index(i)); }

  Eigen::Index wrap_index(Eigen::Index i) const {
    const Eigen::Index n = size();
    return ((i % n) + n) % n;
  }

  /// Edge from vertex i to vertex i+1.
  Point2<Scalar> edge(Eigen::Index i) const {
    return wrap_delta<Scalar>(vertex(i + 1) - vertex(i), period);
  }

  Scalar edge_length(Eigen::Index i) const { return edge(i).norm(); }
};

using PolyCurved = PolyCurve<double>;

/// Number of times a closed periodic curve winds around the cylinder (0 for planar curves).
template <typename Scalar>
int winding_count(const PolyCurve<Scalar>& c) {
  if (!c.periodic() || !c.closed) return 0;
  Scalar total = 0;
  for (Eigen::Index i = 0; i < c.edge_count(); ++i) total += c.edge(i).y();
  return static_cast<int>(std::lround(total / c.period));
}

/// Vertices laid out along the unwrapped walk: p_0 = v_0, p_{i+1} = p_i + edge(i).
/// For closed curves the walk has n+1 points, the last being the closure of the loop.
template <typename Scalar>
Vertices2<Scalar> unwrapped_walk(const PolyCurve<Scalar>& c) {
  const Eigen::Index m = c.edge_count();
  Vertices2<Scalar> walk(2, m + 1);
  walk.col(0) = c.vertices.col(0);
  for (Eigen::Index i = 0; i < m; ++i) walk.col(i + 1) = walk.col(i) + c.edge(i);
  return walk;
}

template <typename Scalar>
PolyCurve<Scalar> reversed(const PolyCurve<Scalar>& c) {
  PolyCurve<Scalar> r = c;
  r.vertices = c.vertices.rowwise().reverse();
  return r;
}

template <typename Scalar>
Scalar curve_length(const PolyCurve<Scalar>& c) {
  Scalar len = 0;
  for (Eigen::Index i = 0; i < c.edge_count(); ++i) len += c.edge_length(i);
  return len;
}

template <typename Scalar>
Scalar min_edge_length(const PolyCurve<Scalar>& c) {
  Scalar m = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < c.edge_count(); ++i) m = std::min(m, c.edge_length(i));
  return m;
}

template <typename Scalar>
Scalar max_edge_length(const PolyCurve<Scalar>& c) {
  Scalar m = 0;
  for (Eigen::Index i = 0; i < c.edge_count(); ++i) m = std::max(m, c.edge_length(i));
  return m;
}

/// Signed chart area, positive for counter-clockwise loops.
///
/// Evaluated as the loop integral of x dy. For a curve winding around the
/// cylinder this is the area between the reference line x = 0 and the curve,
/// so differences between nested winding curves give the band area.
template <typename Scalar>
Scalar enclosed_area(const PolyCurve<Scalar>& c) {
  if (!c.closed) throw InvalidArgument("enclosed_area: curve is open");
  const Vertices2<Scalar> walk = unwrapped_walk(c);
  const Scalar x_ref = winding_count(c) == 0 ? walk(0, 0) : Scalar(0);
  Scalar area = 0;
  for (Eigen::Index i = 0; i + 1 < walk.cols(); ++i) {
    const Scalar xm = Scalar(0.5) * (walk(0, i) + walk(0, i + 1)) - x_ref;
    area += xm * (walk(1, i + 1) - walk(1, i));
  }
  return area;
}

/// Polyline Laplace-Beltrami curvature vector at each vertex:
///   k_i = 2/(l_i + l_{i+1}) * (e_{i+1}/l_{i+1} - e_i/l_i)
/// with e_i the edge arriving at vertex i. Open-curve endpoints get zero.
template <typename Scalar>
Vertices2<Scalar> discrete_curvature(const PolyCurve<Scalar>& c) {
  const Eigen::Index n = c.size();
  Vertices2<Scalar> k = Vertices2<Scalar>::Zero(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!c.closed && (i == 0 || i == n - 1)) continue;
    const Point2<Scalar> prev = c.edge(i - 1);
    const Point2<Scalar> next = c.edge(i);
    const Scalar lp = prev.norm();
    const Scalar ln = next.norm();
    k.col(i) = (Scalar(2) / (lp + ln)) * (next / ln - prev / lp);
  }
  return k;
}

/// Unit normal at each vertex pointing to the right of the direction of travel
/// (outward for a counter-clockwise loop). Uses the central chord v_{i+1} - v_{i-1};
/// one-sided at open endpoints.
template <typename Scalar>
Vertices2<Scalar> vertex_normals(const PolyCurve<Scalar>& c) {
  const Eigen::Index n = c.size();
  Vertices2<Scalar> nu(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Point2<Scalar> t;
    if (!c.closed && i == 0) {
      t = c.edge(0);
    } else if (!c.closed && i == n - 1) {
      t = c.edge(n - 2);
    } else {
      t = c.edge(i - 1) + c.edge(i);
    }
    t.normalize();
    nu.col(i) = Point2<Scalar>(t.y(), -t.x());
  }
  return nu;
}

/// Scalar curvature with the convention k_vec = -kappa * nu, nu from vertex_normals.
/// Positive on a counter-clockwise circle.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> scalar_curvature(const PolyCurve<Scalar>& c) {
  const Vertices2<Scalar> k = discrete_curvature(c);
  const Vertices2<Scalar> nu = vertex_normals(c);
  return -(k.cwiseProduct(nu)).colwise().sum().transpose();
}

/// Dual (Voronoi) arc length per vertex: half the sum of the adjacent edge lengths.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dual_lengths(const PolyCurve<Scalar>& c) {
  const Eigen::Index n = c.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  for (Eigen::Index e = 0; e < c.edge_count(); ++e) {
    const Scalar half = Scalar(0.5) * c.edge_length(e);
    w(c.wrap_index(e)) += half;
    w(c.wrap_index(e + 1)) += half;
  }
  return w;
}

template <typename Scalar>
Point2<Scalar> centroid(const PolyCurve<Scalar>& c) {
  return c.vertices.rowwise().mean();
}

// ---------------------------------------------------------------------------
// Segment predicates

template <typename Scalar>
Scalar point_segment_distance(const Point2<Scalar>& p, const Point2<Scalar>& a,
                              const Point2<Scalar>& b) {
  const Point2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  Scalar t = len2 > Scalar(0) ? (p - a).dot(ab) / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (a + t * ab - p).norm();
}

template <typename Scalar>
bool segments_intersect(const Point2<Scalar>& a, const Point2<Scalar>& b, const Point2<Scalar>& c,
                        const Point2<Scalar>& d) {
  if (std::max(a.x(), b.x()) < std::min(c.x(), d.x()) ||
      std::max(c.x(), d.x()) < std::min(a.x(), b.x()) ||
      std::max(a.y(), b.y()) < std::min(c.y(), d.y()) ||
      std::max(c.y(), d.y()) < std::min(a.y(), b.y()))
    return false;
  const Scalar d1 = cross2<Scalar>(b - a, c - a);
  const Scalar d2 = cross2<Scalar>(b - a, d - a);
  const Scalar d3 = cross2<Scalar>(d - c, a - c);
  const Scalar d4 = cross2<Scalar>(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  // collinear or touching
  auto on_segment = [](const Point2<Scalar>& p, const Point2<Scalar>& q, const Point2<Scalar>& r) {
    return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
           std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
  };
  if (d1 == 0 && on_segment(a, b, c)) return true;
  if (d2 == 0 && on_segment(a, b, d)) return true;
  if (d3 == 0 && on_segment(c, d, a)) return true;
  if (d4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

template <typename Scalar>
Scalar segment_segment_distance(const Point2<Scalar>& a, const Point2<Scalar>& b,
                                const Point2<Scalar>& c, const Point2<Scalar>& d) {
  if (segments_intersect(a, b, c, d)) return Scalar(0);
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

namespace detail {

// Shift of segment (c,d) onto the periodic copy nearest segment (a,b).
template <typename Scalar>
Point2<Scalar> nearest_copy_shift(const Point2<Scalar>& a, const Point2<Scalar>& b,
                                  const Point2<Scalar>& c, const Point2<Scalar>& d, Scalar period) {
  if (period <= Scalar(0)) return Point2<Scalar>::Zero();
  const Scalar dy = Scalar(0.5) * ((a.y() + b.y()) - (c.y() + d.y()));
  return Point2<Scalar>(Scalar(0), period * std::round(dy / period));
}

}  // namespace detail

namespace detail {

// Edges with their bounding boxes, ordered by left edge for sweeping in x
// (x is never periodic, so the sweep works on the cylinder too).
template <typename Scalar>
struct EdgeSweep {
  struct Item {
    Point2<Scalar> p0, p1;
    Scalar xmin, xmax, ymid, yhalf, radius;
    Eigen::Index index;
  };
  std::vector<Item> items;
  Scalar max_width = 0;

  explicit EdgeSweep(const PolyCurve<Scalar>& c) {
    items.reserve(static_cast<size_t>(c.edge_count()));
    for (Eigen::Index i = 0; i < c.edge_count(); ++i) {
      const Point2<Scalar> p0 = c.vertex(i);
      const Point2<Scalar> p1 = p0 + c.edge(i);
      const Scalar xmin = std::min(p0.x(), p1.x()), xmax = std::max(p0.x(), p1.x());
      items.push_back({p0, p1, xmin, xmax, Scalar(0.5) * (p0.y() + p1.y()), Scalar(0.5) * std::abs(p1.y() - p0.y()),
                       Scalar(0.5) * (p1 - p0).norm(), i});
      max_width = std::max(max_width, xmax - xmin);
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.xmin < b.xmin; });
  }

  // First item whose box could reach x >= x_lo.
  typename std::vector<Item>::const_iterator from(Scalar x_lo) const {
    return std::lower_bound(items.begin(), items.end(), x_lo - max_width,
                            [](const Item& it, Scalar v) { return it.xmin < v; });
  }
};

// Gap between two y-intervals, measured to the nearest periodic copy.
template <typename Scalar>
Scalar y_gap(Scalar mid_a, Scalar half_a, Scalar mid_b, Scalar half_b, Scalar period) {
  Scalar d = std::abs(mid_a - mid_b);
  if (period > Scalar(0)) {
    d = std::fmod(d, period);
    d = std::min(d, period - d);
  }
  return d - half_a - half_b;
}

}  // namespace detail

/// Minimum distance between the polylines, respecting the periodicity of `a`.
template <typename Scalar>
Scalar min_separation(const PolyCurve<Scalar>& a, const PolyCurve<Scalar>& b) {
  const Scalar period = std::max(a.period, b.period);
  const detail::EdgeSweep<Scalar> sa(a), sb(b);
  Scalar best = std::numeric_limits<Scalar>::infinity();
  {
    // cheap upper bound from vertices at proportional positions
    const Eigen::Index na = a.size(), nb = b.size();
    for (Eigen::Index i = 0; i < na; i += std::max<Eigen::Index>(1, na / 64)) {
      const Point2<Scalar> p = a.vertex(i);
      Point2<Scalar> q = b.vertex(i * nb / na);
      q += detail::nearest_copy_shift(p, p, q, q, period);
      best = std::min(best, (p - q).norm());
    }
  }
  for (const auto& ea : sa.items) {
    for (auto it = sb.from(ea.xmin - best); it != sb.items.end() && it->xmin <= ea.xmax + best; ++it) {
      if (it->xmax < ea.xmin - best) continue;
      if (detail::y_gap(ea.ymid, ea.yhalf, it->ymid, it->yhalf, period) >= best) continue;
      const Point2<Scalar> shift = detail::nearest_copy_shift(ea.p0, ea.p1, it->p0, it->p1, period);
      const Scalar reach = best + ea.radius + it->radius;
      if ((ea.p0 + ea.p1 - it->p0 - it->p1 - Scalar(2) * shift).squaredNorm() >= Scalar(4) * reach * reach) continue;
      best = std::min(best, segment_segment_distance(ea.p0, ea.p1, Point2<Scalar>(it->p0 + shift),
                                                     Point2<Scalar>(it->p1 + shift)));
      if (best == Scalar(0)) return best;
    }
  }
  return best;
}

/// True when no two non-adjacent edges intersect (adjacent edges may share endpoints).
template <typename Scalar>
bool is_simple(const PolyCurve<Scalar>& c) {
  const Eigen::Index m = c.edge_count();
  const detail::EdgeSweep<Scalar> sweep(c);
  for (auto ia = sweep.items.begin(); ia != sweep.items.end(); ++ia) {
    for (auto ib = std::next(ia); ib != sweep.items.end() && ib->xmin <= ia->xmax; ++ib) {
      const Eigen::Index i = std::min(ia->index, ib->index), j = std::max(ia->index, ib->index);
      if (j == i + 1) continue;
      if (c.closed && i == 0 && j == m - 1) continue;
      if (detail::y_gap(ia->ymid, ia->yhalf, ib->ymid, ib->yhalf, c.period) > Scalar(0)) continue;
      const Point2<Scalar> s = detail::nearest_copy_shift(ia->p0, ia->p1, ib->p0, ib->p1, c.period);
      if (segments_intersect<Scalar>(ia->p0, ia->p1, Point2<Scalar>(ib->p0 + s), Point2<Scalar>(ib->p1 + s)))
        return false;
    }
  }
  return true;
}

/// Even-odd test: is p on the enclosed side of the closed curve?
///
/// For a curve winding around the cylinder the enclosed side is the one to the
/// left of travel, i.e. smaller first coordinate for upward (counter-clockwise) travel.
template <typename Scalar>
bool contains(const PolyCurve<Scalar>& c, const Point2<Scalar>& p) {
  bool inside = false;
  for (Eigen::Index i = 0; i < c.edge_count(); ++i) {
    Point2<Scalar> a = c.vertex(i);
    // endpoints must be the stored vertices so the half-open rule sees each one identically
    Point2<Scalar> b = c.vertex(i + 1);
    if (c.periodic()) {
      b.y() += c.period * std::round((a.y() + c.edge(i).y() - b.y()) / c.period);
      const Scalar mid = Scalar(0.5) * (a.y() + b.y());
      const Point2<Scalar> s(Scalar(0), c.period * std::round((p.y() - mid) / c.period));
      a += s;
      b += s;
    }
    if ((a.y() <= p.y()) != (b.y() <= p.y())) {
      const Scalar x_cross = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x_cross > p.x()) inside = !inside;
    }
  }
  if (winding_count(c) < 0) inside = !inside;
  return inside;
}

/// Checks the PolyCurve invariants; throws InvalidArgument describing the first violation.
template <typename Scalar>
void validate_curve(const PolyCurve<Scalar>& c) {
  const Eigen::Index n = c.size();
  if (c.closed && n < 8) throw InvalidArgument("closed curve needs at least 8 vertices");
  if (!c.closed && n < 2) throw InvalidArgument("open curve needs at least 2 vertices");
  if (!c.vertices.allFinite()) throw InvalidArgument("curve has non-finite vertices");
  for (Eigen::Index i = 0; i < c.edge_count(); ++i)
    if (!(c.edge_length(i) > Scalar(0)))
      throw InvalidArgument("curve has repeated consecutive vertices at index " + std::to_string(i));
  if (c.closed && !is_simple(c)) throw InvalidArgument("closed curve is not simple");
}

namespace detail {

// Point at arc length s along an unwrapped walk with cumulative lengths `cum`.
template <typename Scalar>
Point2<Scalar> walk_point(const Vertices2<Scalar>& walk, const std::vector<Scalar>& cum, Scalar s) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  Eigen::Index e = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(it - cum.begin()) - 1, 0,
                                            walk.cols() - 2);
  const Scalar len = cum[e + 1] - cum[e];
  const Scalar t = len > Scalar(0) ? std::clamp((s - cum[e]) / len, Scalar(0), Scalar(1)) : Scalar(0);
  return walk.col(e) + t * (walk.col(e + 1) - walk.col(e));
}

}  // namespace detail

/// Redistributes n vertices along the input polyline so that consecutive chords
/// have equal length. The first vertex (and for open curves, both endpoints) stay
/// fixed. Starting from equal arc-length spacing, the arc-length positions are
/// corrected by the accumulated chord defect until the chords agree, which makes
/// the operation idempotent.
template <typename Scalar>
PolyCurve<Scalar> resample_uniform(const PolyCurve<Scalar>& c, Eigen::Index n) {
  if (c.closed && n < 8) throw InvalidArgument("resample_uniform: closed curves need n >= 8");
  if (!c.closed && n < 2) throw InvalidArgument("resample_uniform: open curves need n >= 2");
  if (c.size() < 2) throw InvalidArgument("resample_uniform: input has fewer than 2 vertices");

  const Vertices2<Scalar> walk = unwrapped_walk(c);
  std::vector<Scalar> cum(walk.cols(), Scalar(0));
  for (Eigen::Index i = 1; i < walk.cols(); ++i)
    cum[i] = cum[i - 1] + (walk.col(i) - walk.col(i - 1)).norm();
  const Scalar total = cum.back();

  const Eigen::Index chords = c.closed ? n : n - 1;
  std::vector<Scalar> s(n);
  for (Eigen::Index k = 0; k < n; ++k) s[k] = total * Scalar(k) / Scalar(chords);

  Vertices2<Scalar> out(2, n);
  const Point2<Scalar> closure = walk.col(walk.cols() - 1);
  for (int iter = 0; iter < 100; ++iter) {
    for (Eigen::Index k = 0; k < n; ++k) out.col(k) = detail::walk_point(walk, cum, s[k]);
    std::vector<Scalar> chord(chords);
    Scalar sum = 0;
    for (Eigen::Index k = 0; k < chords; ++k) {
      const Point2<Scalar> next = (k + 1 < n) ? Point2<Scalar>(out.col(k + 1)) : closure;
      chord[k] = (next - out.col(k)).norm();
      sum += chord[k];
    }
    Scalar worst = 0;
    Scalar acc = 0;
    const Eigen::Index last_free = c.closed ? n : n - 1;
    for (Eigen::Index k = 1; k < last_free; ++k) {
      acc += chord[k - 1];
      const Scalar defect = sum * Scalar(k) / Scalar(chords) - acc;
      worst = std::max(worst, std::abs(defect));
      s[k] = std::clamp(s[k] + defect, Scalar(0), total);
    }
    if (worst <= Scalar(64) * std::numeric_limits<Scalar>::epsilon() * total) break;
  }
  for (Eigen::Index k = 0; k < n; ++k) out.col(k) = detail::walk_point(walk, cum, s[k]);
  if (!c.closed) {
    out.col(0) = walk.col(0);
    out.col(n - 1) = walk.col(walk.cols() - 1);
  }
  return PolyCurve<Scalar>(std::move(out), c.closed, c.period);
}

}  // namespace csf

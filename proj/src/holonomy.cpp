#include "ph3/holonomy.hpp"

#include "ph3/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ph3 {

namespace {

struct Projection {
  Vec3 point = Vec3::Zero();
  Vec3 tangent = Vec3::Zero();
  double distance = std::numeric_limits<double>::infinity();
  double arc = 0.0;
};

class CenterLocator {
 public:
  CenterLocator(const LeafSegment& leaf, double cell) : leaf_(leaf), index_(leaf.vertices, cell) {}

  Projection project(const Vec3& p) const {
    Projection best;
    double d = 0.0;
    const std::int64_t k = index_.nearest(p, 1, &d);
    if (k < 0) return best;
    const std::size_t n = leaf_.size();
    const std::size_t i = static_cast<std::size_t>(k);
    for (std::size_t a : {i == 0 ? i : i - 1, i}) {
      if (a + 1 >= n) continue;
      const Vec3& v0 = leaf_.vertices[a];
      const Vec3 seg = leaf_.vertices[a + 1] - v0;
      const double len2 = seg.squaredNorm();
      const double t = len2 > 0.0 ? std::clamp((p - v0).dot(seg) / len2, 0.0, 1.0) : 0.0;
      const Vec3 q = v0 + t * seg;
      const double dist = (p - q).norm();
      if (dist < best.distance) {
        best.point = q;
        best.distance = dist;
        best.arc = leaf_.arc[a] + t * (leaf_.arc[a + 1] - leaf_.arc[a]);
        best.tangent = len2 > 0.0 ? Vec3(seg / std::sqrt(len2)) : leaf_.tangents[a];
      }
    }
    return best;
  }

 private:
  const LeafSegment& leaf_;
  SpatialIndex index_;
};

std::size_t nearest_vertex(const LeafSegment& leaf, double a) {
  const std::size_t i = leaf.segment_at_arc(a);
  return std::abs(leaf.arc[i + 1] - a) < std::abs(leaf.arc[i] - a) ? i + 1 : i;
}

LeafOptions inner(const HolonomyOptions& opts) {
  LeafOptions o = opts.leaf;
  if (opts.exec == Execution::parallel) o.exec = Execution::serial;
  return o;
}

/// Traces F^u_from and F^c_to and intersects them, doubling both lengths on a miss.
Crossing reach_crossing(const TorusMap& map, const Vec3& from, double strong_length, const Vec3& to,
                        double center_length, const LeafOptions& leaf) {
  for (int attempt = 0;; ++attempt) {
    const LeafSegment u = trace_strong_leaf(map, Sigma::u, from, strong_length, leaf);
    const LeafSegment c = trace_center_leaf(map, to, center_length, leaf);
    try {
      return intersect_leaves(map, u, c);
    } catch (const NoIntersection&) {
      if (attempt >= 2) throw;
      strong_length *= 2.0;
      center_length *= 2.0;
    }
  }
}

double center_margin(double t) { return 1.25 * std::abs(t) + 0.25; }

}  // namespace

Crossing intersect_leaves(const TorusMap& map, const LeafSegment& strong, const LeafSegment& center) {
  if (strong.sigma == Sigma::c || strong.chart.horizon <= 0)
    throw UsageError("intersect_leaves needs a strong leaf with its chart");
  if (center.size() < 2 || strong.size() < 2) throw NoIntersection("empty leaf");
  const double h = std::max(strong.spacing, center.spacing);
  const double threshold = 2.0 * h;
  const CenterLocator locator(center, threshold);

  std::vector<double> dist(strong.size());
  for (std::size_t i = 0; i < strong.size(); ++i) dist[i] = locator.project(strong.vertices[i]).distance;

  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < strong.size();) {
    if (!(dist[i] <= threshold)) {
      ++i;
      continue;
    }
    std::size_t best = i;
    for (; i < strong.size() && dist[i] <= threshold; ++i)
      if (dist[i] < dist[best]) best = i;
    minima.push_back(best);
  }
  if (minima.empty()) throw NoIntersection("strong leaf does not come near the center leaf");
  if (minima.size() > 1) {
    std::ostringstream os;
    os << minima.size() << " separate near-crossings";
    throw AmbiguousIntersection(os.str());
  }

  const std::size_t m = minima.front();
  const Projection pm = locator.project(strong.vertices[m]);
  Vec3 normal = strong.tangents[m] - strong.tangents[m].dot(pm.tangent) * pm.tangent;
  if (normal.norm() < 1e-12) throw AmbiguousIntersection("leaves are tangent at the crossing");
  normal.normalize();

  Crossing out;
  auto finish = [&](const Vec3& p, const Projection& q, double strong_arc) {
    out.strong_point = p;
    out.point = q.point;
    out.center_arc = q.arc;
    out.strong_arc = strong_arc;
    out.miss = q.distance;
    if (!(out.miss <= intersection_tolerance)) {
      std::ostringstream os;
      os << "closest approach " << out.miss << " exceeds the intersection tolerance";
      throw NoIntersection(os.str());
    }
    return out;
  };
  auto phi = [&](const Vec3& p, Projection* q = nullptr) {
    const Projection pr = locator.project(p);
    if (q) *q = pr;
    return std::isfinite(pr.distance) ? (p - pr.point).dot(normal) : std::numeric_limits<double>::quiet_NaN();
  };

  // Bracket the sign change nearest to the minimum.
  std::ptrdiff_t lo = -1;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(strong.size());
  for (std::ptrdiff_t r = 0; r < n && lo < 0; ++r) {
    for (std::ptrdiff_t i : {static_cast<std::ptrdiff_t>(m) - r, static_cast<std::ptrdiff_t>(m) + r}) {
      if (i < 0 || i >= n) continue;
      Projection q;
      const double fi = phi(strong.vertices[i], &q);
      if (fi == 0.0) return finish(strong.vertices[i], q, strong.arc[i]);
      if (i + 1 < n) {
        const double fj = phi(strong.vertices[i + 1]);
        if (std::isfinite(fi) && std::isfinite(fj) && (fi < 0.0) != (fj < 0.0)) {
          lo = i;
          break;
        }
      }
    }
    if (r > 4 && !(dist[std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(m) - r, 0, n - 1)] <= threshold) &&
        !(dist[std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(m) + r, 0, n - 1)] <= threshold))
      break;
  }
  if (lo < 0) throw NoIntersection("no sign change of the transverse offset near the closest approach");

  const std::size_t a = static_cast<std::size_t>(lo);
  const Vec3 origin = evaluate_chart(map, strong.chart, strong.parameter[strong.base_index]).offset;
  auto point = [&](double s) { return Vec3(strong.base + (evaluate_chart(map, strong.chart, s).offset - origin)); };
  double s_lo = strong.parameter[a], s_hi = strong.parameter[a + 1];
  Vec3 p_lo = strong.vertices[a], p_hi = strong.vertices[a + 1];
  double f_lo = phi(p_lo);
  for (int it = 0; it < 200 && (p_hi - p_lo).norm() > bisection_tolerance; ++it) {
    const double s = 0.5 * (s_lo + s_hi);
    const Vec3 p = point(s);
    const double f = phi(p);
    if (f == 0.0) {
      p_lo = p_hi = p;
      break;
    }
    if ((f < 0.0) == (f_lo < 0.0)) {
      s_lo = s, p_lo = p, f_lo = f;
    } else {
      s_hi = s, p_hi = p;
    }
  }
  const Vec3 p = 0.5 * (p_lo + p_hi);
  Projection q;
  phi(p, &q);
  return finish(p, q, strong.arc[a] + (p - strong.vertices[a]).norm());
}

double Strip::min_length() const {
  return lengths.empty() ? 0.0 : *std::min_element(lengths.begin(), lengths.end());
}

double Strip::max_length() const {
  return lengths.empty() ? 0.0 : *std::max_element(lengths.begin(), lengths.end());
}

Strip build_strip(const TorusMap& map, const Vec3& x, double du, double center_length, std::size_t samples,
                  const HolonomyOptions& opts) {
  if (!(std::abs(du) > 0.0)) throw UsageError("strip width d^u(x, y) must be nonzero");
  if (!(center_length > 0.0)) throw UsageError("center length must be positive");
  Strip strip;
  strip.x = x;
  const LeafSegment ux = trace_strong_leaf(map, Sigma::u, x, std::abs(du) + 1.0, opts.leaf);
  const std::size_t iy = nearest_vertex(ux, du);
  strip.y = ux.vertices[iy];
  strip.du = ux.arc[iy];
  strip.center_x = trace_center_leaf(map, x, center_length + 0.01, opts.leaf);
  strip.center_y = trace_center_leaf(map, strip.y, center_margin(center_length), opts.leaf);
  strip.consistency = (intersect_leaves(map, ux, strip.center_y).point - strip.y).norm();

  const std::size_t k = std::max<std::size_t>(samples, 1);
  strip.center_arcs.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    strip.center_arcs[i] = k == 1 ? 0.0 : -center_length + 2.0 * center_length * static_cast<double>(i) / (k - 1);
  strip.lengths.assign(k, 0.0);
  HolonomyOptions o = opts;
  o.leaf = inner(opts);
  for_each_index(k, opts.exec, [&](std::size_t i) {
    strip.lengths[i] = std::abs(unstable_holonomy(map, strip, strip.center_arcs[i], o).strong_arc);
  });
  return strip;
}

Crossing unstable_holonomy(const TorusMap& map, const Strip& strip, double center_arc, const HolonomyOptions& opts) {
  const Vec3 z = strip.center_x.vertices[nearest_vertex(strip.center_x, center_arc)];
  double reach = 2.0 * std::abs(strip.du) + 2.0;
  for (int attempt = 0;; ++attempt) {
    const LeafSegment uz = trace_strong_leaf(map, Sigma::u, z, reach, opts.leaf);
    try {
      return intersect_leaves(map, uz, strip.center_y);
    } catch (const NoIntersection&) {
      if (attempt >= 2) throw;
      reach *= 2.0;
    }
  }
}

std::string_view to_string(HolonomyKind k) { return k == HolonomyKind::center ? "center" : "unstable"; }

void HolonomyReport::summarize() {
  if (samples.empty()) {
    min_ratio = max_ratio = c_hat = 1.0;
    return;
  }
  min_ratio = std::numeric_limits<double>::infinity();
  max_ratio = 0.0;
  for (const auto& s : samples) {
    min_ratio = std::min(min_ratio, s.ratio);
    max_ratio = std::max(max_ratio, s.ratio);
  }
  c_hat = std::max({1.0, max_ratio, 1.0 / min_ratio});
}

HolonomySample center_holonomy(const TorusMap& map, const Vec3& x, double du, double t, const HolonomyOptions& opts) {
  if (!(std::abs(du) > 0.0)) throw UsageError("d^u(x, y) must be nonzero");
  const LeafSegment ux = trace_strong_leaf(map, Sigma::u, x, std::abs(du) + 1.0, opts.leaf);
  const std::size_t iy = nearest_vertex(ux, du);
  const Vec3 y = ux.vertices[iy];
  HolonomySample out;
  out.du_xy = std::abs(ux.arc[iy]);
  Vec3 hx = x;
  out.t = 0.0;
  if (t != 0.0) {
    const LeafSegment cx = trace_center_leaf(map, x, std::abs(t) + 0.01, opts.leaf);
    const std::size_t it = nearest_vertex(cx, t);
    hx = cx.vertices[it];
    out.t = cx.arc[it];
  }
  out.ratio = std::abs(reach_crossing(map, hx, 2.0 * out.du_xy + 1.0, y, center_margin(t), opts.leaf).strong_arc) /
              out.du_xy;
  return out;
}

HolonomyReport center_holonomy_report(const TorusMap& map, const std::vector<Vec3>& bases,
                                      const std::vector<double>& du, const std::vector<double>& t,
                                      const HolonomyOptions& opts) {
  HolonomyReport report;
  report.kind = HolonomyKind::center;
  const std::size_t n = bases.size() * du.size() * t.size();
  report.samples.resize(n);
  HolonomyOptions o = opts;
  o.leaf = inner(opts);
  for_each_index(n, opts.exec, [&](std::size_t k) {
    const std::size_t it = k % t.size();
    const std::size_t id = (k / t.size()) % du.size();
    const std::size_t ib = k / (t.size() * du.size());
    report.samples[k] = center_holonomy(map, bases[ib], du[id], t[it], o);
  });
  report.summarize();
  return report;
}

HolonomyReport unstable_holonomy_report(const Strip& strip) {
  HolonomyReport report;
  report.kind = HolonomyKind::unstable;
  const double du = std::abs(strip.du);
  for (std::size_t i = 0; i < strip.lengths.size(); ++i)
    report.samples.push_back({du, strip.center_arcs[i], strip.lengths[i] / du});
  report.summarize();
  return report;
}

LipschitzDelta holonomy_lipschitz_vs_delta(const TorusMap& map, const Vec3& x, double ell, double t,
                                           const HolonomyOptions& opts) {
  if (!(ell > 0.0)) throw UsageError("segment length must be positive");
  if (t == 0.0) throw UsageError("center offset must be nonzero");
  const LeafSegment ux = trace_strong_leaf(map, Sigma::u, x, ell + 1.0, opts.leaf);
  const std::size_t ia = nearest_vertex(ux, ell);
  const Vec3 a = ux.vertices[ia];
  LipschitzDelta out;
  out.segment = ux.arc[ia];
  if (!(out.segment > 0.0)) throw UsageError("segment shorter than the leaf spacing");
  const LeafSegment cx = trace_center_leaf(map, x, std::abs(t) + 0.01, opts.leaf);
  const Vec3 y = cx.vertices[nearest_vertex(cx, t)];
  out.lipschitz = std::abs(reach_crossing(map, y, 2.0 * ell + 0.1, a, center_margin(t), opts.leaf).strong_arc) /
                  out.segment;
  out.delta_c = center_delta(map, x, y, 40, opts.leaf.frame_horizon);
  out.ratio = out.lipschitz / out.delta_c.value;
  return out;
}

}  // namespace ph3

#include "ph3/leaves.hpp"

#include "ph3/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ph3 {
namespace {

struct Node {
  double s = 0.0;
  Vec3 w = Vec3::Zero();
  Vec3 t = Vec3::Zero();
  double log_stretch = 0.0;
};

Node push_node(const TorusMap& map, const StrongChart& chart, double s) {
  const bool inverse = chart.sigma == Sigma::s;
  Node node;
  node.s = s;
  node.w = s * chart.direction;
  node.t = chart.direction;
  for (int k = 0; k < chart.horizon; ++k) {
    map.step_offset(chart.reference[k], node.w, &node.t, inverse);
    const double len = node.t.norm();
    node.log_stretch += std::log(len);
    node.t /= len;
  }
  return node;
}

std::vector<Node> push_all(const TorusMap& map, const StrongChart& chart, const std::vector<double>& params,
                           Execution exec) {
  std::vector<Node> out(params.size());
  for_each_index(params.size(), exec, [&](std::size_t i) { out[i] = push_node(map, chart, params[i]); });
  return out;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = a + (b - a) * i / (count - 1);
  return v;
}

void merge_nodes(std::vector<Node>& nodes, std::vector<Node> extra) {
  nodes.insert(nodes.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.s < b.s; });
  nodes.erase(std::unique(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.s == b.s; }),
              nodes.end());
}

void refine(const TorusMap& map, const StrongChart& chart, std::vector<Node>& nodes, double h, Execution exec) {
  for (int round = 0; round < 200; ++round) {
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      if ((nodes[i + 1].w - nodes[i].w).norm() > h) {
        const double m = 0.5 * (nodes[i].s + nodes[i + 1].s);
        if (m <= nodes[i].s || m >= nodes[i + 1].s)
          throw HorizonTooSmall("seed parameter exhausted while refining; increase the horizon");
        mids.push_back(m);
      }
    }
    if (mids.empty()) return;
    merge_nodes(nodes, push_all(map, chart, mids, exec));
  }
  throw HorizonTooSmall("adaptive refinement did not converge");
}

// Signed polyline length from vertex b, Kahan-compensated.
std::vector<double> cumulative_arc(const std::vector<Vec3>& v, std::size_t b) {
  std::vector<double> arc(v.size(), 0.0);
  double sum = 0.0, carry = 0.0;
  for (std::size_t i = b; i > 0; --i) {
    const double y = (v[i] - v[i - 1]).norm() - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    arc[i - 1] = -sum;
  }
  sum = carry = 0.0;
  for (std::size_t i = b; i + 1 < v.size(); ++i) {
    const double y = (v[i + 1] - v[i]).norm() - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    arc[i + 1] = sum;
  }
  return arc;
}

double expansion_modulus(const LinearData& lin, Sigma sigma) {
  return sigma == Sigma::u ? lin.modulus(Sigma::u) : 1.0 / lin.modulus(Sigma::s);
}

}  // namespace

StrongChart make_chart(const TorusMap& map, Sigma sigma, const Vec3& x, int horizon, int frame_horizon) {
  StrongChart chart;
  chart.sigma = sigma;
  chart.horizon = horizon;
  const bool inverse = sigma == Sigma::s;
  // The reference pseudo-orbit is built backward from x so that it ends at x
  // exactly; offsets then stay cover quantities at any depth.
  chart.reference.resize(static_cast<std::size_t>(horizon) + 1);
  chart.reference[horizon] = reduce(x);
  for (int k = horizon; k > 0; --k)
    chart.reference[k - 1] =
        reduce(inverse ? map.step(chart.reference[k], nullptr) : map.inverse_step(chart.reference[k], nullptr));
  chart.seed = chart.reference[0];
  chart.direction = estimate_frame(map, chart.seed, frame_horizon).directions[index(sigma)];
  return chart;
}

ChartPoint evaluate_chart(const TorusMap& map, const StrongChart& chart, double s) {
  const Node n = push_node(map, chart, s);
  return ChartPoint{n.w, n.t, n.log_stretch};
}

StageHistory stage_history(const TorusMap& map, const StrongChart& chart, double s) {
  const bool inverse = chart.sigma == Sigma::s;
  StageHistory h;
  Vec3 w = s * chart.direction;
  Vec3 t = chart.direction;
  h.offsets.push_back(w);
  for (int k = 0; k < chart.horizon; ++k) {
    map.step_offset(chart.reference[k], w, &t, inverse);
    const double len = t.norm();
    h.increments.push_back(std::log(len));
    t /= len;
    h.offsets.push_back(w);
  }
  return h;
}

LeafSegment trace_strong_leaf(const TorusMap& map, Sigma sigma, const Vec3& x, double R, const LeafOptions& opts) {
  if (sigma == Sigma::c) throw UnsupportedDirection("trace_strong_leaf needs sigma = s or u");
  if (!(R > 0.0)) throw UsageError("leaf length R must be positive");
  if (!(opts.spacing > 0.0)) throw UsageError("leaf spacing h must be positive");
  const LinearData& lin = map.linearization();
  const double lambda = expansion_modulus(lin, sigma);
  int n = opts.horizon;
  if (n <= 0) n = std::max(1, static_cast<int>(std::ceil(std::log(R / opts.seed_scale) / std::log(lambda))));
  if (n > opts.max_horizon) throw HorizonTooSmall("required horizon exceeds the depth cap");
  const StrongChart chart = make_chart(map, sigma, x, n, opts.frame_horizon);
  const double h = opts.spacing;

  const double seed_cap = 1e-3;
  double lo = -1.25 * R / std::pow(lambda, n), hi = -lo;
  std::vector<Node> nodes = push_all(map, chart, linspace(lo, hi, 65), opts.exec);
  const Node base = push_node(map, chart, 0.0);
  merge_nodes(nodes, {base});
  refine(map, chart, nodes, h, opts.exec);

  auto base_index = [&]() {
    return static_cast<std::size_t>(
        std::find_if(nodes.begin(), nodes.end(), [&](const Node& nd) { return nd.s == base.s; }) - nodes.begin());
  };
  for (int grow = 0;; ++grow) {
    const std::size_t b = base_index();
    double before = 0.0, after = 0.0;
    for (std::size_t i = b; i > 0; --i) before += (nodes[i].w - nodes[i - 1].w).norm();
    for (std::size_t i = b; i + 1 < nodes.size(); ++i) after += (nodes[i + 1].w - nodes[i].w).norm();
    if (before >= R && after >= R) break;
    if (grow > 40 || hi - lo > 2.0 * seed_cap) throw HorizonTooSmall("horizon too small for the requested arc length");
    std::vector<double> extra;
    const double span = hi - lo;
    auto widen = [&](double have) {
      return span * std::clamp(1.3 * (R - have) / std::max(before + after, 1e-300), 0.1, 1.0);
    };
    if (before < R) {
      const double nlo = lo - widen(before);
      const auto add = linspace(nlo, lo, 33);
      extra.insert(extra.end(), add.begin(), add.end() - 1);
      lo = nlo;
    }
    if (after < R) {
      const double nhi = hi + widen(after);
      const auto add = linspace(hi, nhi, 33);
      extra.insert(extra.end(), add.begin() + 1, add.end());
      hi = nhi;
    }
    merge_nodes(nodes, push_all(map, chart, extra, opts.exec));
    refine(map, chart, nodes, h, opts.exec);
  }

  const std::size_t b = base_index();
  std::vector<Vec3> offsets(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) offsets[i] = nodes[i].w;
  const std::vector<double> arc = cumulative_arc(offsets, b);
  std::size_t first = b, last = b;
  while (first > 0 && arc[first] > -R) --first;
  while (last + 1 < nodes.size() && arc[last] < R) ++last;

  LeafSegment leaf;
  leaf.sigma = sigma;
  leaf.base = x;
  leaf.base_index = b - first;
  leaf.spacing = h;
  leaf.horizon = n;
  const Vec3 origin = nodes[b].w;
  for (std::size_t i = first; i <= last; ++i) {
    leaf.vertices.push_back(i == b ? x : Vec3(x + (nodes[i].w - origin)));
    leaf.arc.push_back(arc[i]);
    leaf.tangents.push_back(nodes[i].t);
    leaf.log_stretch.push_back(nodes[i].log_stretch);
    leaf.parameter.push_back(nodes[i].s);
  }
  leaf.chart = chart;

  double chord_angle = 0.0;
  for (std::size_t i = 0; i + 1 < leaf.size(); ++i) {
    const Vec3 chord = leaf.vertices[i + 1] - leaf.vertices[i];
    if (chord.norm() > 0.0) chord_angle = std::max(chord_angle, line_angle(chord, leaf.tangents[i]));
  }
  leaf.max_chord_angle = chord_angle;
  if (chord_angle > opts.chord_tolerance) {
    std::ostringstream os;
    os << "chord deviates from the tangent by " << chord_angle << " rad; spacing h too coarse";
    throw TangencyViolation(os.str());
  }
  const int checks = std::min<int>(opts.tangency_checks, static_cast<int>(leaf.size()));
  std::vector<double> defects(checks, 0.0);
  for_each_index(static_cast<std::size_t>(checks), opts.exec, [&](std::size_t c) {
    const std::size_t i = checks == 1 ? leaf.base_index : c * (leaf.size() - 1) / (checks - 1);
    const FrameEstimate f = estimate_frame(map, leaf.vertices[i], opts.frame_horizon);
    defects[c] = line_angle(f.directions[index(sigma)], leaf.tangents[i]);
  });
  for (double d : defects) leaf.max_tangency_defect = std::max(leaf.max_tangency_defect, d);
  if (leaf.max_tangency_defect > opts.tangency_tolerance) {
    std::ostringstream os;
    os << "vertex tangent deviates from e_" << to_string(sigma) << " by " << leaf.max_tangency_defect << " rad";
    throw TangencyViolation(os.str());
  }
  return leaf;
}

LeafSegment trace_center_leaf(const TorusMap& map, const Vec3& x, double R, const LeafOptions& opts) {
  if (!(R > 0.0)) throw UsageError("leaf length R must be positive");
  const double hc = opts.spacing / 10.0;
  const int steps = static_cast<int>(std::ceil(R / hc)) + 1;
  auto field = [&](const Vec3& p, const Vec3& along) {
    Vec3 e = estimate_frame(map, p, opts.frame_horizon).directions[index(Sigma::c)];
    return e.dot(along) < 0 ? Vec3(-e) : e;
  };
  const Vec3 e0 = estimate_frame(map, x, opts.frame_horizon).directions[index(Sigma::c)];
  std::array<std::vector<Vec3>, 2> sides;
  std::array<std::vector<Vec3>, 2> side_tangents;
  std::array<double, 2> sign{1.0, -1.0};
  for_each_index(2, opts.exec, [&](std::size_t side) {
    Vec3 p = x;
    Vec3 e = sign[side] * e0;
    double travelled = 0.0;
    for (int k = 0; k < steps && travelled < R + hc; ++k) {
      const Vec3 predictor = p + hc * e;
      const Vec3 e_pred = field(predictor, e);
      const Vec3 next = p + 0.5 * hc * (e + e_pred);
      travelled += (next - p).norm();
      p = next;
      e = field(p, e_pred);
      sides[side].push_back(p);
      side_tangents[side].push_back(sign[side] * e);
    }
  });
  LeafSegment leaf;
  leaf.sigma = Sigma::c;
  leaf.base = x;
  leaf.spacing = opts.spacing;
  for (std::size_t i = sides[1].size(); i > 0; --i) {
    leaf.vertices.push_back(sides[1][i - 1]);
    leaf.tangents.push_back(side_tangents[1][i - 1]);
  }
  leaf.base_index = leaf.vertices.size();
  leaf.vertices.push_back(x);
  leaf.tangents.push_back(e0);
  for (std::size_t i = 0; i < sides[0].size(); ++i) {
    leaf.vertices.push_back(sides[0][i]);
    leaf.tangents.push_back(side_tangents[0][i]);
  }
  leaf.arc = cumulative_arc(leaf.vertices, leaf.base_index);
  double chord_angle = 0.0;
  for (std::size_t i = 0; i + 1 < leaf.size(); ++i)
    chord_angle = std::max(chord_angle, line_angle(leaf.vertices[i + 1] - leaf.vertices[i], leaf.tangents[i]));
  leaf.max_chord_angle = chord_angle;
  return leaf;
}

LeafSegment trace_leaf(const TorusMap& map, Sigma sigma, const Vec3& x, double R, const LeafOptions& opts) {
  return sigma == Sigma::c ? trace_center_leaf(map, x, R, opts) : trace_strong_leaf(map, sigma, x, R, opts);
}

std::size_t LeafSegment::segment_at_arc(double a) const {
  if (arc.size() < 2) return 0;
  auto it = std::upper_bound(arc.begin(), arc.end(), a);
  std::size_t i = it == arc.begin() ? 0 : static_cast<std::size_t>(it - arc.begin()) - 1;
  return std::min(i, arc.size() - 2);
}

Vec3 LeafSegment::point_at_arc(double a) const {
  const std::size_t i = segment_at_arc(a);
  const double len = arc[i + 1] - arc[i];
  const double t = len > 0 ? std::clamp((a - arc[i]) / len, 0.0, 1.0) : 0.0;
  return vertices[i] + t * (vertices[i + 1] - vertices[i]);
}

namespace {

std::vector<std::size_t> subsample(std::size_t n, std::size_t m) {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  m = std::min(m, n);
  for (std::size_t k = 0; k < m; ++k) idx.push_back(m == 1 ? 0 : k * (n - 1) / (m - 1));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

}  // namespace

QuasiIsometryReport quasi_isometry_constant(const LeafSegment& leaf, double r_min, std::size_t sample) {
  if (!(r_min > 0.0)) throw UsageError("r_min must be positive");
  const double total = leaf.arc.back() - leaf.arc.front();
  if (total < 2.0 * r_min) throw InsufficientScale("leaf shorter than 2 r_min");
  QuasiIsometryReport rep;
  rep.sigma = leaf.sigma;
  rep.r_min = r_min;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const auto idx = subsample(leaf.size(), sample);
  int buckets = 1;
  while (r_min * std::pow(2.0, buckets) < total) ++buckets;
  rep.bucket_lower.resize(buckets);
  rep.bucket_max.assign(buckets, 0.0);
  for (int b = 0; b < buckets; ++b) rep.bucket_lower[b] = r_min * std::pow(2.0, b);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t c = a + 1; c < idx.size(); ++c) {
      const std::size_t i = idx[a], j = idx[c];
      const double chord = (leaf.vertices[j] - leaf.vertices[i]).norm();
      if (chord < r_min) continue;
      const double dw = leaf.arc[j] - leaf.arc[i];
      ++rep.pairs;
      const double ratio = dw / chord;
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      rep.min_margin = std::min(rep.min_margin, dw - chord);
      const int b = std::min(buckets - 1, static_cast<int>(std::floor(std::log2(chord / r_min))));
      rep.bucket_max[b] = std::max(rep.bucket_max[b], ratio);
    }
  }
  double prev = std::numeric_limits<double>::infinity();
  for (int b = 0; b < buckets; ++b) {
    if (rep.bucket_max[b] == 0.0) continue;
    if (rep.bucket_max[b] > prev * (1.0 + 1e-9)) rep.non_increasing = false;
    prev = rep.bucket_max[b];
  }
  if (rep.pairs == 0) throw InsufficientScale("no vertex pairs at distance >= r_min");
  return rep;
}

std::vector<DirectionSample> asymptotic_direction(const LeafSegment& leaf, const Vec3& eigen_direction,
                                                  const std::vector<double>& radii) {
  std::vector<DirectionSample> out;
  const Vec3& x = leaf.vertices[leaf.base_index];
  for (double r : radii) {
    for (int side : {1, -1}) {
      std::int64_t i = static_cast<std::int64_t>(leaf.base_index);
      const std::int64_t end = side > 0 ? static_cast<std::int64_t>(leaf.size()) : -1;
      std::int64_t hit = -1;
      for (; i != end; i += side) {
        if ((leaf.vertices[i] - x).norm() >= r) {
          hit = i;
          break;
        }
      }
      if (hit < 0) throw InsufficientScale("leaf too short for radius " + std::to_string(r));
      DirectionSample d;
      d.radius = r;
      d.side = side;
      const Vec3 v = leaf.vertices[hit] - x;
      d.chord = v.norm();
      d.direction = v / d.chord;
      d.angle = line_angle(d.direction, eigen_direction);
      out.push_back(d);
    }
  }
  return out;
}

ComparabilityReport large_scale_comparability(const TorusMap& map, const LeafSegment& leaf, int k, double c_target,
                                              double m_min, std::size_t sample) {
  if (k < 1) throw UsageError("comparability needs k >= 1");
  const LinearData& lin = map.linearization();
  const Mat3 ak = lin.matrix.power(k).to_real();
  const double growth = std::pow(lin.modulus(leaf.sigma), k);
  const auto idx = subsample(leaf.size(), sample);
  std::vector<Lifted> images(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    Lifted p = Lifted::from_point(leaf.vertices[idx[a]]);
    for (int i = 0; i < k; ++i) p = map.step(p);
    images[a] = p;
  }
  struct PairRatio {
    double chord, prop, lemma;
  };
  std::vector<PairRatio> pairs;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t c = a + 1; c < idx.size(); ++c) {
      const Vec3 d = leaf.vertices[idx[c]] - leaf.vertices[idx[a]];
      const double chord = d.norm();
      if (chord < m_min) continue;
      const double linear = (ak * d).norm();
      pairs.push_back({chord, images[c].minus(images[a]).norm() / linear, linear / (growth * chord)});
    }
  if (pairs.empty()) throw InsufficientScale("no leaf pairs at distance >= " + std::to_string(m_min));
  ComparabilityReport rep;
  rep.k = k;
  rep.c_target = c_target;
  rep.pairs = pairs.size();
  rep.prop_min = rep.lemma_min = std::numeric_limits<double>::infinity();
  rep.prop_max = rep.lemma_max = 0.0;
  double worst_violation = 0.0;
  bool any_violation = false;
  for (const auto& p : pairs) {
    rep.prop_min = std::min(rep.prop_min, p.prop);
    rep.prop_max = std::max(rep.prop_max, p.prop);
    rep.lemma_min = std::min(rep.lemma_min, p.lemma);
    rep.lemma_max = std::max(rep.lemma_max, p.lemma);
    const bool inside = p.prop > 1.0 / c_target && p.prop < c_target && p.lemma > 1.0 / c_target && p.lemma < c_target;
    if (!inside) {
      any_violation = true;
      worst_violation = std::max(worst_violation, p.chord);
    }
  }
  double max_chord = 0.0;
  for (const auto& p : pairs) max_chord = std::max(max_chord, p.chord);
  if (!any_violation) rep.reported_m = m_min;
  else if (worst_violation >= max_chord) rep.reported_m = std::numeric_limits<double>::infinity();
  else rep.reported_m = worst_violation;
  rep.prop_min_beyond = std::numeric_limits<double>::infinity();
  rep.prop_max_beyond = 0.0;
  for (const auto& p : pairs) {
    if (any_violation && !(p.chord > rep.reported_m)) continue;
    rep.prop_min_beyond = std::min(rep.prop_min_beyond, p.prop);
    rep.prop_max_beyond = std::max(rep.prop_max_beyond, p.prop);
  }
  return rep;
}

std::string leaf_csv(const LeafSegment& leaf) {
  std::ostringstream os;
  os.precision(17);
  os << "arc_length,x1,x2,x3\n";
  for (std::size_t i = 0; i < leaf.size(); ++i)
    os << leaf.arc[i] << ',' << leaf.vertices[i](0) << ',' << leaf.vertices[i](1) << ',' << leaf.vertices[i](2) << '\n';
  return os.str();
}

double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double cell = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) cell = std::max(cell, (b[i + 1] - b[i]).norm());
  for (std::size_t i = 0; i + 1 < a.size(); ++i) cell = std::max(cell, (a[i + 1] - a[i]).norm());
  cell = std::max(cell, 1e-6) * 4.0;
  auto segment_distance = [](const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
  };
  auto directed = [&](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    SpatialIndex index(to, cell);
    double worst = 0.0;
    for (const auto& p : from) {
      double d;
      const std::int64_t j = index.nearest(p, 1, &d);
      if (j < 0) return std::numeric_limits<double>::infinity();
      if (j > 0) d = std::min(d, segment_distance(p, to[j - 1], to[j]));
      if (j + 1 < static_cast<std::int64_t>(to.size())) d = std::min(d, segment_distance(p, to[j], to[j + 1]));
      worst = std::max(worst, d);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace ph3

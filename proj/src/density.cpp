#include "ph3/density.hpp"

#include "ph3/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ph3 {
namespace {

// Cumulative log-stretch of the chart curve at parameter s after `stage` steps.
double stage_log_stretch(const TorusMap& map, const StrongChart& chart, double s, int stage) {
  const bool inverse = chart.sigma == Sigma::s;
  Vec3 w = s * chart.direction;
  Vec3 t = chart.direction;
  double total = 0.0;
  for (int k = 0; k < stage; ++k) {
    map.step_offset(chart.reference[k], w, &t, inverse);
    const double len = t.norm();
    total += std::log(len);
    t /= len;
  }
  return total;
}

void require_strong(const LeafSegment& leaf) {
  if (leaf.sigma == Sigma::c)
    throw UnsupportedDirection("no closed-form density along center leaves; use the empirical mode");
  if (leaf.log_stretch.size() != leaf.size() || leaf.chart.horizon == 0)
    throw UsageError("leaf carries no chart; trace it with trace_strong_leaf");
}

std::size_t vertex_at_arc(const LeafSegment& leaf, double a) {
  const auto it = std::lower_bound(leaf.arc.begin(), leaf.arc.end(), a);
  if (it == leaf.arc.end()) return leaf.size() - 1;
  return static_cast<std::size_t>(it - leaf.arc.begin());
}

}  // namespace

TailModel calibrate_tail(const TorusMap& map, const LeafSegment& leaf, Execution exec) {
  require_strong(leaf);
  const StrongChart& chart = leaf.chart;
  std::vector<std::size_t> probes;
  for (double r : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    for (double side : {-1.0, 1.0}) {
      const double a = side * r;
      if (a < leaf.arc.front() || a > leaf.arc.back()) continue;
      const std::size_t i = vertex_at_arc(leaf, a);
      if (i != leaf.base_index) probes.push_back(i);
    }
  }
  const StageHistory base = stage_history(map, chart, leaf.parameter[leaf.base_index]);
  std::vector<StageHistory> hist(probes.size());
  for_each_index(probes.size(), exec,
                 [&](std::size_t p) { hist[p] = stage_history(map, chart, leaf.parameter[probes[p]]); });

  TailModel model;
  double min_inc = std::numeric_limits<double>::infinity();
  for (double inc : base.increments) min_inc = std::min(min_inc, inc);
  std::vector<double> lx, ly;
  for (const auto& h : hist) {
    for (std::size_t k = 0; k < h.increments.size(); ++k) {
      min_inc = std::min(min_inc, h.increments[k]);
      const double d = (h.offsets[k] - base.offsets[k]).norm();
      const double gap = std::abs(h.increments[k] - base.increments[k]);
      if (d > 0.1 || d <= 0.0 || gap < 1e-12) continue;
      lx.push_back(std::log(d));
      ly.push_back(std::log(gap));
    }
  }
  model.lambda_min = std::exp(min_inc);
  model.samples = lx.size();
  if (lx.empty()) return model;
  double alpha = 1.0;
  if (lx.size() >= 3) {
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / n, my += ly[i] / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx > 1.0) alpha = std::clamp(sxy / sxx, 0.05, 1.0);
  }
  double c1 = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) c1 = std::max(c1, std::exp(ly[i] - alpha * lx[i]));
  model.alpha = alpha;
  model.c1 = 2.0 * c1;
  return model;
}

double tail_bound(const TailModel& model, double distance, int depth) {
  if (model.c1 == 0.0) return 0.0;
  if (!(model.lambda_min > 1.0)) return std::numeric_limits<double>::infinity();
  const double la = std::pow(model.lambda_min, model.alpha);
  return model.c1 * std::pow(distance, model.alpha) * std::pow(la, -depth) / (la - 1.0);
}

int certified_depth(const TailModel& model, double distance, double tau, int cap) {
  if (model.c1 == 0.0 || distance == 0.0) return std::min(1, cap);
  if (!(model.lambda_min > 1.0)) throw TailNotCertified("leaf Jacobian does not expand at every sampled step");
  const double la = std::pow(model.lambda_min, model.alpha);
  const double need = std::log(model.c1 * std::pow(distance, model.alpha) / ((la - 1.0) * tau)) / std::log(la);
  const int depth = std::max(1, static_cast<int>(std::ceil(need)));
  if (depth > cap) {
    std::ostringstream os;
    os << "tail bound needs depth " << depth << " but the chart stops at " << cap;
    throw TailNotCertified(os.str());
  }
  return depth;
}

DeltaValue delta_at_depth(const TorusMap& map, const LeafSegment& leaf, std::size_t i, std::size_t j, int depth) {
  require_strong(leaf);
  const int n = leaf.chart.horizon;
  if (depth < 0 || depth > n) throw UsageError("depth outside the leaf chart");
  DeltaValue out;
  out.depth = depth;
  if (i == j) return out;
  const double li = leaf.log_stretch[i] - stage_log_stretch(map, leaf.chart, leaf.parameter[i], n - depth);
  const double lj = leaf.log_stretch[j] - stage_log_stretch(map, leaf.chart, leaf.parameter[j], n - depth);
  out.log_value = li - lj;
  out.value = std::exp(out.log_value);
  return out;
}

DeltaValue delta(const TorusMap& map, const LeafSegment& leaf, const TailModel& model, std::size_t i, std::size_t j,
                 double tau) {
  require_strong(leaf);
  if (i == j) return {};
  const double d = std::abs(leaf.arc[j] - leaf.arc[i]);
  const int depth = certified_depth(model, d, tau, leaf.chart.horizon);
  DeltaValue out = delta_at_depth(map, leaf, i, j, depth);
  out.tail = tail_bound(model, d, depth);
  return out;
}

DeltaValue delta(const TorusMap& map, Sigma sigma, const Vec3& x, const Vec3& y, const DeltaOptions& opts) {
  if (sigma == Sigma::c)
    throw UnsupportedDirection("no closed-form density along center leaves; use the empirical mode");
  const double chord = (y - x).norm();
  LeafSegment leaf = trace_strong_leaf(map, sigma, x, 1.5 * chord + 1.0, opts.leaf);
  std::size_t near = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < leaf.size(); ++i) {
    const double d = (leaf.vertices[i] - y).norm();
    if (d < best) best = d, near = i;
  }
  // Newton in the seed parameter so y becomes an exact vertex of the leaf.
  const Vec3 origin = evaluate_chart(map, leaf.chart, leaf.parameter[leaf.base_index]).offset;
  const Vec3 target = origin + (y - x);
  double s = leaf.parameter[near];
  ChartPoint p = evaluate_chart(map, leaf.chart, s);
  for (int it = 0; it < 12; ++it) {
    const double ds = (target - p.offset).dot(p.tangent) / std::exp(p.log_stretch);
    s += ds;
    p = evaluate_chart(map, leaf.chart, s);
    if (std::abs(ds) * std::exp(p.log_stretch) < 1e-13) break;
  }
  const double miss = (target - p.offset).norm();
  if (miss > opts.leaf.on_leaf_tolerance) {
    std::ostringstream os;
    os << "y is " << miss << " away from the " << to_string(sigma) << "-leaf of x";
    throw NotOnLeaf(os.str());
  }
  const auto pos = std::upper_bound(leaf.parameter.begin(), leaf.parameter.end(), s) - leaf.parameter.begin();
  const auto at = static_cast<std::size_t>(pos);
  const double arc_before = at == 0 ? leaf.arc.front() : leaf.arc[at - 1];
  const Vec3 prev = at == 0 ? leaf.vertices.front() : leaf.vertices[at - 1];
  const double arc_y = arc_before + (x + (p.offset - origin) - prev).norm() * (at == 0 ? -1.0 : 1.0);
  leaf.vertices.insert(leaf.vertices.begin() + pos, x + (p.offset - origin));
  leaf.arc.insert(leaf.arc.begin() + pos, arc_y);
  leaf.tangents.insert(leaf.tangents.begin() + pos, p.tangent);
  leaf.log_stretch.insert(leaf.log_stretch.begin() + pos, p.log_stretch);
  leaf.parameter.insert(leaf.parameter.begin() + pos, s);
  if (at <= leaf.base_index) ++leaf.base_index;
  const TailModel model = calibrate_tail(map, leaf, opts.leaf.exec);
  return delta(map, leaf, model, leaf.base_index, at, opts.tau);
}

double trapezoid(const std::vector<double>& arc, const std::vector<double>& values) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < arc.size(); ++i) sum += 0.5 * (values[i] + values[i + 1]) * (arc[i + 1] - arc[i]);
  return sum;
}

double DensityProfile::mass(double a, double b) const {
  if (b < a) std::swap(a, b);
  a = std::max(a, arc.front());
  b = std::min(b, arc.back());
  if (!(b > a)) return 0.0;
  auto interp = [&](double t) {
    auto it = std::upper_bound(arc.begin(), arc.end(), t);
    std::size_t i = it == arc.begin() ? 0 : static_cast<std::size_t>(it - arc.begin()) - 1;
    i = std::min(i, arc.size() - 2);
    const double len = arc[i + 1] - arc[i];
    const double w = len > 0 ? (t - arc[i]) / len : 0.0;
    return rho[i] + w * (rho[i + 1] - rho[i]);
  };
  const auto lo = static_cast<std::size_t>(std::upper_bound(arc.begin(), arc.end(), a) - arc.begin());
  const auto hi = static_cast<std::size_t>(std::lower_bound(arc.begin(), arc.end(), b) - arc.begin());
  double sum = 0.0, prev_t = a, prev_v = interp(a);
  for (std::size_t i = lo; i < hi; ++i) {
    sum += 0.5 * (prev_v + rho[i]) * (arc[i] - prev_t);
    prev_t = arc[i];
    prev_v = rho[i];
  }
  sum += 0.5 * (prev_v + interp(b)) * (b - prev_t);
  return sum;
}

DensityProfile density_profile(const TorusMap& map, const LeafSegment& leaf, double tau, std::ptrdiff_t base,
                               Execution exec) {
  require_strong(leaf);
  const std::size_t b = base < 0 ? leaf.base_index : static_cast<std::size_t>(base);
  if (b >= leaf.size()) throw UsageError("profile base outside the leaf");
  DensityProfile prof;
  prof.sigma = leaf.sigma;
  prof.base_index = b;
  prof.arc = leaf.arc;
  prof.model = calibrate_tail(map, leaf, exec);
  const double reach = std::max(leaf.arc.back() - leaf.arc[b], leaf.arc[b] - leaf.arc.front());
  const int n = leaf.chart.horizon;
  prof.depth = certified_depth(prof.model, reach, tau, n);
  prof.tail = tail_bound(prof.model, reach, prof.depth);
  std::vector<double> partial(leaf.size());
  if (prof.model.c1 == 0.0) {
    for (std::size_t i = 0; i < leaf.size(); ++i) partial[i] = leaf.log_stretch[i];
  } else {
    for_each_index(leaf.size(), exec, [&](std::size_t i) {
      partial[i] = leaf.log_stretch[i] - stage_log_stretch(map, leaf.chart, leaf.parameter[i], n - prof.depth);
    });
  }
  prof.values.resize(leaf.size());
  for (std::size_t i = 0; i < leaf.size(); ++i) prof.values[i] = std::exp(partial[b] - partial[i]);
  prof.values[b] = 1.0;
  prof.normalizer = trapezoid(prof.arc, prof.values);
  prof.rho.resize(leaf.size());
  for (std::size_t i = 0; i < leaf.size(); ++i) prof.rho[i] = prof.values[i] / prof.normalizer;
  return prof;
}

double flatness_radius(const DensityProfile& profile, double threshold) {
  const std::size_t b = profile.base_index;
  double radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = b; i-- > 0;)
    if (std::abs(profile.values[i] - 1.0) > threshold) {
      radius = std::min(radius, profile.arc[b] - profile.arc[i]);
      break;
    }
  for (std::size_t i = b + 1; i < profile.values.size(); ++i)
    if (std::abs(profile.values[i] - 1.0) > threshold) {
      radius = std::min(radius, profile.arc[i] - profile.arc[b]);
      break;
    }
  if (std::isinf(radius)) radius = std::min(profile.arc[b] - profile.arc.front(), profile.arc.back() - profile.arc[b]);
  return radius;
}


DeltaValue center_delta(const TorusMap& map, const Vec3& x, const Vec3& y, int max_depth, int frame_horizon) {
  const LinearData& lin = map.linearization();
  const double mc = lin.modulus(Sigma::c);
  if (std::abs(mc - 1.0) < 1e-9)
    throw UnsupportedDirection("center direction is neutral; no center density formula applies");
  const bool pull_back = mc > 1.0;
  auto jacobian = [&](const Vec3& p) {
    const Vec3 e = estimate_frame(map, p, frame_horizon).directions[index(Sigma::c)];
    return std::log(((pull_back ? map.jacobian(p) : map.inverse_jacobian(p)) * e).norm());
  };
  DeltaValue out;
  if ((y - x).norm() == 0.0) return out;
  Vec3 a = reduce(x);
  Vec3 w = y - x;
  std::vector<double> gaps, dists, rates;
  for (int i = 1; i <= max_depth; ++i) {
    a = reduce(map.step_offset(a, w, nullptr, pull_back));
    const double ja = jacobian(a), jb = jacobian(a + w);
    gaps.push_back(ja - jb);
    dists.push_back(w.norm());
    rates.push_back(ja);
  }
  double c1 = 0.0, lambda = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    lambda = std::min(lambda, std::exp(rates[i]));
    if (dists[i] <= 0.1 && std::abs(gaps[i]) > 1e-12) c1 = std::max(c1, std::abs(gaps[i]) / dists[i]);
  }
  c1 *= 2.0;
  if (!(lambda > 1.0)) throw TailNotCertified("center Jacobian does not expand at every sampled step");
  double best = std::numeric_limits<double>::infinity();
  int depth = 1;
  for (int n = 1; n <= max_depth; ++n) {
    const double tail = c1 * dists[n - 1] / (lambda - 1.0);
    if (tail < best) best = tail, depth = n;
  }
  double sum = 0.0;
  for (int i = 0; i < depth; ++i) sum += gaps[i];
  out.depth = depth;
  out.tail = best;
  out.log_value = sum;
  out.value = std::exp(sum);
  return out;
}

}  // namespace ph3

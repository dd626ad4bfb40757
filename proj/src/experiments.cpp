#include "ph3/experiments.hpp"

#include "ph3/catalog.hpp"
#include "ph3/leaves.hpp"

#include <algorithm>
#include <cmath>

namespace ph3 {

std::string_view to_string(RigidityVerdict v) {
  switch (v) {
    case RigidityVerdict::rigid_consistent: return "rigid-consistent";
    case RigidityVerdict::inequality_consistent: return "inequality-consistent";
    case RigidityVerdict::violation: return "violation";
  }
  return "violation";
}

namespace {

double bound(double stderr_) { return decision_sigmas * stderr_ + rounding_floor; }

SeedCluster summarize(const LyapunovReport& e, std::vector<std::size_t> members) {
  SeedCluster c;
  c.seeds = std::move(members);
  const double m = static_cast<double>(c.seeds.size());
  for (int k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (std::size_t i : c.seeds) mean += e.per_seed[i].exponents[k];
    mean /= m;
    double var = 0.0;
    for (std::size_t i : c.seeds) var += std::pow(e.per_seed[i].exponents[k] - mean, 2);
    c.exponents[k] = mean;
    c.stderr_[k] = c.seeds.size() >= 2 ? std::sqrt(var / (m - 1.0) / m) : e.per_seed[c.seeds[0]].stderr_batch[k];
  }
  return c;
}

}  // namespace

std::vector<SeedCluster> seed_clusters(const LyapunovReport& ensemble) {
  const std::size_t n = ensemble.per_seed.size();
  if (n == 0) return {};
  const int u = index(Sigma::u);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ensemble.per_seed[a].exponents[u] < ensemble.per_seed[b].exponents[u];
  });
  std::vector<double> noise;
  for (const auto& s : ensemble.per_seed) noise.push_back(s.stderr_batch[u]);
  std::nth_element(noise.begin(), noise.begin() + static_cast<std::ptrdiff_t>(n / 2), noise.end());
  const double scale = noise[n / 2];

  std::vector<SeedCluster> out;
  std::vector<std::size_t> current{order[0]};
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = ensemble.per_seed[order[i]].exponents[u] - ensemble.per_seed[order[i - 1]].exponents[u];
    if (scale > 0.0 && gap > cluster_gap * scale) {
      out.push_back(summarize(ensemble, current));
      current.clear();
    }
    current.push_back(order[i]);
  }
  out.push_back(summarize(ensemble, current));
  return out;
}

RigidityReport run_rigidity(const TorusMap& map, std::size_t seeds, std::size_t n, std::uint64_t master_seed,
                            std::size_t burn_in, Execution exec) {
  const LyapunovReport e = lyapunov_ensemble(map, seeds, master_seed, n, burn_in, exec);
  const LinearData& lin = map.linearization();
  RigidityReport r;
  r.spec = map.spec();
  r.seeds = seeds;
  r.n = n;
  r.burn_in = burn_in;
  r.master_seed = master_seed;
  r.exponents = e.exponents;
  r.stderr_ = e.stderr_;
  r.per_seed = e.per_seed;
  r.rigid = true;
  for (int k = 0; k < 3; ++k) {
    r.linear[k] = lin.exponents[k];
    r.difference[k] = r.exponents[k] - r.linear[k];
    if (std::abs(r.difference[k]) > bound(r.stderr_[k])) r.rigid = false;
  }
  const int s = index(Sigma::s), u = index(Sigma::u);
  r.inequality = r.difference[u] <= bound(r.stderr_[u]) && r.difference[s] >= -bound(r.stderr_[s]);
  r.strict_drop = r.difference[u] < -bound(r.stderr_[u]);
  r.verdict = r.rigid        ? RigidityVerdict::rigid_consistent
              : r.inequality ? RigidityVerdict::inequality_consistent
                             : RigidityVerdict::violation;
  r.clusters = seed_clusters(e);
  return r;
}

SweepReport run_sweep(const std::string& family, const FamilyGenerator& generator, std::vector<double> grid,
                      std::size_t seeds, std::size_t n, std::uint64_t master_seed, int flip_coordinate,
                      double separation_radius, Execution exec) {
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) throw UsageError("sweep grid must contain epsilon = 0");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  SweepReport r;
  r.family = family;
  r.seeds = seeds;
  r.n = n;
  r.master_seed = master_seed;
  r.flip_coordinate = flip_coordinate;
  r.separation_radius = separation_radius;
  const int u = index(Sigma::u);
  for (double eps : grid) {
    SweepPoint p;
    p.epsilon = eps;
    const TorusMap f(generator(eps));
    p.map = f.name();
    const LyapunovReport e = lyapunov_ensemble(f, seeds, master_seed, n, default_burn_in, exec);
    p.mean = e.exponents[u];
    p.stderr_ = e.stderr_[u];
    if (flip_coordinate >= 0 && eps < 0.0) {
      const TorusMap mirror(flip_conjugate(generator(-eps), flip_coordinate));
      const LyapunovReport m = lyapunov_ensemble(mirror, seeds, master_seed, n, default_burn_in, exec);
      p.mirror_mean = m.exponents[u];
      p.mirror_stderr = m.stderr_[u];
      p.has_mirror = true;
      if (std::abs(p.mean - p.mirror_mean) > bound(std::hypot(p.stderr_, p.mirror_stderr))) r.symmetric = false;
    }
    r.points.push_back(p);
  }
  const auto zero = std::find_if(r.points.begin(), r.points.end(), [](const SweepPoint& p) { return p.epsilon == 0.0; });
  const auto best = std::max_element(r.points.begin(), r.points.end(),
                                     [](const SweepPoint& a, const SweepPoint& b) { return a.mean < b.mean; });
  r.argmax = best->epsilon;
  r.max_at_zero = true;
  r.separated = true;
  for (const auto& p : r.points) {
    if (p.epsilon == 0.0) continue;
    if (p.mean - zero->mean > bound(std::hypot(p.stderr_, zero->stderr_))) r.max_at_zero = false;
    if (std::abs(p.epsilon) >= separation_radius &&
        !(p.mean + decision_sigmas * p.stderr_ < zero->mean - decision_sigmas * zero->stderr_))
      r.separated = false;
  }
  return r;
}

CenterTopologyReport run_center_topology(const TorusMap& map, std::size_t seeds, std::size_t n, std::size_t leaves,
                                         std::uint64_t master_seed, Execution exec) {
  const LinearData& lin = map.linearization();
  if (std::abs(lin.modulus(Sigma::c) - 1.0) > 1e-12)
    throw UsageError("center topology needs a center eigenvalue of modulus 1");
  CenterTopologyReport r;
  r.spec = map.spec();
  const LyapunovReport e = lyapunov_ensemble(map, seeds, master_seed, n, default_burn_in, exec);
  r.exponent = e.exponents[index(Sigma::c)];
  r.stderr_ = e.stderr_[index(Sigma::c)];
  r.exponent_zero = std::abs(r.exponent) <= center_exponent_tolerance;

  int axis = -1;
  const Vec3& ec = lin.direction(Sigma::c);
  for (int i = 0; i < 3; ++i)
    if (std::abs(std::abs(ec(i)) - 1.0) < 1e-12) axis = i;
  r.verdict_applies = axis >= 0;
  auto touches = [axis](const ShearStep& s) { return s.source == axis || s.target == axis; };
  for (const auto& s : map.spec().pre_shears)
    if (touches(s)) r.verdict_applies = false;
  for (const auto& s : map.spec().conjugator)
    if (touches(s)) r.verdict_applies = false;

  r.starts = seed_points(leaves, master_seed ^ 0x9e3779b97f4a7c15ULL);
  r.closure.assign(leaves, 0.0);
  LeafOptions opts;
  opts.spacing = 1e-3;
  opts.exec = Execution::serial;
  for_each_index(leaves, exec, [&](std::size_t i) {
    const LeafSegment leaf = trace_center_leaf(map, r.starts[i], 1.0 + 10.0 * opts.spacing, opts);
    r.closure[i] = torus_distance(reduce(leaf.point_at_arc(1.0)), reduce(r.starts[i]));
  });
  for (double c : r.closure) r.max_closure = std::max(r.max_closure, c);
  r.closes = r.max_closure <= closure_tolerance;
  return r;
}

AnosovCenterReport run_anosov_center_inequality(const TorusMap& map, std::size_t seeds, std::size_t n,
                                                std::uint64_t master_seed, Execution exec) {
  const LinearData& lin = map.linearization();
  if (!lin.anosov || !(lin.modulus(Sigma::c) > 1.0))
    throw UsageError("center inequality needs an Anosov linear part with expanding middle direction");
  AnosovCenterReport r;
  r.spec = map.spec();
  const LyapunovReport e = lyapunov_ensemble(map, seeds, master_seed, n, default_burn_in, exec);
  r.exponent = e.exponents[index(Sigma::c)];
  r.stderr_ = e.stderr_[index(Sigma::c)];
  r.linear = lin.exponent(Sigma::c);
  r.margin = r.linear - r.exponent;
  r.holds = r.exponent <= r.linear + bound(r.stderr_);
  return r;
}

}  // namespace ph3

#include "ph3/box.hpp"

#include "ph3/cocycle.hpp"
#include "ph3/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ph3 {

bool FoliatedBox::interior(std::size_t p) const {
  const auto [i, j] = grid_index[p];
  return i > 0 && j > 0 && i < grid - 1 && j < grid - 1;
}

FoliatedBox build_foliated_box(const TorusMap& map, Sigma sigma, const Vec3& x, double R, double disk_radius,
                               int plaque_count, const BoxOptions& opts) {
  if (!(R > 0.0) || !(disk_radius > 0.0)) throw UsageError("box needs R > 0 and disk radius > 0");
  const int g = static_cast<int>(std::lround(std::sqrt(static_cast<double>(plaque_count))));
  if (plaque_count < 1 || g * g != plaque_count) throw UsageError("plaque count must be a perfect square");
  const LinearData& lin = map.linearization();
  std::array<Sigma, 2> others{};
  int o = 0;
  for (Sigma s : all_sigmas)
    if (s != sigma) others[o++] = s;
  const Vec3 t1 = lin.direction(others[0]).normalized();
  const Vec3 t2 = (lin.direction(others[1]) - lin.direction(others[1]).dot(t1) * t1).normalized();

  FoliatedBox box;
  box.sigma = sigma;
  box.center = x;
  box.length = R;
  box.disk_radius = disk_radius;
  box.grid = g;
  box.step = g > 1 ? 2.0 * disk_radius / (g - 1) : 2.0 * disk_radius;
  box.frame.col(0) = t1;
  box.frame.col(1) = t2;
  box.frame.col(2) = lin.direction(sigma);
  double closest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double a = g > 1 ? -disk_radius + i * box.step : 0.0;
      const double b = g > 1 ? -disk_radius + j * box.step : 0.0;
      box.disk.push_back(x + a * t1 + b * t2);
      box.grid_index.push_back({i, j});
      if (std::hypot(a, b) < closest) {
        closest = std::hypot(a, b);
        box.central = box.disk.size() - 1;
      }
    }

  // Plaques overhang the binned range so that interior tubes keep their
  // neighbours up to the ends.
  const double half = 0.5 * R + 4.0 * box.step;
  LeafOptions leaf_opts = opts.leaf;
  if (opts.leaf.exec == Execution::parallel) leaf_opts.exec = Execution::serial;
  box.plaques.resize(box.disk.size());
  for_each_index(box.disk.size(), opts.leaf.exec,
                 [&](std::size_t p) { box.plaques[p] = trace_leaf(map, sigma, box.disk[p], half, leaf_opts); });

  box.min_separation = std::numeric_limits<double>::infinity();
  if (opts.check_disjoint && box.plaques.size() > 1) {
    std::vector<Vec3> all;
    std::vector<std::uint32_t> owner;
    for (std::size_t p = 0; p < box.plaques.size(); ++p)
      for (const auto& v : box.plaques[p].vertices) {
        all.push_back(v);
        owner.push_back(static_cast<std::uint32_t>(p));
      }
    SpatialIndex index(all, box.step);
    for (std::size_t i = 0; i < all.size(); ++i)
      index.for_neighbours(all[i], 1, [&](std::size_t j) {
        if (owner[j] != owner[i]) box.min_separation = std::min(box.min_separation, (all[j] - all[i]).norm());
      });
    if (box.min_separation <= 0.5 * box.step) {
      std::ostringstream os;
      os << "plaques come within " << box.min_separation << " of each other (spacing " << box.step
         << "); shrink the disk";
      throw PlaqueCollision(os.str());
    }
  }
  return box;
}

namespace {

struct Assignment {
  std::uint32_t plaque;
  double arc;
};

}  // namespace

EmpiricalDisintegration empirical_disintegration(const FoliatedBox& box, std::size_t samples, int bins,
                                                 std::uint64_t seed, Execution exec) {
  if (bins < 1) throw UsageError("need at least one bin");
  if (box.grid < 3) throw UsageError("empirical disintegration needs a grid with interior plaques (>= 3 x 3)");
  std::vector<Vec3> all;
  std::vector<std::uint32_t> owner, local;
  for (std::size_t p = 0; p < box.plaques.size(); ++p)
    for (std::size_t i = 0; i < box.plaques[p].size(); ++i) {
      all.push_back(box.plaques[p].vertices[i]);
      owner.push_back(static_cast<std::uint32_t>(p));
      local.push_back(static_cast<std::uint32_t>(i));
    }
  const Mat3 to_local = box.frame.inverse();
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const auto& v : all) {
    const Vec3 c = to_local * (v - box.center);
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  lo -= Vec3::Constant(box.step);
  hi += Vec3::Constant(box.step);
  const SpatialIndex index(all, box.step);
  const double half = 0.5 * box.length;

  auto classify = [&](const Vec3& q, Assignment& out) {
    double best = std::numeric_limits<double>::infinity();
    bool end_cap = false;
    index.for_neighbours(q, 1, [&](std::size_t g) {
      const LeafSegment& leaf = box.plaques[owner[g]];
      const std::size_t i = local[g];
      for (std::size_t a : {i == 0 ? i : i - 1, i}) {
        if (a + 1 >= leaf.size()) continue;
        const Vec3 ab = leaf.vertices[a + 1] - leaf.vertices[a];
        const double len2 = ab.squaredNorm();
        const double raw = len2 > 0 ? (q - leaf.vertices[a]).dot(ab) / len2 : 0.0;
        const double t = std::clamp(raw, 0.0, 1.0);
        const double d = (q - (leaf.vertices[a] + t * ab)).norm();
        if (d < best) {
          best = d;
          out.plaque = owner[g];
          out.arc = leaf.arc[a] + t * (leaf.arc[a + 1] - leaf.arc[a]);
          end_cap = (a == 0 && raw < 0.0) || (a + 2 == leaf.size() && raw > 1.0);
        }
      }
    });
    return best <= box.step && !end_cap;
  };

  EmpiricalDisintegration out;
  out.seed = seed;
  out.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) out.edges[b] = -half + box.length * b / bins;
  std::vector<std::size_t> slot(box.plaques.size(), static_cast<std::size_t>(-1));
  for (std::size_t p = 0; p < box.plaques.size(); ++p)
    if (box.interior(p)) {
      slot[p] = out.plaques.size();
      PlaqueHistogram h;
      h.plaque = p;
      h.counts.assign(bins, 0);
      out.plaques.push_back(std::move(h));
    }

  constexpr std::size_t round_chunks = 16;
  const std::size_t max_draws = 1000 * samples + disintegration_chunk;
  std::uint64_t next_chunk = 0;
  while (out.samples < samples) {
    if (out.draws > max_draws) throw UsageError("box solid too thin for its bounding region");
    std::vector<std::vector<Assignment>> found(round_chunks);
    for_each_index(round_chunks, exec, [&](std::size_t c) {
      auto rng = task_rng(seed, next_chunk + c);
      Assignment a{};
      for (std::size_t k = 0; k < disintegration_chunk; ++k) {
        Vec3 u;
        for (int d = 0; d < 3; ++d) u(d) = lo(d) + (hi(d) - lo(d)) * uniform01(rng);
        if (classify(box.center + box.frame * u, a)) found[c].push_back(a);
      }
    });
    next_chunk += round_chunks;
    for (const auto& chunk : found) {
      for (std::size_t k = 0; k < chunk.size() && out.samples < samples; ++k) {
        ++out.samples;
        const Assignment& a = chunk[k];
        if (slot[a.plaque] == static_cast<std::size_t>(-1) || a.arc < -half || a.arc >= half) continue;
        const int b = std::min(bins - 1, static_cast<int>((a.arc + half) / box.length * bins));
        ++out.plaques[slot[a.plaque]].counts[b];
      }
      out.draws += disintegration_chunk;
      if (out.samples >= samples) break;
    }
  }
  const double width = box.length / bins;
  for (auto& h : out.plaques) {
    for (auto c : h.counts) h.samples += c;
    h.density.resize(bins);
    h.stderr_.resize(bins);
    for (int b = 0; b < bins; ++b) {
      const double n = static_cast<double>(h.samples);
      const double p = n > 0 ? h.counts[b] / n : 0.0;
      h.density[b] = p / width;
      h.stderr_[b] = n > 0 ? std::sqrt(p * (1.0 - p) / n) / width : 0.0;
      if (h.counts[b] < 10) h.empty_bin = true;
    }
    out.empty_bin = out.empty_bin || h.empty_bin;
  }
  return out;
}

std::vector<double> profile_bin_masses(const DensityProfile& profile, const std::vector<double>& edges) {
  std::vector<double> m(edges.size() - 1);
  double total = 0.0;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) total += m[b] = profile.mass(edges[b], edges[b + 1]);
  for (double& v : m) v /= total;
  return m;
}

double l1_distance(const PlaqueHistogram& hist, const std::vector<double>& edges, const std::vector<double>& masses) {
  double sum = 0.0;
  for (std::size_t b = 0; b < masses.size(); ++b) sum += std::abs(hist.density[b] * (edges[b + 1] - edges[b]) - masses[b]);
  return sum;
}

double l1_to_uniform(const PlaqueHistogram& hist, const std::vector<double>& edges) {
  std::vector<double> m(edges.size() - 1);
  const double total = edges.back() - edges.front();
  for (std::size_t b = 0; b < m.size(); ++b) m[b] = (edges[b + 1] - edges[b]) / total;
  return l1_distance(hist, edges, m);
}

std::string histogram_csv(const EmpiricalDisintegration& e) {
  std::ostringstream os;
  os.precision(17);
  os << "plaque_id,bin_center_arclength,density,stderr\n";
  for (const auto& h : e.plaques)
    for (std::size_t b = 0; b < h.density.size(); ++b)
      os << h.plaque << ',' << 0.5 * (e.edges[b] + e.edges[b + 1]) << ',' << h.density[b] << ',' << h.stderr_[b]
         << '\n';
  return os.str();
}

std::string_view to_string(UbdMode m) { return m == UbdMode::analytic ? "analytic" : "empirical"; }

std::string_view to_string(UbdVerdict v) {
  switch (v) {
    case UbdVerdict::bounded: return "bounded";
    case UbdVerdict::growing: return "growing";
    default: return "inconclusive";
  }
}

double top_decade_slope(const std::vector<double>& lengths, const std::vector<double>& k, std::size_t* points) {
  const double top = *std::max_element(lengths.begin(), lengths.end());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (lengths[i] >= top / 10.0 * (1.0 - 1e-12)) {
      lx.push_back(std::log(lengths[i]));
      ly.push_back(std::log(k[i]));
    }
  if (points) *points = lx.size();
  if (lx.size() < 2) return 0.0;
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / n, my += ly[i] / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

UbdVerdict ubd_verdict(double slope, std::size_t points) {
  if (points < 2) return UbdVerdict::inconclusive;
  if (slope > ubd_slope_threshold) return UbdVerdict::growing;
  if (slope >= -ubd_slope_threshold) return UbdVerdict::bounded;
  return UbdVerdict::inconclusive;
}

UbdReport ubd_constant(const TorusMap& map, Sigma sigma, const std::vector<double>& lengths, UbdMode mode,
                       const UbdOptions& opts) {
  if (lengths.empty()) throw UsageError("ubd needs at least one length");
  if (mode == UbdMode::analytic && sigma == Sigma::c)
    throw UnsupportedDirection("no closed-form density along center leaves; use the empirical mode");
  UbdReport rep;
  rep.sigma = sigma;
  rep.mode = mode;
  rep.lengths = lengths;
  rep.centers = seed_points(opts.centers, opts.seed);
  const std::size_t nc = rep.centers.size();
  std::vector<double> per(lengths.size() * nc, 1.0);
  for_each_index(per.size(), opts.exec, [&](std::size_t task) {
    const double R = lengths[task / nc];
    const Vec3& c = rep.centers[task % nc];
    BoxOptions bo;
    bo.leaf.exec = Execution::serial;
    double k = 1.0;
    if (mode == UbdMode::analytic) {
      bo.leaf.spacing = opts.spacing;
      const FoliatedBox box = build_foliated_box(map, sigma, c, R, opts.disk_radius, opts.plaque_count, bo);
      for (const auto& plaque : box.plaques) {
        const DensityProfile prof = density_profile(map, plaque, opts.tau, -1, Execution::serial);
        const double len = prof.length();
        for (double r : prof.rho) k = std::max({k, r * len, 1.0 / (r * len)});
      }
    } else {
      const double step = opts.plaque_count > 1
                              ? 2.0 * opts.disk_radius / (std::sqrt(static_cast<double>(opts.plaque_count)) - 1.0)
                              : 2.0 * opts.disk_radius;
      bo.leaf.spacing = std::min(opts.spacing, step / 10.0);
      const FoliatedBox box = build_foliated_box(map, sigma, c, R, opts.disk_radius, opts.plaque_count, bo);
      const auto e = empirical_disintegration(box, opts.samples, opts.bins, opts.seed + task, Execution::serial);
      for (const auto& h : e.plaques)
        for (double d : h.density) k = std::max({k, d * R, d > 0 ? 1.0 / (d * R) : std::numeric_limits<double>::infinity()});
    }
    per[task] = k;
  });
  rep.k.assign(lengths.size(), 1.0);
  for (std::size_t t = 0; t < per.size(); ++t) rep.k[t / nc] = std::max(rep.k[t / nc], per[t]);
  std::size_t points = 0;
  rep.slope = top_decade_slope(lengths, rep.k, &points);
  rep.verdict = ubd_verdict(rep.slope, points);
  return rep;
}

}  // namespace ph3

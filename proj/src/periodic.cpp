#include "ph3/periodic.hpp"

#include "ph3/cocycle.hpp"
#include "ph3/spatial_index.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ph3 {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

IntegerMatrix3 adjugate(const IntegerMatrix3& m) {
  IntegerMatrix3 adj;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const int r0 = (c + 1) % 3, r1 = (c + 2) % 3, c0 = (r + 1) % 3, c1 = (r + 2) % 3;
      adj(r, c) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  return adj;
}

IntegerMatrix3 shifted_power(const IntegerMatrix3& a, int p) { return a.power(p) - IntegerMatrix3::identity(); }

Cell primitive_kernel(const IntegerMatrix3& m) {
  for (int r0 = 0; r0 < 3; ++r0)
    for (int r1 = r0 + 1; r1 < 3; ++r1) {
      Cell w;
      w << m(r0, 1) * m(r1, 2) - m(r0, 2) * m(r1, 1), m(r0, 2) * m(r1, 0) - m(r0, 0) * m(r1, 2),
          m(r0, 0) * m(r1, 1) - m(r0, 1) * m(r1, 0);
      const std::int64_t g = std::gcd(std::gcd(w(0), w(1)), w(2));
      if (g == 0) continue;
      w /= g;
      for (int i = 0; i < 3; ++i)
        if (w(i) != 0) {
          if (w(i) < 0) w = -w;
          break;
        }
      return w;
    }
  return Cell::Zero();
}

/// Unimodular V with V e3 = w for a primitive w.
IntegerMatrix3 complete_basis(const Cell& w) {
  IntegerMatrix3 u = IntegerMatrix3::identity();
  Cell v = w;
  auto row_axpy = [&](int dst, int src, std::int64_t q) {
    v(dst) -= q * v(src);
    for (int c = 0; c < 3; ++c) u(dst, c) -= q * u(src, c);
  };
  for (;;) {
    int pivot = -1;
    for (int i = 0; i < 3; ++i)
      if (v(i) != 0 && (pivot < 0 || std::abs(v(i)) < std::abs(v(pivot)))) pivot = i;
    bool reduced = false;
    for (int j = 0; j < 3; ++j)
      if (j != pivot && v(j) != 0) {
        row_axpy(j, pivot, v(j) / v(pivot));
        reduced = true;
      }
    if (!reduced) {
      if (pivot != 2) {
        std::swap(v(pivot), v(2));
        for (int c = 0; c < 3; ++c) std::swap(u(pivot, c), u(2, c));
      }
      if (v(2) < 0) {
        v(2) = -v(2);
        for (int c = 0; c < 3; ++c) u(2, c) = -u(2, c);
      }
      break;
    }
  }
  return u.inverse();
}

/// Reduces x = num / den to [0,1)^3 and shifts the lattice vector accordingly.
std::pair<Vec3, Cell> reduce_solution(const Cell& num, std::int64_t den, const Cell& k, const IntegerMatrix3& m) {
  Cell shift;
  Vec3 x;
  for (int i = 0; i < 3; ++i) {
    shift(i) = floor_div(num(i), den);
    x(i) = static_cast<double>(num(i) - shift(i) * den) / static_cast<double>(den);
  }
  return {x, Cell(k - m.apply(shift))};
}

TorusMapSpec scaled(const TorusMapSpec& spec, double theta) {
  TorusMapSpec out = spec;
  for (auto& s : out.pre_shears) s.epsilon *= theta;
  for (auto& s : out.conjugator) s.epsilon *= theta;
  return out;
}

Vec3 iterate_cover(const TorusMap& f, const Vec3& x, int p, Mat3* jac) {
  Vec3 y = x;
  Mat3 acc = Mat3::Identity(), j;
  for (int i = 0; i < p; ++i) {
    y = f.step(y, jac ? &j : nullptr);
    if (jac) acc = j * acc;
  }
  if (jac) *jac = acc;
  return y;
}

struct Slice {
  Vec3 normal = Vec3::Zero();
  Vec3 anchor = Vec3::Zero();
};

bool newton(const TorusMap& f, int p, const Cell& k, Vec3& x, const Slice* slice, const PeriodicOptions& opts) {
  const Vec3 kd = k.cast<double>();
  auto residual = [&](const Vec3& z, Vec3& g) {
    g = iterate_cover(f, z, p, nullptr) - z - kd;
    double r = g.squaredNorm();
    if (slice) r += std::pow((z - slice->anchor).dot(slice->normal), 2);
    return std::sqrt(r);
  };
  Vec3 g;
  double r = residual(x, g);
  for (int it = 0; it < opts.max_iterations; ++it) {
    Mat3 dg;
    iterate_cover(f, x, p, &dg);
    dg -= Mat3::Identity();
    Vec3 dx;
    if (slice) {
      Eigen::Matrix<double, 4, 3> a;
      a.topRows<3>() = dg;
      a.row(3) = slice->normal.transpose();
      Eigen::Vector4d b;
      b.head<3>() = -g;
      b(3) = -(x - slice->anchor).dot(slice->normal);
      dx = a.colPivHouseholderQr().solve(b);
    } else {
      dx = dg.partialPivLu().solve(-g);
    }
    if (!dx.allFinite()) return false;
    double lambda = 1.0;
    Vec3 gt;
    Vec3 xt = x + dx;
    double rt = residual(xt, gt);
    while (!(rt < r) && lambda > 1e-6) {
      lambda *= 0.5;
      xt = x + lambda * dx;
      rt = residual(xt, gt);
    }
    if (!(rt < r)) break;
    x = xt, g = gt, r = rt;
    if ((lambda * dx).norm() < 1e-15 * (1.0 + x.norm())) break;
  }
  const Vec3 xr = reduce(x);
  return torus_distance(reduce(iterate_cover(f, xr, p, nullptr)), xr) <= opts.residual_tolerance;
}

class Continuation {
 public:
  Continuation(const TorusMap& map, int p, const PeriodicOptions& opts) : map_(map), p_(p), opts_(opts) {
    if (!map.is_linear())
      for (int j = 1; j < opts.continuation_steps; ++j)
        levels_.emplace_back(scaled(map.spec(), static_cast<double>(j) / opts.continuation_steps));
  }

  bool run(Vec3& x, const Cell& k, const Slice* slice) const {
    if (map_.is_linear()) return newton(map_, p_, k, x, slice, opts_);
    const int steps = opts_.continuation_steps;
    for (int j = 1; j <= steps; ++j)
      if (!advance(static_cast<double>(j - 1) / steps, static_cast<double>(j) / steps, j, x, k, slice, 0))
        return false;
    return true;
  }

 private:
  bool advance(double a, double b, int level, Vec3& x, const Cell& k, const Slice* slice, int depth) const {
    Vec3 trial = x;
    bool ok;
    if (level > 0) {
      const TorusMap& f = level == opts_.continuation_steps ? map_ : levels_[static_cast<std::size_t>(level - 1)];
      ok = newton(f, p_, k, trial, slice, opts_);
    } else {
      const TorusMap f(scaled(map_.spec(), b));
      ok = newton(f, p_, k, trial, slice, opts_);
    }
    if (ok) {
      x = trial;
      return true;
    }
    if (depth >= 4) return false;
    const double mid = 0.5 * (a + b);
    return advance(a, mid, 0, x, k, slice, depth + 1) && advance(mid, b, level, x, k, slice, depth + 1);
  }

  const TorusMap& map_;
  int p_;
  const PeriodicOptions& opts_;
  std::vector<TorusMap> levels_;
};

class TorusLocator {
 public:
  explicit TorusLocator(const std::vector<Vec3>& points) : points_(points), index_(points, 1e-3) {}

  std::ptrdiff_t find(const Vec3& q, double tolerance = 1e-6) const {
    std::array<std::vector<double>, 3> shifts;
    for (int i = 0; i < 3; ++i) {
      shifts[i] = {0.0};
      if (q(i) < tolerance) shifts[i].push_back(1.0);
      if (q(i) > 1.0 - tolerance) shifts[i].push_back(-1.0);
    }
    for (double a : shifts[0])
      for (double b : shifts[1])
        for (double c : shifts[2]) {
          double d = 0.0;
          const std::int64_t i = index_.nearest(q + Vec3(a, b, c), 1, &d);
          if (i >= 0 && d <= tolerance) return static_cast<std::ptrdiff_t>(i);
        }
    return -1;
  }

 private:
  const std::vector<Vec3>& points_;
  SpatialIndex index_;
};

bool lex_less(const Vec3& a, const Vec3& b) {
  return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

int minimal_period(const TorusMap& f, const Vec3& x, int p) {
  Vec3 y = x;
  for (int q = 1; q < p; ++q) {
    y = f.step(y, nullptr);
    if (p % q == 0 && torus_distance(reduce(y), x) < 1e-6) return q;
  }
  return p;
}

}  // namespace

std::vector<std::pair<Vec3, Cell>> linear_periodic_points(const IntegerMatrix3& a, int p) {
  if (p < 1) throw UsageError("period must be >= 1");
  const IntegerMatrix3 m = shifted_power(a, p);
  const std::int64_t det = m.det();
  if (det == 0) throw DegenerateJacobian("A^p - I is singular; the periodic set is not discrete");
  const IntegerMatrix3 h = hermite_column_basis(m);
  const IntegerMatrix3 adj = adjugate(m);
  std::vector<std::pair<Vec3, Cell>> out;
  out.reserve(static_cast<std::size_t>(std::abs(det)));
  Cell k;
  for (k(0) = 0; k(0) < h(0, 0); ++k(0))
    for (k(1) = 0; k(1) < h(1, 1); ++k(1))
      for (k(2) = 0; k(2) < h(2, 2); ++k(2)) out.push_back(reduce_solution(adj.apply(k), det, k, m));
  return out;
}

ContinuumDescriptor continuum_descriptor(const IntegerMatrix3& a, int p) {
  const IntegerMatrix3 m = shifted_power(a, p);
  ContinuumDescriptor d;
  d.invariants = smith_invariants(m);
  int rank = 0;
  d.components = 1;
  for (std::int64_t v : d.invariants)
    if (v != 0) ++rank, d.components *= v;
  d.kernel_dimension = 3 - rank;
  if (d.kernel_dimension == 1) d.direction = primitive_kernel(m);
  return d;
}

std::vector<std::pair<Vec3, Cell>> linear_continuum_samples(const IntegerMatrix3& a, int p, int slices) {
  const IntegerMatrix3 m = shifted_power(a, p);
  const ContinuumDescriptor desc = continuum_descriptor(a, p);
  if (desc.kernel_dimension != 1) return {};
  const Cell w = desc.direction;
  const IntegerMatrix3 v = complete_basis(w);
  const IntegerMatrix3 n = m * v;
  int ra = -1, rb = -1, rc = -1;
  std::int64_t den = 0;
  for (int i = 0; i < 3 && den == 0; ++i)
    for (int j = i + 1; j < 3 && den == 0; ++j) {
      den = n(i, 0) * n(j, 1) - n(i, 1) * n(j, 0);
      if (den != 0) ra = i, rb = j, rc = 3 - i - j;
    }
  IntegerMatrix3 block = IntegerMatrix3::identity();
  block(0, 0) = n(ra, 0), block(0, 1) = n(ra, 1), block(1, 0) = n(rb, 0), block(1, 1) = n(rb, 1);
  const IntegerMatrix3 h = hermite_column_basis(block);
  std::vector<std::pair<Vec3, Cell>> out;
  for (std::int64_t k0 = 0; k0 < h(0, 0); ++k0)
    for (std::int64_t k1 = 0; k1 < h(1, 1); ++k1) {
      const std::int64_t y0 = n(rb, 1) * k0 - n(ra, 1) * k1;
      const std::int64_t y1 = -n(rb, 0) * k0 + n(ra, 0) * k1;
      if ((n(rc, 0) * y0 + n(rc, 1) * y1) % den != 0) continue;
      Cell k;
      for (int r = 0; r < 3; ++r) k(r) = (n(r, 0) * y0 + n(r, 1) * y1) / den;
      for (int s = 0; s < slices; ++s) {
        // x = V (y0/den, y1/den, s/slices); numerators over den * slices.
        const std::int64_t scale = den * slices;
        Cell num;
        for (int r = 0; r < 3; ++r) num(r) = (v(r, 0) * y0 + v(r, 1) * y1) * slices + v(r, 2) * s * den;
        if (scale < 0) num = -num;
        out.push_back(reduce_solution(num, std::abs(scale), k, m));
      }
    }
  return out;
}

std::array<double, 3> periodic_data(const TorusMap& map, const Vec3& x, int p, int frame_horizon) {
  Mat3 j;
  iterate_cover(map, x, p, &j);
  Eigen::EigenSolver<Mat3> es(j);
  const auto values = es.eigenvalues();
  const auto vectors = es.eigenvectors();
  for (int i = 0; i < 3; ++i)
    if (std::abs(values(i).imag()) > 1e-9 * std::abs(values(i))) {
      std::ostringstream os;
      os << "Df^" << p << " has a non-real eigenvalue pair at (" << x.transpose() << ")";
      throw ComplexPair(os.str());
    }
  std::array<Vec3, 3> vec;
  for (int i = 0; i < 3; ++i) vec[i] = vectors.col(i).real().normalized();
  const FrameEstimate frame = estimate_frame(map, x, frame_horizon);
  std::array<int, 3> perm{0, 1, 2}, best = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (int s = 0; s < 3; ++s) score += std::abs(vec[perm[s]].dot(frame.directions[s]));
    if (score > best_score) best_score = score, best = perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::array<double, 3> out{};
  for (int s = 0; s < 3; ++s) out[s] = std::log(std::abs(values(best[s]).real())) / p;
  return out;
}

PeriodicSearch find_periodic_points(const TorusMap& map, int p, const PeriodicOptions& opts) {
  if (p < 1) throw UsageError("period must be >= 1");
  if (opts.continuation_steps < 1) throw UsageError("continuation needs at least one step");
  PeriodicSearch out;
  out.period = p;
  const IntegerMatrix3& a = map.linear_part();
  const std::int64_t det = shifted_power(a, p).det();
  const bool singular = det == 0;
  out.expected = singular ? 0 : std::abs(det);

  std::vector<std::pair<Vec3, Cell>> seeds;
  Vec3 normal = Vec3::Zero();
  if (singular) {
    out.continuum = continuum_descriptor(a, p);
    seeds = linear_continuum_samples(a, p, std::max(opts.slices, 1));
    normal = out.continuum->direction.cast<double>().normalized();
  } else {
    seeds = linear_periodic_points(a, p);
  }

  const Continuation cont(map, p, opts);
  std::vector<Vec3> found(seeds.size());
  std::vector<char> ok(seeds.size(), 0);
  for_each_index(seeds.size(), opts.exec, [&](std::size_t i) {
    Vec3 x = seeds[i].first;
    Slice slice{normal, seeds[i].first};
    if (cont.run(x, seeds[i].second, singular ? &slice : nullptr)) {
      found[i] = reduce(x);
      ok[i] = 1;
    }
  });
  std::vector<Vec3> points;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (ok[i]) points.push_back(found[i]);
    else ++out.diverged;
  std::sort(points.begin(), points.end(), lex_less);
  out.points = points.size();

  const TorusLocator locator(points);
  std::vector<std::ptrdiff_t> rep_of;
  if (singular) {
    for (std::size_t i = 0; i < points.size(); ++i) rep_of.push_back(static_cast<std::ptrdiff_t>(i));
  } else {
    out.count_matches = out.diverged == 0 && static_cast<std::int64_t>(points.size()) == out.expected;
    std::vector<char> visited(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (locator.find(points[i]) != static_cast<std::ptrdiff_t>(i)) out.count_matches = false;
      if (visited[i]) continue;
      visited[i] = 1;
      rep_of.push_back(static_cast<std::ptrdiff_t>(i));
      std::size_t cur = i;
      for (int q = 1; q <= p; ++q) {
        const std::ptrdiff_t next = locator.find(reduce(map.step(points[cur], nullptr)));
        if (next < 0) {
          out.count_matches = false;
          break;
        }
        if (static_cast<std::size_t>(next) == i) break;
        visited[static_cast<std::size_t>(next)] = 1;
        cur = static_cast<std::size_t>(next);
      }
    }
  }

  std::vector<PeriodicOrbit> orbits(rep_of.size());
  std::vector<char> complex(rep_of.size(), 0);
  for_each_index(rep_of.size(), opts.exec, [&](std::size_t o) {
    PeriodicOrbit& orbit = orbits[o];
    orbit.x = points[static_cast<std::size_t>(rep_of[o])];
    orbit.period = minimal_period(map, orbit.x, p);
    const Vec3 image = iterate_cover(map, orbit.x, orbit.period, nullptr);
    for (int i = 0; i < 3; ++i) orbit.k(i) = static_cast<std::int64_t>(std::llround(image(i) - orbit.x(i)));
    orbit.residual = torus_distance(reduce(image), orbit.x);
    try {
      orbit.exponents = periodic_data(map, orbit.x, orbit.period, opts.frame_horizon);
      orbit.log_det = orbit.period * (orbit.exponents[0] + orbit.exponents[1] + orbit.exponents[2]);
    } catch (const ComplexPair&) {
      complex[o] = 1;
    }
  });
  for (std::size_t o = 0; o < orbits.size(); ++o)
    if (complex[o]) ++out.complex_excluded;
    else out.orbits.push_back(orbits[o]);
  return out;
}

PeriodicDataReport periodic_data_constancy(const TorusMap& map, int max_period, double threshold, int iterate,
                                           const PeriodicOptions& opts) {
  if (max_period < 1) throw UsageError("max period must be >= 1");
  if (iterate < 1) throw UsageError("iterate must be >= 1");
  PeriodicDataReport report;
  report.map = map.name();
  report.iterate = iterate;
  report.max_period = max_period;
  report.threshold = threshold;
  std::vector<PeriodicOrbit> all;
  for (int p = 1; p <= max_period; ++p) {
    PeriodicSearch s = find_periodic_points(map, iterate * p, opts);
    report.excluded += s.complex_excluded;
    for (const auto& o : s.orbits) all.push_back(o);
    s.period = p;
    report.searches.push_back(std::move(s));
  }
  std::sort(all.begin(), all.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) { return lex_less(a.x, b.x); });
  for (const auto& o : all)
    if (report.orbits.empty() || torus_distance(report.orbits.back().x, o.x) > 1e-6) report.orbits.push_back(o);
  for (auto& o : report.orbits)
    for (double& e : o.exponents) e *= iterate;

  const LinearData& lin = map.linearization();
  for (int s = 0; s < 3; ++s) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, dev = 0.0;
    for (const auto& o : report.orbits) {
      lo = std::min(lo, o.exponents[s]);
      hi = std::max(hi, o.exponents[s]);
      dev = std::max(dev, std::abs(o.exponents[s] - iterate * lin.exponents[s]));
    }
    report.spread[s] = report.orbits.empty() ? 0.0 : hi - lo;
    report.deviation[s] = dev;
    report.constant[s] = report.spread[s] <= threshold;
  }
  return report;
}

}  // namespace ph3

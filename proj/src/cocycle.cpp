#include "ph3/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ph3 {
namespace {

constexpr double stretch_floor = 1e-300;
constexpr double plane_tolerance = 1e-8;

// Generic initial vectors; fixed so that every estimate is deterministic.
const Vec3 generic_a = Vec3(0.48, 0.61, 0.63).normalized();
const Vec3 generic_b = Vec3(-0.71, 0.22, 0.67).normalized();
const Vec3 generic_c = Vec3(0.29, -0.83, 0.47).normalized();

// Two-column modified Gram-Schmidt; returns log of the diagonal.
std::array<double, 2> orthonormalize2(Vec3& q1, Vec3& q2) {
  const double r11 = q1.norm();
  if (r11 < stretch_floor) throw NumericalUnderflow("vanishing stretch in 2-frame");
  q1 /= r11;
  q2 -= q1.dot(q2) * q1;
  const double r22 = q2.norm();
  if (r22 < stretch_floor) throw NumericalUnderflow("vanishing stretch in 2-frame");
  q2 /= r22;
  return {std::log(r11), std::log(r22)};
}

std::array<double, 3> orthonormalize3(Mat3& q) {
  std::array<double, 3> logs{};
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < c; ++k) q.col(c) -= q.col(k).dot(q.col(c)) * q.col(k);
    const double r = q.col(c).norm();
    if (!(r >= stretch_floor)) throw NumericalUnderflow("stretch factor below 1e-300");
    q.col(c) /= r;
    logs[c] = std::log(r);
  }
  return logs;
}

Vec3 plane_intersection(const Vec3& n_cu, const Vec3& n_cs, const Vec3& x) {
  Vec3 e = n_cu.cross(n_cs);
  const double s = e.norm();
  if (s < plane_tolerance) {
    std::ostringstream os;
    os << "center-unstable and center-stable planes coincide at (" << x.transpose() << ")";
    throw DegenerateSplitting(os.str());
  }
  return canonical_sign(e / s);
}

double residual(const Vec3& pushed, const Vec3& target) {
  const Vec3 p = pushed.normalized();
  return std::min((p - target).norm(), (p + target).norm());
}

}  // namespace

FrameEstimate estimate_frame(const TorusMap& map, const Vec3& x, int n) {
  const Vec3 base = reduce(x);
  std::vector<Vec3> orbit(static_cast<std::size_t>(n) + 1);

  orbit[0] = base;
  for (int i = 1; i <= n; ++i) orbit[i] = reduce(map.inverse_step(orbit[i - 1], nullptr));
  Vec3 q1 = generic_a, q2 = generic_b;
  Mat3 j;
  for (int i = n; i >= 1; --i) {
    map.step(orbit[i], &j);
    q1 = j * q1;
    q2 = j * q2;
    orthonormalize2(q1, q2);
  }
  FrameEstimate out;
  out.directions[index(Sigma::u)] = canonical_sign(q1);
  out.normal_cu = q1.cross(q2).normalized();

  for (int i = 1; i <= n; ++i) orbit[i] = reduce(map.step(orbit[i - 1], nullptr));
  q1 = generic_a;
  q2 = generic_c;
  for (int i = n; i >= 1; --i) {
    map.inverse_step(orbit[i], &j);
    q1 = j * q1;
    q2 = j * q2;
    orthonormalize2(q1, q2);
  }
  out.directions[index(Sigma::s)] = canonical_sign(q1);
  out.normal_cs = q1.cross(q2).normalized();
  out.directions[index(Sigma::c)] = plane_intersection(out.normal_cu, out.normal_cs, base);
  return out;
}

SplittingFrame oseledec_splitting(const TorusMap& map, const Vec3& x, int n) {
  const Vec3 base = reduce(x);
  const FrameEstimate here = estimate_frame(map, base, n);
  Mat3 j;
  const Vec3 image = reduce(map.step(base, &j));
  const FrameEstimate there = estimate_frame(map, image, n);
  SplittingFrame frame;
  frame.base = base;
  frame.horizon = n;
  frame.directions = here.directions;
  for (int k = 0; k < 3; ++k) frame.residuals[k] = residual(j * here.directions[k], there.directions[k]);
  Mat3 basis;
  for (int k = 0; k < 3; ++k) basis.col(k) = frame.directions[k];
  if (std::abs(basis.determinant()) < plane_tolerance) {
    std::ostringstream os;
    os << "frame directions are nearly dependent at (" << base.transpose() << ")";
    throw DegenerateSplitting(os.str());
  }
  return frame;
}

namespace {

SeedExponents qr_orbit(const TorusMap& map, const Vec3& x0, std::size_t n, std::size_t burn_in) {
  Mat3 q;
  q.col(0) = generic_a;
  q.col(1) = generic_b;
  q.col(2) = generic_c;
  orthonormalize3(q);
  Vec3 x = reduce(x0);
  Mat3 j;
  for (std::size_t i = 0; i < burn_in; ++i) {
    const Vec3 next = map.step(x, &j);
    q = j * q;
    orthonormalize3(q);
    x = reduce(next);
  }
  const std::size_t batches = std::min<std::size_t>(lyapunov_batches, n);
  std::vector<std::array<double, 3>> batch_sums(batches, {0.0, 0.0, 0.0});
  std::array<double, 3> total{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 next = map.step(x, &j);
    q = j * q;
    const auto logs = orthonormalize3(q);
    x = reduce(next);
    auto& slot = batch_sums[i * batches / n];
    for (int k = 0; k < 3; ++k) {
      slot[k] += logs[k];
      total[k] += logs[k];
    }
  }
  SeedExponents out;
  out.start = reduce(x0);
  for (int k = 0; k < 3; ++k) out.exponents[k] = total[k] / static_cast<double>(n);
  if (batches >= 2) {
    for (int k = 0; k < 3; ++k) {
      std::vector<double> means(batches);
      double mean = 0.0;
      for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t lo = (b * n + batches - 1) / batches;
        const std::size_t hi = ((b + 1) * n + batches - 1) / batches;
        means[b] = batch_sums[b][k] / static_cast<double>(hi - lo);
        mean += means[b];
      }
      mean /= static_cast<double>(batches);
      double var = 0.0;
      for (double m : means) var += (m - mean) * (m - mean);
      var /= static_cast<double>(batches - 1);
      out.stderr_batch[k] = std::sqrt(var / static_cast<double>(batches));
    }
  }
  std::sort(out.exponents.begin(), out.exponents.end());
  std::array<double, 3> se = out.stderr_batch;
  out.stderr_batch = {se[2], se[1], se[0]};  // QR column order is u, c, s
  return out;
}

}  // namespace

LyapunovReport lyapunov_spectrum(const TorusMap& map, const Vec3& x0, std::size_t n, std::size_t burn_in) {
  if (n < 1) throw UsageError("lyapunov_spectrum needs n >= 1");
  LyapunovReport report;
  report.n = n;
  report.burn_in = burn_in;
  report.per_seed.push_back(qr_orbit(map, x0, n, burn_in));
  report.exponents = report.per_seed[0].exponents;
  report.stderr_ = report.per_seed[0].stderr_batch;
  return report;
}

std::vector<Vec3> seed_points(std::size_t seeds, std::uint64_t master_seed) {
  std::vector<Vec3> pts(seeds);
  for (std::size_t i = 0; i < seeds; ++i) {
    auto rng = task_rng(master_seed, i);
    for (int k = 0; k < 3; ++k) pts[i](k) = uniform01(rng);
  }
  return pts;
}

LyapunovReport lyapunov_ensemble(const TorusMap& map, std::size_t seeds, std::uint64_t master_seed,
                                 std::size_t n, std::size_t burn_in, Execution exec) {
  if (n < 1 || seeds < 1) throw UsageError("lyapunov_ensemble needs n >= 1 and seeds >= 1");
  const auto starts = seed_points(seeds, master_seed);
  LyapunovReport report;
  report.n = n;
  report.burn_in = burn_in;
  report.master_seed = master_seed;
  report.per_seed.resize(seeds);
  for_each_index(seeds, exec, [&](std::size_t i) {
    report.per_seed[i] = qr_orbit(map, starts[i], n, burn_in);
    report.per_seed[i].task = i;
  });
  const double s = static_cast<double>(seeds);
  for (int k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (const auto& p : report.per_seed) mean += p.exponents[k];
    mean /= s;
    report.exponents[k] = mean;
    if (seeds >= 2) {
      double var = 0.0;
      for (const auto& p : report.per_seed) var += (p.exponents[k] - mean) * (p.exponents[k] - mean);
      var /= (s - 1.0);
      report.stderr_[k] = std::sqrt(var / s);
    } else {
      report.stderr_[k] = report.per_seed[0].stderr_batch[k];
    }
  }
  return report;
}

std::array<double, 3> directional_exponents(const TorusMap& map, const Vec3& x, std::size_t n, int horizon) {
  if (n < 1) throw UsageError("directional_exponent needs n >= 1");
  const std::size_t h = static_cast<std::size_t>(horizon);
  std::vector<Vec3> orbit(n + h + 1);
  orbit[0] = reduce(x);
  for (std::size_t i = 1; i < orbit.size(); ++i) orbit[i] = reduce(map.step(orbit[i - 1], nullptr));

  std::vector<Vec3> past(h + 1);
  past[0] = orbit[0];
  for (std::size_t i = 1; i <= h; ++i) past[i] = reduce(map.inverse_step(past[i - 1], nullptr));

  Mat3 j;
  Vec3 q1 = generic_a, q2 = generic_b;
  for (std::size_t i = h; i >= 1; --i) {
    map.step(past[i], &j);
    q1 = j * q1;
    q2 = j * q2;
    orthonormalize2(q1, q2);
  }
  std::vector<Vec3> normal_cu(n);
  double sum_u = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    normal_cu[i] = q1.cross(q2);
    map.step(orbit[i], &j);
    q1 = j * q1;
    q2 = j * q2;
    sum_u += orthonormalize2(q1, q2)[0];
  }

  double sum_s = 0.0, sum_c = 0.0;
  q1 = generic_a;
  q2 = generic_c;
  for (std::size_t i = n + h; i >= 1; --i) {
    map.inverse_step(orbit[i], &j);
    q1 = j * q1;
    q2 = j * q2;
    orthonormalize2(q1, q2);
    const std::size_t at = i - 1;
    if (at < n) {
      map.step(orbit[at], &j);
      const Vec3 e_c = plane_intersection(normal_cu[at].normalized(), q1.cross(q2).normalized(), orbit[at]);
      sum_s += std::log((j * q1).norm());
      sum_c += std::log((j * e_c).norm());
    }
  }
  const double nn = static_cast<double>(n);
  return {sum_s / nn, sum_c / nn, sum_u / nn};
}

double directional_exponent(const TorusMap& map, const Vec3& x, Sigma sigma, std::size_t n, int horizon) {
  return directional_exponents(map, x, n, horizon)[index(sigma)];
}

}  // namespace ph3

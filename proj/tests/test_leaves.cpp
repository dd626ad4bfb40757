#include "oracles.hpp"

#include "ph3/catalog.hpp"
#include "ph3/leaves.hpp"

#include <doctest.h>

#include <cfloat>

using namespace ph3;

namespace {

LeafOptions fine() {
  LeafOptions o;
  o.spacing = 1e-3;
  return o;
}

}  // namespace

TEST_CASE("strong leaves of a linear map are straight eigenlines") {
  const TorusMap f(builtin_map("linear_anosov"));
  for (Sigma s : {Sigma::s, Sigma::u}) {
    const Vec3 x(0.2, 0.5, 0.3);
    const LeafSegment leaf = trace_strong_leaf(f, s, x, 5.0);
    const Vec3 e = f.linearization().direction(s);
    double off = 0.0;
    for (std::size_t i = 0; i < leaf.size(); ++i) {
      const Vec3 d = leaf.vertices[i] - x;
      off = std::max(off, (d - d.dot(e) * e).norm());
      CHECK(std::abs(std::abs(d.dot(e)) - std::abs(leaf.arc[i])) < 1e-9);
    }
    CHECK(off < 1e-10);
    CHECK(leaf.length_before() >= 5.0);
    CHECK(leaf.length_after() >= 5.0);
    CHECK(leaf.arc[leaf.base_index] == 0.0);
    for (std::size_t i = 0; i + 1 < leaf.size(); ++i) CHECK(leaf.arc[i + 1] - leaf.arc[i] <= 1e-2 * (1 + 1e-9));
  }
}

TEST_CASE("intrinsic distance dominates the chord") {
  for (const char* name : {"linear_ph", "da_ph:0.2", "da_anosov:0.2", "conj_anosov_inv:0.1"}) {
    CAPTURE(name);
    const TorusMap f(builtin_map(name));
    for (Sigma s : {Sigma::s, Sigma::u}) {
      const double R = 30.0;
      const LeafSegment leaf = trace_strong_leaf(f, s, Vec3(0.31, 0.72, 0.45), R);
      const QuasiIsometryReport q = quasi_isometry_constant(leaf, 1.0);
      CHECK(q.max_ratio >= 1.0);
      CHECK(q.max_ratio < 1.1);
      CHECK(q.min_margin >= -8.0 * DBL_EPSILON * 2.0 * R);
      CHECK(q.pairs > 0);
      // exhaustive check on a thinned vertex set
      for (std::size_t i = 0; i < leaf.size(); i += 97)
        for (std::size_t j = i + 1; j < leaf.size(); j += 89) {
          const double dw = leaf.arc[j] - leaf.arc[i];
          CHECK(dw >= (leaf.vertices[j] - leaf.vertices[i]).norm() - 8.0 * DBL_EPSILON * 2.0 * R);
        }
    }
  }
}

TEST_CASE("halving the spacing changes arc lengths by under one percent") {
  for (const char* name : {"da_ph:0.2", "conj_anosov:0.1"}) {
    CAPTURE(name);
    const TorusMap f(builtin_map(name));
    for (Sigma s : {Sigma::s, Sigma::u}) {
      LeafOptions a;
      a.spacing = 2e-2;
      LeafOptions b;
      b.spacing = 1e-2;
      const LeafSegment coarse = trace_strong_leaf(f, s, Vec3(0.1, 0.2, 0.3), 4.0, a);
      const LeafSegment finer = trace_strong_leaf(f, s, Vec3(0.1, 0.2, 0.3), 4.0, b);
      for (double target : {-3.0, -1.0, 1.5, 3.5}) {
        const Vec3 p = coarse.point_at_arc(target);
        std::size_t best = 0;
        for (std::size_t i = 0; i < finer.size(); ++i)
          if ((finer.vertices[i] - p).norm() < (finer.vertices[best] - p).norm()) best = i;
        CHECK((finer.vertices[best] - p).norm() < 2e-2);
        CHECK(std::abs(finer.arc[best] - target) <= 0.01 * std::abs(target) + 1e-2);
      }
      CHECK(oracle::point_polyline(coarse.vertices[coarse.segment_at_arc(2.0)], finer.vertices) < 1e-5);
    }
  }
}

TEST_CASE("leaves are dynamically invariant") {
  for (const char* name : {"da_ph:0.2", "da_anosov_inv:0.1", "conj_ph:0.1"}) {
    CAPTURE(name);
    const TorusMap f(builtin_map(name));
    const Vec3 x(0.6, 0.15, 0.8);
    for (Sigma s : {Sigma::s, Sigma::u}) {
      const LeafSegment leaf = trace_strong_leaf(f, s, x, 1.0, fine());
      const Vec3 fx = f.evaluate(x, Space::cover);
      const LeafSegment image = trace_strong_leaf(f, s, fx, 8.0, fine());
      double worst = 0.0;
      for (std::size_t i = 0; i < leaf.size(); i += 50)
        worst = std::max(worst, oracle::point_polyline(f.evaluate(leaf.vertices[i], Space::cover), image.vertices));
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("chords align with the eigenline of the linear part at large scale") {
  for (const char* name : {"da_ph:0.2", "da_anosov:0.2", "conj_anosov:0.1"}) {
    CAPTURE(name);
    const TorusMap f(builtin_map(name));
    for (Sigma s : {Sigma::s, Sigma::u}) {
      LeafOptions o;
      o.spacing = 2e-2;
      const LeafSegment leaf = trace_strong_leaf(f, s, Vec3(0.31, 0.72, 0.45), 300.0, o);
      const auto samples = asymptotic_direction(leaf, f.linearization().direction(s), {10.0, 250.0});
      double far = 0.0;
      for (const auto& d : samples)
        if (d.radius == 250.0) {
          CHECK(d.chord >= 250.0 * 0.9);
          far = std::max(far, d.angle);
        }
      CHECK(far < 1e-2);
    }
  }
}

TEST_CASE("large-scale comparability ratios approach one") {
  const TorusMap f(builtin_map("da_anosov:0.2"));
  LeafOptions o;
  o.spacing = 2e-2;
  const LeafSegment leaf = trace_strong_leaf(f, Sigma::u, Vec3(0.31, 0.72, 0.45), 100.0, o);
  for (int k = 1; k <= 3; ++k) {
    const ComparabilityReport r = large_scale_comparability(f, leaf, k, 2.0);
    CHECK(std::isfinite(r.reported_m));
    CHECK(r.prop_min_beyond > 0.5);
    CHECK(r.prop_max_beyond < 2.0);
  }
}

TEST_CASE("center leaves of the skew family are closed vertical circles") {
  const TorusMap f(builtin_map("skew_ph:0.2"));
  const Vec3 x(0.3, 0.8, 0.1);
  const LeafSegment c = trace_center_leaf(f, x, 1.1, fine());
  CHECK(torus_distance(reduce(c.point_at_arc(1.0)), x) < 1e-6);
  for (std::size_t i = 0; i < c.size(); i += 100) {
    CHECK(std::abs(c.vertices[i](0) - x(0)) < 1e-9);
    CHECK(std::abs(c.vertices[i](1) - x(1)) < 1e-9);
  }
}

TEST_CASE("center leaf tracing follows the center field") {
  const TorusMap f(builtin_map("da_ph:0.2"));
  const LeafSegment c = trace_center_leaf(f, Vec3(0.4, 0.4, 0.4), 0.5, fine());
  CHECK(c.max_tangency_defect < 1e-6);
  CHECK(c.length_after() >= 0.5);
  CHECK(c.length_before() >= 0.5);
  const Vec3 p = c.point_at_arc(0.3);
  const SplittingFrame fr = oseledec_splitting(f, p);
  const std::size_t i = c.segment_at_arc(0.3);
  CHECK(line_angle(fr.e(Sigma::c), c.tangents[i]) < 1e-5);
}

TEST_CASE("leaf CSV export") {
  const TorusMap f(builtin_map("linear_ph"));
  const LeafSegment leaf = trace_strong_leaf(f, Sigma::u, Vec3(0.1, 0.1, 0.1), 0.05);
  const std::string csv = leaf_csv(leaf);
  CHECK(csv.rfind("arc_length,x1,x2,x3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == long(leaf.size()) + 1);
}

TEST_CASE("Hausdorff distance between polylines") {
  const std::vector<Vec3> a{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const std::vector<Vec3> b{Vec3(0, 0.5, 0), Vec3(1, 0.5, 0)};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.5));
  CHECK(hausdorff_distance(a, a) == 0.0);
}

#include "ph3/catalog.hpp"
#include "ph3/holonomy.hpp"

#include <doctest.h>

using namespace ph3;

namespace {

HolonomyOptions coarse() {
  HolonomyOptions o;
  o.leaf.spacing = 1e-2;
  return o;
}

}  // namespace

TEST_CASE("intersection of linear leaves solves the planar system") {
  const TorusMap f(builtin_map("linear_ph"));
  const LinearData& lin = f.linearization();
  const Vec3 x(0.2, 0.3, 0.4);
  const Vec3 y = x + 0.7 * lin.direction(Sigma::c) + 0.013 * lin.direction(Sigma::u);
  const LeafSegment strong = trace_strong_leaf(f, Sigma::u, x, 1.0, coarse().leaf);
  const LeafSegment center = trace_center_leaf(f, y, 1.0, coarse().leaf);
  const Crossing c = intersect_leaves(f, strong, center);
  // x + a e_u = y + b e_c  =>  a = 0.013, b = -0.7
  CHECK(c.strong_arc * lin.direction(Sigma::u).dot(strong.tangents[strong.base_index]) ==
        doctest::Approx(0.013).epsilon(1e-6));
  CHECK(std::abs(std::abs(c.center_arc) - 0.7) < 1e-6);
  CHECK((c.point - (x + 0.013 * lin.direction(Sigma::u))).norm() < 1e-8);
  CHECK(c.miss < intersection_tolerance);
}

TEST_CASE("disjoint leaves report no intersection") {
  const TorusMap f(builtin_map("linear_ph"));
  const LeafSegment strong = trace_strong_leaf(f, Sigma::u, Vec3(0.2, 0.3, 0.4), 0.5, coarse().leaf);
  const LeafSegment center = trace_center_leaf(f, Vec3(0.2, 0.3, 0.4) + Vec3(0.3, -0.2, 0.0), 0.5, coarse().leaf);
  CHECK_THROWS_AS(intersect_leaves(f, strong, center), NoIntersection);
}

TEST_CASE("linear maps have unit holonomy ratios") {
  for (const char* name : {"linear_ph", "linear_anosov_inv"}) {
    CAPTURE(name);
    const TorusMap f(builtin_map(name));
    const HolonomyReport c = center_holonomy_report(f, seed_points(2, 3), {1.0, 2.0}, {-0.5, 1.0}, coarse());
    CHECK(c.samples.size() == 8);
    CHECK(std::abs(c.min_ratio - 1.0) <= 1e-6);
    CHECK(std::abs(c.max_ratio - 1.0) <= 1e-6);
    const Strip s = build_strip(f, Vec3(0.4, 0.1, 0.6), 1.0, 1.0, 5, coarse());
    const HolonomyReport u = unstable_holonomy_report(s);
    CHECK(std::abs(u.c_hat - 1.0) <= 1e-6);
    CHECK(s.consistency < 1e-6);
  }
}

TEST_CASE("unstable holonomy is invertible on its samples") {
  const TorusMap f(builtin_map("da_ph:0.2"));
  const HolonomyOptions o = coarse();
  const Strip s = build_strip(f, Vec3(0.3, 0.6, 0.2), 1.0, 0.5, 3, o);
  for (double a : {-0.4, 0.3}) {
    const Crossing h = unstable_holonomy(f, s, a, o);
    const LeafSegment back_u = trace_strong_leaf(f, Sigma::u, h.point, 2.0, o.leaf);
    const Crossing back = intersect_leaves(f, back_u, s.center_x);
    CHECK((back.point - s.center_x.point_at_arc(a)).norm() < 1e-6);
  }
}

TEST_CASE("strip lengths are two-sided bounded") {
  const TorusMap f(builtin_map("da_anosov_inv:0.1"));
  const Strip s = build_strip(f, Vec3(0.3, 0.6, 0.2), 1.0, 0.5, 5, coarse());
  CHECK(s.lengths.size() == 5);
  CHECK(s.consistency < 1e-6);
  CHECK(s.max_length() / s.min_length() <= 2.0);
  CHECK(s.min_length() > 0.0);
}

TEST_CASE("Lipschitz constant of center holonomy is comparable to the center density") {
  const TorusMap f(builtin_map("conj_anosov_inv:0.1"));
  const LipschitzDelta l = holonomy_lipschitz_vs_delta(f, Vec3(0.3, 0.6, 0.2), 0.05, 0.5, coarse());
  CHECK(l.segment == doctest::Approx(0.05).epsilon(0.2));
  CHECK(l.ratio > 0.5);
  CHECK(l.ratio < 2.0);
  CHECK_THROWS_AS(holonomy_lipschitz_vs_delta(f, Vec3(0.3, 0.6, 0.2), 0.05, 0.0, coarse()), UsageError);
}

TEST_CASE("report summary") {
  HolonomyReport r;
  r.samples = {{1.0, 0.5, 0.8}, {1.0, 1.0, 1.1}};
  r.summarize();
  CHECK(r.min_ratio == 0.8);
  CHECK(r.max_ratio == 1.1);
  CHECK(r.c_hat == doctest::Approx(1.25));
  CHECK(to_string(HolonomyKind::unstable) == "unstable");
}

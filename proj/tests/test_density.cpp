#include "ph3/box.hpp"
#include "ph3/catalog.hpp"
#include "ph3/density.hpp"

#include <doctest.h>

#include <random>

using namespace ph3;

namespace {

constexpr double tau = 1e-8;

LeafSegment leaf_of(const TorusMap& f, Sigma s, double R = 1.5) {
  LeafOptions o;
  o.spacing = 1e-2;
  return trace_strong_leaf(f, s, Vec3(0.31, 0.72, 0.45), R, o);
}

}  // namespace

TEST_CASE("density is identically one for linear maps") {
  for (const char* name : {"linear_ph", "linear_anosov", "linear_anosov_inv"}) {
    const TorusMap f(builtin_map(name));
    for (Sigma s : {Sigma::s, Sigma::u}) {
      const DensityProfile p = density_profile(f, leaf_of(f, s, 5.0));
      for (double v : p.values) CHECK(std::abs(v - 1.0) <= 1e-12);
      CHECK(trapezoid(p.arc, p.rho) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("density cocycle identities hold within twice the tolerance") {
  std::mt19937_64 rng(17);
  for (const char* name : {"da_ph:0.2", "da_anosov:0.2", "conj_anosov:0.1", "skew_ph:0.2"}) {
    CAPTURE(name);
    const TorusMap f(builtin_map(name));
    for (Sigma s : {Sigma::s, Sigma::u}) {
      const LeafSegment leaf = leaf_of(f, s);
      const TailModel model = calibrate_tail(f, leaf);
      std::uniform_int_distribution<std::size_t> pick(0, leaf.size() - 1);
      for (int trial = 0; trial < 20; ++trial) {
        const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        CHECK(delta(f, leaf, model, i, i, tau).value == 1.0);
        const DeltaValue ij = delta(f, leaf, model, i, j, tau);
        const DeltaValue jk = delta(f, leaf, model, j, k, tau);
        const DeltaValue ik = delta(f, leaf, model, i, k, tau);
        const DeltaValue ji = delta(f, leaf, model, j, i, tau);
        CHECK(std::abs(ij.log_value + jk.log_value - ik.log_value) <= 2 * tau);
        CHECK(std::abs(ij.log_value + ji.log_value) <= 2 * tau);
        CHECK(ij.tail <= tau);
      }
    }
  }
}

TEST_CASE("deeper truncation stays inside the certified tail") {
  const TorusMap f(builtin_map("da_ph:0.2"));
  for (Sigma s : {Sigma::s, Sigma::u}) {
    const LeafSegment leaf = leaf_of(f, s);
    const TailModel model = calibrate_tail(f, leaf);
    for (std::size_t j : {std::size_t(0), leaf.size() - 1, leaf.base_index / 2}) {
      const DeltaValue d = delta(f, leaf, model, leaf.base_index, j, tau);
      const DeltaValue deep = delta_at_depth(f, leaf, leaf.base_index, j, leaf.chart.horizon);
      CHECK(std::abs(d.log_value - deep.log_value) <= d.tail + 1e-14);
    }
  }
}

TEST_CASE("dynamical cocycle identity for the unstable density") {
  const TorusMap f(builtin_map("da_anosov:0.2"));
  LeafOptions o;
  o.spacing = 1e-2;
  const Vec3 x(0.31, 0.72, 0.45);
  const LeafSegment leaf = trace_strong_leaf(f, Sigma::u, x, 1.0, o);
  const TailModel model = calibrate_tail(f, leaf);
  auto jac = [&](std::size_t i) { return (f.jacobian(leaf.vertices[i]) * leaf.tangents[i]).norm(); };
  for (std::size_t j : {std::size_t(5), leaf.size() - 7}) {
    const DeltaValue d = delta(f, leaf, model, leaf.base_index, j, tau);
    DeltaOptions opts;
    opts.leaf = o;
    const DeltaValue df = delta(f, Sigma::u, f.evaluate(leaf.vertices[leaf.base_index], Space::cover),
                                f.evaluate(leaf.vertices[j], Space::cover), opts);
    const double lhs = df.log_value + std::log(jac(j)) - std::log(jac(leaf.base_index));
    CHECK(std::abs(lhs - d.log_value) <= 2 * tau);
  }
}

TEST_CASE("profile is normalized and flat near its base") {
  for (const char* name : {"da_ph:0.2", "conj_ph:0.1"}) {
    const TorusMap f(builtin_map(name));
    const DensityProfile p = density_profile(f, leaf_of(f, Sigma::u, 3.0));
    CHECK(p.values[p.base_index] == 1.0);
    CHECK(trapezoid(p.arc, p.rho) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.mass(p.arc.front(), p.arc.back()) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(flatness_radius(p) > 0.0);
    CHECK(p.tail <= 1e-8);
  }
}

TEST_CASE("profile is independent of the vertex used as base up to scale") {
  const TorusMap f(builtin_map("da_anosov_inv:0.1"));
  const LeafSegment leaf = leaf_of(f, Sigma::s, 2.0);
  const DensityProfile a = density_profile(f, leaf);
  const DensityProfile b = density_profile(f, leaf, tau, std::ptrdiff_t(leaf.base_index / 3));
  for (std::size_t i = 0; i < leaf.size(); i += 7) CHECK(a.rho[i] == doctest::Approx(b.rho[i]).epsilon(1e-7));
}

TEST_CASE("center densities have no analytic formula") {
  const TorusMap f(builtin_map("da_ph:0.2"));
  CHECK_THROWS_AS(delta(f, Sigma::c, Vec3(0.1, 0.1, 0.1), Vec3(0.1, 0.1, 0.2)), UnsupportedDirection);
  CHECK_THROWS_AS(ubd_constant(f, Sigma::c, {1.0}, UbdMode::analytic), UnsupportedDirection);
}

TEST_CASE("top decade slope and verdict thresholds") {
  std::vector<double> R{1, 2, 5, 10, 20, 50, 100};
  std::vector<double> k;
  for (double r : R) k.push_back(std::pow(r, 0.1));
  std::size_t pts = 0;
  CHECK(top_decade_slope(R, k, &pts) == doctest::Approx(0.1));
  CHECK(pts == 4);
  CHECK(ubd_verdict(0.1, 4) == UbdVerdict::growing);
  CHECK(ubd_verdict(0.01, 4) == UbdVerdict::bounded);
  CHECK(ubd_verdict(-0.1, 4) == UbdVerdict::inconclusive);
  CHECK(ubd_verdict(-0.04, 4) == UbdVerdict::bounded);
  CHECK(ubd_verdict(0.0, 1) == UbdVerdict::inconclusive);
}

TEST_CASE("linear maps have K(R) = 1") {
  const TorusMap f(builtin_map("linear_anosov"));
  UbdOptions o;
  o.centers = 2;
  const UbdReport r = ubd_constant(f, Sigma::u, {1.0, 5.0, 25.0}, UbdMode::analytic, o);
  for (double k : r.k) CHECK(std::abs(k - 1.0) <= 1e-6);
  CHECK(r.verdict == UbdVerdict::bounded);
}

TEST_CASE("foliated box plaques are disjoint and long enough") {
  const TorusMap f(builtin_map("da_ph:0.05"));
  const FoliatedBox box = build_foliated_box(f, Sigma::u, Vec3(0.31, 0.72, 0.45), 2.0, 0.05, 9);
  CHECK(box.plaques.size() == 9);
  CHECK(box.grid == 3);
  CHECK(box.min_separation > 0.0);
  for (const auto& p : box.plaques) {
    CHECK(p.length_before() >= 1.0);
    CHECK(p.length_after() >= 1.0);
  }
  CHECK(box.interior(box.central));
  CHECK_FALSE(box.interior(0));
  CHECK_THROWS_AS(build_foliated_box(f, Sigma::u, Vec3(0.31, 0.72, 0.45), 2.0, 0.05, 8), UsageError);
}

TEST_CASE("empirical disintegration is seed-deterministic and matches the serial reference") {
  const TorusMap f(builtin_map("da_ph:0.05"));
  const FoliatedBox box = build_foliated_box(f, Sigma::u, Vec3(0.31, 0.72, 0.45), 2.0, 0.05, 9);
  const EmpiricalDisintegration a = empirical_disintegration(box, 100000, 20, 7, Execution::serial);
  const EmpiricalDisintegration b = empirical_disintegration(box, 100000, 20, 7, Execution::parallel);
  REQUIRE(a.plaques.size() == b.plaques.size());
  CHECK(a.samples == b.samples);
  CHECK(a.draws == b.draws);
  for (std::size_t p = 0; p < a.plaques.size(); ++p) CHECK(a.plaques[p].counts == b.plaques[p].counts);
  double total = 0.0;
  const auto& h = a.plaques.front();
  for (std::size_t i = 0; i < h.density.size(); ++i) total += h.density[i] * (a.edges[i + 1] - a.edges[i]);
  CHECK(total == doctest::Approx(1.0));
  const DensityProfile prof = density_profile(f, box.plaques[h.plaque]);
  const auto masses = profile_bin_masses(prof, a.edges);
  double msum = 0.0;
  for (double m : masses) msum += m;
  CHECK(msum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(l1_distance(h, a.edges, masses) < 0.15);
  const std::string csv = histogram_csv(a);
  CHECK(csv.rfind("plaque_id,bin_center_arclength,density,stderr\n", 0) == 0);
}

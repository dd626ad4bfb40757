#include "ph3/catalog.hpp"
#include "ph3/experiments.hpp"

#include <doctest.h>

using namespace ph3;

TEST_CASE("linear maps are rigid") {
  const RigidityReport r = run_rigidity(TorusMap(builtin_map("linear_ph")), 4, 5000, 3);
  CHECK(r.verdict == RigidityVerdict::rigid_consistent);
  CHECK(r.rigid);
  CHECK(r.inequality);
  CHECK_FALSE(r.strict_drop);
  CHECK(r.clusters.size() == 1);
  CHECK(to_string(r.verdict) == "rigid-consistent");
}

TEST_CASE("DA maps drop below the linear unstable exponent") {
  const RigidityReport r = run_rigidity(TorusMap(builtin_map("da_ph:0.2")), 8, 50000, 3);
  CHECK(r.verdict == RigidityVerdict::inequality_consistent);
  CHECK(r.strict_drop);
  CHECK(r.difference[index(Sigma::u)] < 0.0);
  CHECK(r.difference[index(Sigma::s)] > 0.0);
  CHECK(r.per_seed.size() == 8);
}

TEST_CASE("bimodal seeds split into clusters") {
  LyapunovReport e;
  for (int i = 0; i < 6; ++i) {
    SeedExponents s;
    s.task = std::uint64_t(i);
    s.exponents = {-1.0, 0.0, i < 3 ? 1.0 + 1e-4 * i : 1.5 + 1e-4 * i};
    s.stderr_batch = {1e-3, 1e-3, 1e-3};
    e.per_seed.push_back(s);
  }
  const auto c = seed_clusters(e);
  REQUIRE(c.size() == 2);
  CHECK(c[0].seeds == std::vector<std::size_t>{0, 1, 2});
  CHECK(c[1].exponents[2] == doctest::Approx(1.5004));
  e.per_seed[4].exponents[2] = 1.0005;
  e.per_seed[5].exponents[2] = 1.0006;
  e.per_seed[3].exponents[2] = 1.0007;
  CHECK(seed_clusters(e).size() == 1);
}

TEST_CASE("sweep peaks at the linear map") {
  const std::string fam = "da_ph";
  const SweepReport s = run_sweep(
      fam, [&](double e) { return builtin_map(fam + ":" + std::to_string(e)); }, {0.2, 0.0, -0.2}, 4, 20000, 9, 2);
  CHECK(s.points.size() == 3);
  CHECK(s.points.front().epsilon == -0.2);
  CHECK(s.argmax == 0.0);
  CHECK(s.max_at_zero);
  CHECK(s.separated);
  CHECK(s.points.front().has_mirror);
  CHECK_FALSE(s.points.back().has_mirror);
  CHECK_THROWS_AS(run_sweep(fam, [&](double e) { return builtin_map(fam + ":" + std::to_string(e)); }, {0.1}, 2,
                            100, 1),
                  UsageError);
}

TEST_CASE("center topology of the skew family") {
  const CenterTopologyReport r = run_center_topology(TorusMap(builtin_map("skew_ph:0.2")), 4, 20000, 3, 1);
  CHECK(r.verdict_applies);
  CHECK(r.exponent_zero);
  CHECK(r.closes);
  CHECK(r.closure.size() == 3);
  const CenterTopologyReport d = run_center_topology(TorusMap(builtin_map("da_ph:0.2")), 2, 5000, 2, 1);
  CHECK_FALSE(d.verdict_applies);
  CHECK_THROWS_AS(run_center_topology(TorusMap(builtin_map("linear_anosov")), 2, 100, 1, 1), UsageError);
}

TEST_CASE("center inequality for Anosov maps with an expanding middle direction") {
  const AnosovCenterReport r = run_anosov_center_inequality(TorusMap(builtin_map("da_anosov_inv:0.1")), 4, 50000, 2);
  CHECK(r.holds);
  CHECK(r.margin > 0.0);
  CHECK_THROWS_AS(run_anosov_center_inequality(TorusMap(builtin_map("linear_ph")), 2, 100, 1), UsageError);
}

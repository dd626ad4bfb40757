#include "oracles.hpp"

#include "ph3/catalog.hpp"
#include "ph3/periodic.hpp"

#include <doctest.h>

#include <set>

using namespace ph3;

namespace {

/// det of B^p - I for the hyperbolic 2x2 block of A_ph.
std::int64_t block_count(int p) {
  std::int64_t a = 1, b = 0, c = 0, d = 1;
  for (int i = 0; i < p; ++i) {
    const std::int64_t na = 2 * a + c, nb = 2 * b + d, nc = a + c, nd = b + d;
    a = na, b = nb, c = nc, d = nd;
  }
  const std::int64_t det = (a - 1) * (d - 1) - b * c;
  return det < 0 ? -det : det;
}

}  // namespace

TEST_CASE("linear periodic points are exact coset solutions") {
  const IntegerMatrix3 a = matrix_anosov();
  for (int p = 1; p <= 5; ++p) {
    const auto pts = linear_periodic_points(a, p);
    CHECK(std::int64_t(pts.size()) == oracle::lefschetz(a.entries(), p));
    const Mat3 ap = a.power(p).to_real();
    std::set<std::array<long, 3>> distinct;
    for (const auto& [x, k] : pts) {
      CHECK((ap * x - x - k.cast<double>()).norm() < 1e-9);
      CHECK((x.array() >= 0.0).all());
      CHECK((x.array() < 1.0).all());
      distinct.insert({std::lround(x(0) * 1e7), std::lround(x(1) * 1e7), std::lround(x(2) * 1e7)});
    }
    CHECK(distinct.size() == pts.size());
  }
  CHECK_THROWS_AS(linear_periodic_points(matrix_ph(), 1), DegenerateJacobian);
}

TEST_CASE("Lefschetz counts for the Anosov corpus") {
  for (const char* name : {"linear_anosov", "da_anosov:0.2", "conj_anosov:0.1"}) {
    CAPTURE(name);
    const TorusMap f(builtin_map(name));
    const int top = f.is_linear() ? 5 : 3;
    for (int p = 1; p <= top; ++p) {
      const PeriodicSearch s = find_periodic_points(f, p);
      CHECK(s.expected == oracle::lefschetz(f.linear_part().entries(), p));
      CHECK(std::int64_t(s.points) == s.expected);
      CHECK(s.count_matches);
      CHECK(s.diverged == 0);
      std::size_t in_orbits = 0;
      for (const auto& o : s.orbits) {
        CHECK(o.residual < 1e-9);
        if (o.period == p) in_orbits += std::size_t(o.period);
      }
      CHECK(in_orbits <= s.points);
    }
  }
}

TEST_CASE("periodic data sums to zero and is linear for linear maps") {
  const TorusMap lin(builtin_map("linear_anosov"));
  for (const auto& [x, k] : linear_periodic_points(lin.linear_part(), 2)) {
    const auto e = periodic_data(lin, x, 2);
    for (int i = 0; i < 3; ++i) CHECK(e[i] == doctest::Approx(lin.linearization().exponents[i]).epsilon(1e-10));
  }
  const TorusMap f(builtin_map("da_anosov:0.2"));
  const PeriodicDataReport r = periodic_data_constancy(f, 3);
  for (const auto& o : r.orbits) {
    CHECK(std::abs(o.exponents[0] + o.exponents[1] + o.exponents[2]) <= 1e-8);
    CHECK(std::abs(o.log_det) <= 1e-8);
  }
  CHECK(r.spread[index(Sigma::u)] > 1e-3);
  CHECK_FALSE(r.constant[index(Sigma::u)]);
}

TEST_CASE("A_ph has circles of periodic points") {
  for (int p = 1; p <= 4; ++p) {
    const ContinuumDescriptor d = continuum_descriptor(matrix_ph(), p);
    CHECK(d.kernel_dimension == 1);
    CHECK(d.direction == Cell(0, 0, 1));
    CHECK(d.components == block_count(p));
    const auto samples = linear_continuum_samples(matrix_ph(), p, 3);
    CHECK(std::int64_t(samples.size()) == 3 * d.components);
    const Mat3 ap = matrix_ph().power(p).to_real();
    for (const auto& [x, k] : samples) CHECK((ap * x - x - k.cast<double>()).norm() < 1e-9);
  }
  CHECK(block_count(1) == 1);
  CHECK(block_count(2) == 5);
  CHECK(block_count(3) == 16);
}

TEST_CASE("smooth conjugates have constant periodic data") {
  const TorusMap f(builtin_map("conj_anosov:0.1"));
  const PeriodicDataReport r = periodic_data_constancy(f, 3);
  for (Sigma s : all_sigmas) {
    CHECK(r.spread[index(s)] < 1e-6);
    CHECK(r.deviation[index(s)] < 1e-6);
    CHECK(r.constant[index(s)]);
  }
  const TorusMap g(builtin_map("conj_ph:0.1"));
  const PeriodicDataReport q = periodic_data_constancy(g, 2, 1e-3, 2);
  CHECK(q.iterate == 2);
  for (Sigma s : all_sigmas) CHECK(q.spread[index(s)] < 1e-6);
  CHECK(q.searches.front().continuum.has_value());
  for (const auto& o : q.orbits)
    CHECK(o.exponents[index(Sigma::u)] == doctest::Approx(2 * g.linearization().exponent(Sigma::u)).epsilon(1e-6));
}

TEST_CASE("periodic search is identical on the serial path") {
  const TorusMap f(builtin_map("da_anosov:0.2"));
  PeriodicOptions s;
  s.exec = Execution::serial;
  const PeriodicSearch a = find_periodic_points(f, 2, s);
  const PeriodicSearch b = find_periodic_points(f, 2);
  REQUIRE(a.orbits.size() == b.orbits.size());
  for (std::size_t i = 0; i < a.orbits.size(); ++i) {
    CHECK(a.orbits[i].x == b.orbits[i].x);
    CHECK(a.orbits[i].exponents == b.orbits[i].exponents);
  }
}

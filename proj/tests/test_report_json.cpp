#include "ph3/catalog.hpp"
#include "ph3/map_io.hpp"
#include "ph3/report_json.hpp"

#include <doctest.h>

using namespace ph3;

TEST_CASE("report schemas carry the documented fields") {
  const TorusMap f(builtin_map("linear_ph"));
  const Json ly = to_json(lyapunov_ensemble(f, 2, 1, 200));
  for (const char* k : {"exponents", "n", "burn_in", "seeds", "per_seed", "stderr"}) CHECK(ly.contains(k));
  CHECK(ly["exponents"].size() == 3);

  HolonomyReport h;
  h.samples = {{1.0, 0.5, 1.0}};
  h.summarize();
  const Json hj = to_json(h);
  for (const char* k : {"kind", "samples", "C_hat"}) CHECK(hj.contains(k));
  for (const char* k : {"du_xy", "t", "ratio"}) CHECK(hj["samples"][0].contains(k));

  PeriodicDataReport p;
  p.orbits.push_back(PeriodicOrbit{});
  const Json pj = to_json(p);
  for (const char* k : {"period", "orbits", "spread", "verdict"}) CHECK(pj.contains(k));
  for (const char* k : {"x", "k", "exponents"}) CHECK(pj["orbits"][0].contains(k));
  CHECK(pj["verdict"]["u"] == "constant");

  const Json spec = to_json(f.spec());
  CHECK(parse_map_spec(spec["spec"].get<std::string>()) == f.spec());
}

TEST_CASE("reports serialize doubles exactly and end with a newline") {
  Json j;
  j["x"] = 0.1 + 0.2;
  j[timestamp_key] = "now";
  const std::string text = dump_report(j);
  CHECK(text.back() == '\n');
  CHECK(Json::parse(text)["x"].get<double>() == 0.1 + 0.2);
  CHECK(text.find("\"timestamp\"") != std::string::npos);
}

#include "ph3/report_json.hpp"

#include "ph3/map_io.hpp"

namespace ph3 {

namespace {

template <class T, std::size_t N>
Json array(const std::array<T, N>& a) {
  Json j = Json::array();
  for (const auto& v : a) j.push_back(v);
  return j;
}

Json sigma_triplet(const std::array<double, 3>& a) { return array(a); }

}  // namespace

Json to_json(const Vec3& v) { return Json::array({v(0), v(1), v(2)}); }

Json to_json(const Cell& v) { return Json::array({v(0), v(1), v(2)}); }

Json to_json(const TorusMapSpec& spec) { return {{"name", spec.name}, {"spec", write_map_spec(spec)}}; }

Json to_json(const LinearData& lin) {
  Json dirs = Json::array();
  for (const auto& d : lin.directions) dirs.push_back(to_json(d));
  return {{"eigenvalues", array(lin.eigenvalues)},
          {"exponents", array(lin.exponents)},
          {"directions", dirs},
          {"anosov", lin.anosov}};
}

Json to_json(const LyapunovReport& r) {
  Json seeds = Json::array();
  for (const auto& s : r.per_seed)
    seeds.push_back({{"task", s.task},
                     {"start", to_json(s.start)},
                     {"exponents", array(s.exponents)},
                     {"stderr_batch", array(s.stderr_batch)}});
  return {{"exponents", array(r.exponents)}, {"stderr", array(r.stderr_)},      {"n", r.n},
          {"burn_in", r.burn_in},            {"seeds", r.per_seed.size()},    {"master_seed", r.master_seed},
          {"per_seed", seeds}};
}

Json to_json(const SplittingFrame& f) {
  Json dirs = Json::array();
  for (const auto& d : f.directions) dirs.push_back(to_json(d));
  return {{"base", to_json(f.base)}, {"directions", dirs}, {"residuals", array(f.residuals)}, {"horizon", f.horizon}};
}

Json to_json(const QuasiIsometryReport& r) {
  Json buckets = Json::array();
  for (std::size_t b = 0; b < r.bucket_lower.size(); ++b)
    buckets.push_back({{"chord_lower", r.bucket_lower[b]}, {"max_ratio", r.bucket_max[b]}});
  return {{"sigma", to_string(r.sigma)}, {"r_min", r.r_min},           {"pairs", r.pairs},
          {"max_ratio", r.max_ratio},    {"min_margin", r.min_margin}, {"buckets", buckets},
          {"non_increasing", r.non_increasing}};
}

Json to_json(const DirectionSample& d) {
  return {{"radius", d.radius}, {"side", d.side}, {"chord", d.chord}, {"direction", to_json(d.direction)},
          {"angle", d.angle}};
}

Json to_json(const ComparabilityReport& r) {
  return {{"k", r.k},
          {"c_target", r.c_target},
          {"pairs", r.pairs},
          {"prop_ratio", {r.prop_min, r.prop_max}},
          {"lemma_ratio", {r.lemma_min, r.lemma_max}},
          {"reported_m", r.reported_m},
          {"prop_ratio_beyond_m", {r.prop_min_beyond, r.prop_max_beyond}}};
}

Json to_json(const DensityProfile& p) {
  return {{"sigma", to_string(p.sigma)},
          {"vertices", p.arc.size()},
          {"length", p.length()},
          {"depth", p.depth},
          {"tail", p.tail},
          {"normalizer", p.normalizer},
          {"tail_model", {{"c1", p.model.c1}, {"alpha", p.model.alpha}, {"lambda_min", p.model.lambda_min}}}};
}

Json to_json(const UbdReport& r) {
  Json centers = Json::array();
  for (const auto& c : r.centers) centers.push_back(to_json(c));
  return {{"sigma", to_string(r.sigma)}, {"mode", to_string(r.mode)},       {"R", r.lengths}, {"K", r.k},
          {"slope", r.slope},            {"verdict", to_string(r.verdict)}, {"centers", centers}};
}

Json to_json(const EmpiricalDisintegration& e) {
  Json plaques = Json::array();
  for (const auto& p : e.plaques)
    plaques.push_back({{"plaque", p.plaque}, {"samples", p.samples}, {"empty_bin", p.empty_bin}});
  return {{"edges", e.edges}, {"samples", e.samples},     {"draws", e.draws},
          {"seed", e.seed},   {"empty_bin", e.empty_bin}, {"plaques", plaques}};
}

Json to_json(const HolonomyReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) samples.push_back({{"du_xy", s.du_xy}, {"t", s.t}, {"ratio", s.ratio}});
  return {{"kind", to_string(r.kind)}, {"samples", samples}, {"min", r.min_ratio}, {"max", r.max_ratio},
          {"C_hat", r.c_hat}};
}

Json to_json(const Strip& s) {
  return {{"x", to_json(s.x)},
          {"y", to_json(s.y)},
          {"du", s.du},
          {"center_arcs", s.center_arcs},
          {"lengths", s.lengths},
          {"consistency", s.consistency}};
}

Json to_json(const LipschitzDelta& l) {
  return {{"segment", l.segment},
          {"lipschitz", l.lipschitz},
          {"delta_c", l.delta_c.value},
          {"delta_c_depth", l.delta_c.depth},
          {"delta_c_tail", l.delta_c.tail},
          {"ratio", l.ratio}};
}

Json to_json(const PeriodicOrbit& o) {
  return {{"x", to_json(o.x)},
          {"period", o.period},
          {"k", to_json(o.k)},
          {"exponents", sigma_triplet(o.exponents)},
          {"residual", o.residual}};
}

Json to_json(const PeriodicSearch& s) {
  Json j = {{"period", s.period},
            {"expected", s.expected},
            {"points", s.points},
            {"orbits", s.orbits.size()},
            {"diverged", s.diverged},
            {"complex_excluded", s.complex_excluded},
            {"count_matches", s.count_matches}};
  if (s.continuum)
    j["continuum"] = {{"kernel_dimension", s.continuum->kernel_dimension},
                      {"components", s.continuum->components},
                      {"direction", to_json(s.continuum->direction)},
                      {"invariants", array(s.continuum->invariants)}};
  return j;
}

Json to_json(const PeriodicDataReport& r) {
  Json orbits = Json::array();
  for (const auto& o : r.orbits) orbits.push_back(to_json(o));
  Json searches = Json::array();
  for (const auto& s : r.searches) searches.push_back(to_json(s));
  Json verdict = Json::object();
  for (Sigma s : all_sigmas) verdict[std::string(to_string(s))] = r.constant[index(s)] ? "constant" : "non-constant";
  return {{"map", r.map},
          {"iterate", r.iterate},
          {"period", r.max_period},
          {"threshold", r.threshold},
          {"searches", searches},
          {"orbits", orbits},
          {"spread", sigma_triplet(r.spread)},
          {"deviation", sigma_triplet(r.deviation)},
          {"verdict", verdict},
          {"excluded", r.excluded}};
}

Json to_json(const RigidityReport& r) {
  Json clusters = Json::array();
  for (const auto& c : r.clusters)
    clusters.push_back({{"seeds", c.seeds}, {"exponents", array(c.exponents)}, {"stderr", array(c.stderr_)}});
  Json seeds = Json::array();
  for (const auto& s : r.per_seed)
    seeds.push_back({{"task", s.task}, {"start", to_json(s.start)}, {"exponents", array(s.exponents)}});
  return {{"map", to_json(r.spec)},
          {"seeds", r.seeds},
          {"n", r.n},
          {"burn_in", r.burn_in},
          {"master_seed", r.master_seed},
          {"exponents", array(r.exponents)},
          {"stderr", array(r.stderr_)},
          {"linear", array(r.linear)},
          {"difference", array(r.difference)},
          {"rigid", r.rigid},
          {"inequality", r.inequality},
          {"strict_drop", r.strict_drop},
          {"verdict", to_string(r.verdict)},
          {"clusters", clusters},
          {"per_seed", seeds}};
}

Json to_json(const SweepReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    Json j = {{"epsilon", p.epsilon}, {"map", p.map}, {"mean", p.mean}, {"stderr", p.stderr_}};
    if (p.has_mirror) j["mirror"] = {{"mean", p.mirror_mean}, {"stderr", p.mirror_stderr}};
    points.push_back(j);
  }
  return {{"family", r.family},
          {"seeds", r.seeds},
          {"n", r.n},
          {"master_seed", r.master_seed},
          {"flip_coordinate", r.flip_coordinate},
          {"points", points},
          {"argmax", r.argmax},
          {"max_at_zero", r.max_at_zero},
          {"separation_radius", r.separation_radius},
          {"separated", r.separated},
          {"symmetric", r.symmetric}};
}

Json to_json(const CenterTopologyReport& r) {
  Json starts = Json::array();
  for (const auto& s : r.starts) starts.push_back(to_json(s));
  return {{"map", to_json(r.spec)},
          {"exponent", r.exponent},
          {"stderr", r.stderr_},
          {"exponent_zero", r.exponent_zero},
          {"starts", starts},
          {"closure", r.closure},
          {"max_closure", r.max_closure},
          {"closes", r.closes},
          {"verdict_applies", r.verdict_applies}};
}

Json to_json(const AnosovCenterReport& r) {
  return {{"map", to_json(r.spec)}, {"exponent", r.exponent}, {"stderr", r.stderr_},
          {"linear", r.linear},     {"margin", r.margin},     {"holds", r.holds}};
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace ph3

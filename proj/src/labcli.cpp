#include "ph3/labcli.hpp"

#include "ph3/catalog.hpp"
#include "ph3/map_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace ph3::lab {

namespace fs = std::filesystem;

bool known_kind(std::string_view kind) { return std::find(kinds.begin(), kinds.end(), kind) != kinds.end(); }

std::vector<std::string> allowed_keys(std::string_view kind) {
  std::vector<std::string> keys{"kind", "seed", "out"};
  auto add = [&keys](std::initializer_list<const char*> more) { keys.insert(keys.end(), more.begin(), more.end()); };
  if (kind != "sweep") add({"map"});
  if (kind == "spectrum" || kind == "rigidity") add({"n", "seeds", "burn_in"});
  if (kind == "splitting") add({"points", "horizon"});
  if (kind == "leaf") add({"sigma", "R", "spacing", "x", "horizon"});
  if (kind == "density") add({"sigma", "R", "spacing", "tau", "x"});
  if (kind == "ubd")
    add({"sigma", "R", "mode", "centers", "disk_radius", "plaques", "bins", "samples", "spacing", "tau"});
  if (kind == "holonomy") add({"mode", "du", "t", "bases", "center_length", "strip_samples", "spacing", "ell"});
  if (kind == "periodic") add({"max_period", "threshold", "iterate", "slices"});
  if (kind == "sweep") add({"family", "eps", "n", "seeds", "flip", "separation"});
  if (kind == "center-topology") add({"n", "seeds", "leaves"});
  if (kind == "qi") add({"sigma", "R", "spacing", "r_min", "radii", "k", "c_target", "x"});
  return keys;
}

namespace {

[[noreturn]] void bad(const kv::Entry& e, const std::string& what) {
  throw UsageError("line " + std::to_string(e.line) + ": key '" + e.key + "': " + what);
}

std::size_t positive_size(const kv::Entry& e) {
  const std::int64_t v = kv::to_int(e);
  if (v < 1) bad(e, "must be >= 1");
  return static_cast<std::size_t>(v);
}

double positive(const kv::Entry& e) {
  const double v = kv::to_double(e);
  if (!(v > 0.0)) bad(e, "must be positive");
  return v;
}

std::vector<double> positives(const kv::Entry& e) {
  std::vector<double> v = kv::to_doubles(e);
  if (v.empty()) bad(e, "needs at least one value");
  for (double d : v)
    if (!(d > 0.0)) bad(e, "values must be positive");
  return v;
}

std::vector<Sigma> sigma_list(const kv::Entry& e, bool allow_center) {
  std::vector<Sigma> out;
  std::istringstream in(e.value);
  std::string word;
  while (in >> word) {
    try {
      out.push_back(sigma_from_string(word));
    } catch (const Error&) {
      bad(e, "unknown direction '" + word + "'");
    }
    if (!allow_center && out.back() == Sigma::c) bad(e, "direction c is not allowed here");
  }
  if (out.empty()) bad(e, "needs a direction");
  return out;
}

std::string format_epsilon(double e) { return kv::format_double(e); }

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& kind, const std::string& origin,
                        const std::string& base_dir) {
  if (!known_kind(kind)) throw UsageError("unknown experiment kind '" + kind + "'");
  const kv::Document doc = kv::parse(text, origin);
  if (doc.sections.size() > 1)
    throw UsageError("manifest must not contain sections; found [" + doc.sections[1].name + "]");
  const kv::Section& root = doc.root();
  root.reject_unknown(allowed_keys(kind));

  Manifest m;
  m.kind = kind;
  m.text = text;
  if (const auto* e = root.find("kind"); e && e->value != kind)
    bad(*e, "manifest is for '" + e->value + "' but '" + kind + "' was requested");
  if (const auto* e = root.find("seed")) m.seed = kv::to_uint(*e);
  if (const auto* e = root.find("out")) m.out = e->value;
  if (kind == "sweep") {
    const std::string& fam = root.require("family");
    const auto& cat = catalog();
    const auto it = std::find_if(cat.begin(), cat.end(), [&](const CatalogEntry& c) { return c.family == fam; });
    if (it == cat.end() || !it->parametric) bad(*root.find("family"), "not a parametric built-in family");
    m.family = fam;
  } else {
    m.map_reference = root.require("map");
    std::string ref = m.map_reference;
    if (ref.rfind("builtin:", 0) != 0 && !base_dir.empty() && fs::path(ref).is_relative())
      ref = (fs::path(base_dir) / ref).string();
    try {
      m.map = resolve_map(ref);
    } catch (const Error& err) {
      throw UsageError("key 'map': " + std::string(err.what()));
    }
  }

  for (const auto& e : root.entries) {
    const std::string& k = e.key;
    if (k == "n") m.n = positive_size(e);
    else if (k == "seeds") m.seeds = positive_size(e);
    else if (k == "burn_in") m.burn_in = static_cast<std::size_t>(std::max<std::int64_t>(0, kv::to_int(e)));
    else if (k == "points") m.points = positive_size(e);
    else if (k == "horizon") {
      m.horizon = static_cast<int>(kv::to_int(e));
      if (m.horizon < 0) bad(e, "must be >= 0");
    } else if (k == "sigma") m.sigmas = sigma_list(e, kind == "leaf" || kind == "qi");
    else if (k == "R") {
      if (kind == "ubd") m.lengths = positives(e);
      else m.R = positive(e);
    } else if (k == "spacing") m.spacing = positive(e);
    else if (k == "tau") m.tau = positive(e);
    else if (k == "x") {
      const auto v = kv::to_doubles(e);
      if (v.size() != 3) bad(e, "needs three coordinates");
      m.x = Vec3(v[0], v[1], v[2]);
    } else if (k == "mode") {
      m.mode = e.value;
      const bool ok = kind == "ubd" ? (m.mode == "analytic" || m.mode == "empirical")
                                    : (m.mode == "center" || m.mode == "unstable" || m.mode == "lipschitz");
      if (!ok) bad(e, "unknown mode '" + m.mode + "'");
    } else if (k == "centers") m.centers = positive_size(e);
    else if (k == "disk_radius") m.disk_radius = positive(e);
    else if (k == "plaques") {
      m.plaques = static_cast<int>(positive_size(e));
      const int g = static_cast<int>(std::lround(std::sqrt(m.plaques)));
      if (g * g != m.plaques) bad(e, "must be a perfect square");
    } else if (k == "bins") m.bins = static_cast<int>(positive_size(e));
    else if (k == "samples") m.samples = positive_size(e);
    else if (k == "du") {
      m.du = kv::to_doubles(e);
      if (m.du.empty()) bad(e, "needs at least one value");
      for (double d : m.du)
        if (!(std::abs(d) > 0.0)) bad(e, "values must be nonzero");
    } else if (k == "t") {
      m.t = kv::to_doubles(e);
      if (m.t.empty()) bad(e, "needs at least one value");
    } else if (k == "bases") m.bases = positive_size(e);
    else if (k == "center_length") m.center_length = positive(e);
    else if (k == "strip_samples") m.strip_samples = positive_size(e);
    else if (k == "ell") m.ell = positive(e);
    else if (k == "max_period") m.max_period = static_cast<int>(positive_size(e));
    else if (k == "threshold") m.threshold = positive(e);
    else if (k == "iterate") {
      m.iterates.clear();
      for (std::int64_t v : kv::to_ints(e)) {
        if (v < 1) bad(e, "iterates must be >= 1");
        m.iterates.push_back(static_cast<int>(v));
      }
      if (m.iterates.empty()) bad(e, "needs at least one value");
    } else if (k == "slices") m.slices = static_cast<int>(positive_size(e));
    else if (k == "eps") {
      m.eps = kv::to_doubles(e);
      if (std::find(m.eps.begin(), m.eps.end(), 0.0) == m.eps.end()) bad(e, "grid must contain 0");
    } else if (k == "flip") {
      m.flip = static_cast<int>(kv::to_int(e));
      if (m.flip < 0 || m.flip > 3) bad(e, "must be 0 (off) or a coordinate 1..3");
    } else if (k == "separation") m.separation = positive(e);
    else if (k == "leaves") m.leaves = positive_size(e);
    else if (k == "r_min") m.r_min = positive(e);
    else if (k == "radii") m.radii = positives(e);
    else if (k == "k") {
      m.ks.clear();
      for (std::int64_t v : kv::to_ints(e)) {
        if (v < 1) bad(e, "values must be >= 1");
        m.ks.push_back(static_cast<int>(v));
      }
    } else if (k == "c_target") {
      m.c_target = kv::to_double(e);
      if (!(m.c_target > 1.0)) bad(e, "must exceed 1");
    }
  }
  if (kind == "holonomy" && m.mode.empty()) m.mode = "center";
  if (kind == "ubd" && m.mode.empty()) m.mode = "analytic";
  if (kind == "ubd" && !root.find("sigma")) m.sigmas = {Sigma::u, Sigma::s};
  return m;
}

Manifest read_manifest(const std::string& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read manifest '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), kind, path, fs::path(path).parent_path().string());
}

namespace {

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  for (double v : values) {
    if (!row.empty()) row += ',';
    row += kv::format_double(v);
  }
  return row + "\n";
}

LeafOptions leaf_options(const Manifest& m, Execution exec) {
  LeafOptions o;
  o.spacing = m.spacing;
  o.horizon = m.horizon;
  o.frame_horizon = m.frame_horizon;
  o.exec = exec;
  return o;
}

Vec3 start_point(const Manifest& m) { return m.x ? *m.x : seed_points(1, m.seed).front(); }

}  // namespace

Outcome execute(const Manifest& m, Execution exec) {
  Outcome out;
  Json& r = out.report;
  r["kind"] = m.kind;
  r["seed"] = m.seed;
  r["manifest"] = m.text;
  if (m.kind != "sweep") r["map"] = to_json(m.map);
  std::optional<TorusMap> map;
  if (m.kind != "sweep") map.emplace(m.map);

  if (m.kind == "spectrum") {
    const LyapunovReport e = lyapunov_ensemble(*map, m.seeds, m.seed, m.n, m.burn_in, exec);
    r["linear"] = to_json(map->linearization());
    r["lyapunov"] = to_json(e);
    std::string csv = "seed,lambda_s,lambda_c,lambda_u\n";
    for (const auto& s : e.per_seed)
      csv += std::to_string(s.task) + "," + csv_row({s.exponents[0], s.exponents[1], s.exponents[2]});
    out.files.emplace_back("spectrum.csv", csv);
  } else if (m.kind == "splitting") {
    Json frames = Json::array();
    std::array<double, 3> worst{};
    const auto pts = seed_points(m.points, m.seed);
    std::vector<SplittingFrame> result(pts.size());
    for_each_index(pts.size(), exec, [&](std::size_t i) {
      result[i] = oseledec_splitting(*map, pts[i], m.horizon > 0 ? m.horizon : m.frame_horizon);
    });
    for (const auto& f : result) {
      frames.push_back(to_json(f));
      for (int k = 0; k < 3; ++k) worst[k] = std::max(worst[k], f.residuals[k]);
    }
    r["frames"] = frames;
    r["max_residuals"] = {worst[0], worst[1], worst[2]};
  } else if (m.kind == "leaf") {
    const LeafSegment leaf = trace_leaf(*map, m.sigmas.front(), start_point(m), m.R, leaf_options(m, exec));
    r["leaf"] = {{"sigma", to_string(leaf.sigma)},
                 {"base", to_json(leaf.base)},
                 {"vertices", leaf.size()},
                 {"length_before", leaf.length_before()},
                 {"length_after", leaf.length_after()},
                 {"horizon", leaf.horizon},
                 {"max_tangency_defect", leaf.max_tangency_defect},
                 {"max_chord_angle", leaf.max_chord_angle}};
    out.files.emplace_back("leaf.csv", leaf_csv(leaf));
  } else if (m.kind == "density") {
    const LeafSegment leaf = trace_leaf(*map, m.sigmas.front(), start_point(m), m.R, leaf_options(m, exec));
    const DensityProfile p = density_profile(*map, leaf, m.tau, -1, exec);
    r["density"] = to_json(p);
    r["density"]["flatness_radius"] = flatness_radius(p);
    std::string csv = "arc_length,delta,rho\n";
    for (std::size_t i = 0; i < p.arc.size(); ++i) csv += csv_row({p.arc[i], p.values[i], p.rho[i]});
    out.files.emplace_back("density.csv", csv);
  } else if (m.kind == "ubd") {
    UbdOptions o;
    o.centers = m.centers;
    o.seed = m.seed;
    o.disk_radius = m.disk_radius;
    o.plaque_count = m.plaques;
    o.tau = m.tau;
    o.bins = m.bins;
    o.samples = m.samples;
    o.spacing = m.spacing;
    o.exec = exec;
    Json reports = Json::array();
    std::string csv = "sigma,R,K\n";
    for (Sigma s : m.sigmas) {
      const UbdReport u =
          ubd_constant(*map, s, m.lengths, m.mode == "empirical" ? UbdMode::empirical : UbdMode::analytic, o);
      reports.push_back(to_json(u));
      for (std::size_t i = 0; i < u.lengths.size(); ++i)
        csv += std::string(to_string(s)) + "," + csv_row({u.lengths[i], u.k[i]});
    }
    r["ubd"] = reports;
    out.files.emplace_back("ubd.csv", csv);
  } else if (m.kind == "holonomy") {
    HolonomyOptions o;
    o.leaf = leaf_options(m, exec);
    o.exec = exec;
    const auto bases = seed_points(m.bases, m.seed);
    if (m.mode == "center") {
      r["holonomy"] = to_json(center_holonomy_report(*map, bases, m.du, m.t, o));
    } else if (m.mode == "unstable") {
      Json strips = Json::array();
      HolonomyReport all;
      all.kind = HolonomyKind::unstable;
      for (const Vec3& b : bases) {
        const Strip s = build_strip(*map, b, m.du.front(), m.center_length, m.strip_samples, o);
        strips.push_back(to_json(s));
        const HolonomyReport h = unstable_holonomy_report(s);
        all.samples.insert(all.samples.end(), h.samples.begin(), h.samples.end());
      }
      all.summarize();
      r["holonomy"] = to_json(all);
      r["strips"] = strips;
    } else {
      Json rows = Json::array();
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const Vec3& b : bases)
        for (double t : m.t) {
          const LipschitzDelta l = holonomy_lipschitz_vs_delta(*map, b, m.ell, t, o);
          Json j = to_json(l);
          j["t"] = t;
          j["x"] = to_json(b);
          rows.push_back(j);
          lo = std::min(lo, l.ratio);
          hi = std::max(hi, l.ratio);
        }
      r["lipschitz_vs_delta"] = {{"samples", rows}, {"min_ratio", lo}, {"max_ratio", hi}};
    }
  } else if (m.kind == "periodic") {
    PeriodicOptions o;
    o.slices = m.slices;
    o.exec = exec;
    Json reports = Json::array();
    std::string csv = "iterate,period,x1,x2,x3,lambda_s,lambda_c,lambda_u\n";
    for (int it : m.iterates) {
      const PeriodicDataReport p = periodic_data_constancy(*map, m.max_period, m.threshold, it, o);
      reports.push_back(to_json(p));
      for (const auto& orb : p.orbits)
        csv += std::to_string(it) + "," + std::to_string(orb.period) + "," +
               csv_row({orb.x(0), orb.x(1), orb.x(2), orb.exponents[0], orb.exponents[1], orb.exponents[2]});
    }
    r["periodic"] = reports;
    out.files.emplace_back("periodic.csv", csv);
  } else if (m.kind == "rigidity") {
    const RigidityReport rr = run_rigidity(*map, m.seeds, m.n, m.seed, m.burn_in, exec);
    r["rigidity"] = to_json(rr);
    out.anomaly = rr.verdict == RigidityVerdict::violation;
    const LinearData& lin = map->linearization();
    if (lin.anosov && lin.modulus(Sigma::c) > 1.0) {
      AnosovCenterReport a;
      a.spec = m.map;
      a.exponent = rr.exponents[index(Sigma::c)];
      a.stderr_ = rr.stderr_[index(Sigma::c)];
      a.linear = rr.linear[index(Sigma::c)];
      a.margin = a.linear - a.exponent;
      a.holds = a.exponent <= a.linear + decision_sigmas * a.stderr_ + rounding_floor;
      r["center_inequality"] = to_json(a);
      if (!a.holds) out.anomaly = true;
    }
  } else if (m.kind == "sweep") {
    const std::string fam = m.family;
    const SweepReport s = run_sweep(
        fam, [&fam](double e) { return builtin_map(fam + ":" + format_epsilon(e)); }, m.eps, m.seeds, m.n, m.seed,
        m.flip - 1, m.separation, exec);
    r["sweep"] = to_json(s);
    out.anomaly = !s.max_at_zero;
    std::string csv = "epsilon,mean,stderr\n";
    for (const auto& p : s.points) csv += csv_row({p.epsilon, p.mean, p.stderr_});
    out.files.emplace_back("sweep.csv", csv);
  } else if (m.kind == "center-topology") {
    const CenterTopologyReport c = run_center_topology(*map, m.seeds, m.n, m.leaves, m.seed, exec);
    r["center_topology"] = to_json(c);
    out.anomaly = c.verdict_applies && c.exponent_zero && !c.closes;
  } else if (m.kind == "qi") {
    const Sigma s = m.sigmas.front();
    const LeafSegment leaf = trace_leaf(*map, s, start_point(m), m.R, leaf_options(m, exec));
    const QuasiIsometryReport q = quasi_isometry_constant(leaf, m.r_min);
    r["qi"] = to_json(q);
    Json dirs = Json::array();
    for (const auto& d : asymptotic_direction(leaf, map->linearization().direction(s), m.radii))
      dirs.push_back(to_json(d));
    r["directions"] = dirs;
    if (s != Sigma::c) {
      Json comp = Json::array();
      for (int k : m.ks) comp.push_back(to_json(large_scale_comparability(*map, leaf, k, m.c_target)));
      r["comparability"] = comp;
    }
    out.anomaly = q.min_margin < -1e-12 * m.R;
  }
  return out;
}

int run(const Invocation& inv, std::ostream& log, std::ostream& err) {
  try {
    if (inv.jobs) {
      if (*inv.jobs < 1) throw UsageError("--jobs must be >= 1");
      set_max_jobs(*inv.jobs);
    } else if (const char* env = std::getenv("PH3LAB_JOBS"); env && *env) {
      char* end = nullptr;
      const long j = std::strtol(env, &end, 10);
      if (*end != '\0' || j < 1) throw UsageError("PH3LAB_JOBS must be a positive integer");
      set_max_jobs(static_cast<int>(j));
    }
    Manifest m = read_manifest(inv.manifest, inv.kind);
    if (inv.seed) m.seed = *inv.seed;
    if (inv.out) m.out = *inv.out;

    Outcome o = execute(m);
    o.report[timestamp_key] = timestamp_now();
    const fs::path dir(m.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory '" + m.out + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
      std::ofstream f(dir / name, std::ios::binary);
      if (!(f << content)) throw UsageError("cannot write '" + (dir / name).string() + "'");
    };
    std::string base = m.kind;
    write(base + ".json", dump_report(o.report));
    for (const auto& [name, content] : o.files) write(name, content);
    log << m.kind << ": wrote " << (dir / (base + ".json")).string();
    for (const auto& f : o.files) log << ", " << f.first;
    log << "\n";
    if (o.anomaly) {
      err << m.kind << ": violation-class verdict; see the report\n";
      return exit_anomaly;
    }
    return exit_ok;
  } catch (const Error& e) {
    err << "ph3lab: " << e.what() << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    err << "ph3lab: " << e.what() << "\n";
    return exit_failure;
  }
}

std::string catalog_listing() {
  std::ostringstream os;
  os << std::setprecision(10);
  for (const auto& c : catalog()) {
    const std::string name = c.parametric ? c.family + ":" + kv::format_double(c.default_epsilon) : c.family;
    const TorusMap map(builtin_map(name));
    const LinearData& lin = map.linearization();
    os << c.family << (c.parametric ? " (eps, default " + kv::format_double(c.default_epsilon) + ")" : "") << "\n"
       << "  " << c.description << "\n"
       << "  eigenvalues s c u: " << lin.eigenvalues[0] << " " << lin.eigenvalues[1] << " " << lin.eigenvalues[2]
       << "\n"
       << "  exponents   s c u: " << lin.exponents[0] << " " << lin.exponents[1] << " " << lin.exponents[2]
       << (lin.anosov ? "  (Anosov)" : "") << "\n";
  }
  return os.str();
}

}  // namespace ph3::lab

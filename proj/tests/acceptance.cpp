#include "oracles.hpp"

#include "ph3/box.hpp"
#include "ph3/catalog.hpp"
#include "ph3/cocycle.hpp"
#include "ph3/density.hpp"
#include "ph3/experiments.hpp"
#include "ph3/holonomy.hpp"
#include "ph3/leaves.hpp"
#include "ph3/periodic.hpp"

#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ph3;
namespace fs = std::filesystem;

namespace {

constexpr double tau = 1e-8;
constexpr std::size_t ensemble_seeds = 32;
constexpr std::size_t ensemble_n = 1000000;
constexpr std::uint64_t master_seed = 20240601;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] " << what << "; ";
    }
  }
};

std::vector<std::string> corpus() {
  std::vector<std::string> names;
  for (const auto& c : catalog()) names.push_back(c.family);
  return names;
}

LeafOptions spaced(double h) {
  LeafOptions o;
  o.spacing = h;
  return o;
}

HolonomyOptions coarse_holonomy() {
  HolonomyOptions o;
  o.leaf.spacing = 1e-2;
  return o;
}

void linear_exactness(Outcome& out) {
  const std::vector<double> lengths{1, 5, 25, 125};
  double lyap = 0.0, dens = 0.0, kdev = 0.0, hdev = 0.0;
  for (const char* name : {"linear_ph", "linear_anosov"}) {
    const TorusMap f(builtin_map(name));
    const auto ref = oracle::log_moduli(f.linear_part().entries());
    const LyapunovReport r = lyapunov_spectrum(f, Vec3(0.3, 0.1, 0.7), 100);
    for (int k = 0; k < 3; ++k) lyap = std::max(lyap, std::abs(r.exponents[k] - ref[k]));
    for (Sigma s : {Sigma::s, Sigma::u}) {
      const DensityProfile p = density_profile(f, trace_strong_leaf(f, s, Vec3(0.31, 0.72, 0.45), 5.0, spaced(1e-2)));
      for (double v : p.values) dens = std::max(dens, std::abs(v - 1.0));
      UbdOptions o;
      o.centers = 2;
      const UbdReport u = ubd_constant(f, s, lengths, UbdMode::analytic, o);
      for (double k : u.k) kdev = std::max(kdev, std::abs(k - 1.0));
    }
    const HolonomyReport c =
        center_holonomy_report(f, seed_points(3, master_seed), {0.5, 1.0, 2.0}, {-0.5, 1.0}, coarse_holonomy());
    hdev = std::max({hdev, std::abs(c.min_ratio - 1.0), std::abs(c.max_ratio - 1.0)});
    const HolonomyReport h = unstable_holonomy_report(build_strip(f, Vec3(0.4, 0.1, 0.6), 1.0, 1.0, 5, coarse_holonomy()));
    hdev = std::max({hdev, std::abs(h.min_ratio - 1.0), std::abs(h.max_ratio - 1.0)});
  }
  const TorusMap ph(builtin_map("linear_ph"));
  const double golden = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  const double lu = lyapunov_spectrum(ph, Vec3(0.3, 0.1, 0.7), 100).exponent(Sigma::u);
  out.require(std::abs(lu - golden) <= 1e-10, "lambda^u(A_ph) vs log((3+sqrt5)/2)");
  out.require(lyap <= 1e-10, "Lyapunov exponents vs log eigenvalue moduli");
  out.require(dens <= 1e-12, "Delta == 1");
  out.require(kdev <= 1e-6, "K(R) == 1");
  out.require(hdev <= 1e-6, "holonomy ratios == 1");
  out.detail << "max |lambda - log|mu|| " << lyap << ", max |Delta - 1| " << dens << ", max |K - 1| " << kdev
             << ", max |ratio - 1| " << hdev;
}

struct DisintegrationError {
  double mean = 0.0;
  double worst = 0.0;
};

DisintegrationError disintegration_error(const TorusMap& f, const FoliatedBox& box, std::size_t m, std::uint64_t seed) {
  const EmpiricalDisintegration e = empirical_disintegration(box, m, 50, seed);
  DisintegrationError r;
  for (const auto& h : e.plaques) {
    const DensityProfile prof = density_profile(f, box.plaques[h.plaque]);
    const double l1 = l1_distance(h, e.edges, profile_bin_masses(prof, e.edges));
    r.mean += l1 / double(e.plaques.size());
    r.worst = std::max(r.worst, l1);
  }
  return r;
}

void density_consistency(Outcome& out) {
  const TorusMap f(builtin_map("da_ph:0.05"));
  BoxOptions bo;
  bo.leaf.spacing = 0.01;
  const FoliatedBox box = build_foliated_box(f, Sigma::u, Vec3(0.31, 0.72, 0.45), 2.0, 0.05, 9, bo);
  const std::size_t m = 1000000;
  double worst = 0.0, coarse = 0.0, fine = 0.0;
  for (std::uint64_t seed : {42u, 43u, 44u}) {
    const DisintegrationError a = disintegration_error(f, box, m, seed);
    const DisintegrationError b = disintegration_error(f, box, 4 * m, seed);
    worst = std::max({worst, a.worst, b.worst});
    coarse += a.mean / 3.0;
    fine += b.mean / 3.0;
  }
  const double ratio = coarse / fine;
  out.require(worst <= 0.05, "per-plaque L1 <= 0.05");
  out.require(ratio >= 1.5 && ratio <= 2.5, "L1(M) / L1(4M) in [1.5, 2.5]");
  out.detail << "worst plaque L1 " << worst << ", mean L1 " << coarse << " -> " << fine << ", ratio " << ratio;
}

/// D(leaf) with D = f (u) or f^{-1} (s): the same seed chart pulled one stage further.
LeafSegment image_leaf(const TorusMap& f, const LeafSegment& leaf) {
  const bool forward = leaf.sigma == Sigma::u;
  LeafSegment img = leaf;
  StrongChart& chart = img.chart;
  const Vec3 last = chart.reference.back();
  chart.reference.push_back(reduce(forward ? f.evaluate(last) : f.inverse_evaluate(last)));
  ++chart.horizon;
  img.horizon = chart.horizon;
  const Vec3 base = forward ? f.evaluate(leaf.vertices[leaf.base_index], Space::cover)
                            : f.inverse_evaluate(leaf.vertices[leaf.base_index], Space::cover);
  const Vec3 origin = evaluate_chart(f, chart, leaf.parameter[leaf.base_index]).offset;
  for (std::size_t k = 0; k < leaf.size(); ++k) {
    const ChartPoint p = evaluate_chart(f, chart, leaf.parameter[k]);
    img.vertices[k] = base + (p.offset - origin);
    img.tangents[k] = p.tangent;
    img.log_stretch[k] = p.log_stretch;
  }
  img.arc[leaf.base_index] = 0.0;
  for (std::size_t k = leaf.base_index + 1; k < leaf.size(); ++k)
    img.arc[k] = img.arc[k - 1] + (img.vertices[k] - img.vertices[k - 1]).norm();
  for (std::size_t k = leaf.base_index; k-- > 0;) img.arc[k] = img.arc[k + 1] - (img.vertices[k + 1] - img.vertices[k]).norm();
  img.base = base;
  return img;
}

void cocycle_identities(Outcome& out) {
  const auto names = corpus();
  const std::size_t per = 1000 / (2 * names.size());
  std::mt19937_64 rng(master_seed);
  double chain = 0.0, inversion = 0.0, dynamical = 0.0, rerooted = 0.0;
  std::size_t triples = 0;
  const auto starts = seed_points(names.size(), master_seed);
  for (std::size_t m = 0; m < names.size(); ++m) {
    const TorusMap f(builtin_map(names[m]));
    for (Sigma s : {Sigma::s, Sigma::u}) {
      const LeafSegment leaf = trace_strong_leaf(f, s, starts[m], 1.5, spaced(1e-2));
      const TailModel model = calibrate_tail(f, leaf);
      const LeafSegment img = image_leaf(f, leaf);
      const TailModel img_model = calibrate_tail(f, img);
      const bool forward = s == Sigma::u;
      auto jac = [&](std::size_t i) {
        const Mat3 d = forward ? f.jacobian(leaf.vertices[i]) : f.inverse_jacobian(leaf.vertices[i]);
        return (d * leaf.tangents[i]).norm();
      };
      DeltaOptions opts;
      opts.tau = tau;
      opts.leaf = spaced(1e-2);
      std::uniform_int_distribution<std::size_t> pick(0, leaf.size() - 1);
      for (std::size_t t = 0; t < per; ++t, ++triples) {
        const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        const DeltaValue ij = delta(f, leaf, model, i, j, tau);
        const DeltaValue jk = delta(f, leaf, model, j, k, tau);
        const DeltaValue ik = delta(f, leaf, model, i, k, tau);
        const DeltaValue ji = delta(f, leaf, model, j, i, tau);
        chain = std::max(chain, std::abs(ij.log_value + jk.log_value - ik.log_value));
        inversion = std::max(inversion, std::abs(ij.log_value + ji.log_value));
        const double jac_ratio = std::log(jac(j)) - std::log(jac(i));
        const DeltaValue image = delta(f, img, img_model, i, j, tau);
        dynamical = std::max(dynamical, std::abs(image.log_value + jac_ratio - ij.log_value));
        const DeltaValue fresh = delta(f, s, img.vertices[i], img.vertices[j], opts);
        rerooted = std::max(rerooted, std::abs(fresh.log_value + jac_ratio - ij.log_value));
      }
    }
  }
  out.require(triples >= 1000, "at least 1000 triples");
  out.require(chain <= 2 * tau, "chain rule");
  out.require(inversion <= 2 * tau, "inversion");
  out.require(dynamical <= 2 * tau, "dynamical identity");
  out.detail << triples << " triples, max log error: chain " << chain << ", inversion " << inversion
             << ", dynamical " << dynamical << " (bound " << 2 * tau << "); image leaf re-traced from D(x): "
             << rerooted;
}

void exponent_inequality(Outcome& out) {
  std::size_t checked = 0;
  double worst_u = -1.0, worst_s = -1.0;
  for (const char* fam : {"da_ph", "da_anosov"})
    for (double eps : {0.05, 0.1, 0.2}) {
      const std::string name = std::string(fam) + ":" + std::to_string(eps);
      const RigidityReport r = run_rigidity(TorusMap(builtin_map(name)), ensemble_seeds, ensemble_n, master_seed);
      const double su = decision_sigmas * r.stderr_[index(Sigma::u)];
      const double ss = decision_sigmas * r.stderr_[index(Sigma::s)];
      const double excess_u = r.difference[index(Sigma::u)] - su;
      const double excess_s = -r.difference[index(Sigma::s)] - ss;
      worst_u = std::max(worst_u, excess_u);
      worst_s = std::max(worst_s, excess_s);
      out.require(excess_u <= 0.0, name + ": lambda^u <= lambda^u_A + 3 stderr");
      out.require(excess_s <= 0.0, name + ": lambda^s >= lambda^s_A - 3 stderr");
      out.require(r.verdict != RigidityVerdict::violation, name + ": verdict " + std::string(to_string(r.verdict)));
      ++checked;
    }
  out.detail << checked << " maps; max (lambda^u - lambda^u_A - 3se) " << worst_u
             << ", max (lambda^s_A - lambda^s - 3se) " << worst_s;
}

void epsilon_sweep(Outcome& out) {
  const std::string fam = "da_ph";
  const SweepReport s = run_sweep(
      fam, [&](double e) { return builtin_map(fam + ":" + std::to_string(e)); },
      {0.0, 0.05, -0.05, 0.1, -0.1, 0.2, -0.2}, ensemble_seeds, ensemble_n, master_seed);
  double best = -1e300;
  for (const auto& p : s.points) best = std::max(best, p.mean);
  double at_zero = 0.0;
  for (const auto& p : s.points)
    if (p.epsilon == 0.0) at_zero = p.mean;
  out.require(s.points.size() == 7, "seven grid points");
  out.require(s.argmax == 0.0 && best == at_zero, "maximum mean lambda^u at eps = 0");
  out.require(s.separated, "|eps| >= 0.1 bars clear of the eps = 0 bar");
  out.detail << "argmax " << s.argmax << ";";
  for (const auto& p : s.points) out.detail << " " << p.epsilon << ":" << p.mean << "+-" << p.stderr_;
}

const std::vector<double> ubd_lengths{1, 2, 5, 10, 25, 50, 125};

void positive_control(Outcome& out) {
  const TorusMap f(builtin_map("conj_ph:0.1"));
  for (Sigma s : {Sigma::u, Sigma::s}) {
    const UbdReport u = ubd_constant(f, s, ubd_lengths, UbdMode::analytic);
    out.require(u.slope <= ubd_slope_threshold, std::string("K(R) slope for ") + std::string(to_string(s)));
    out.detail << "slope " << to_string(s) << " " << u.slope << ", ";
  }
  for (int iterate : {1, 2}) {
    const PeriodicDataReport p = periodic_data_constancy(f, 4, 1e-3, iterate);
    double spread = 0.0;
    for (Sigma s : all_sigmas) spread = std::max(spread, p.spread[index(s)]);
    out.require(!p.orbits.empty(), "periodic orbits found");
    out.require(spread <= 1e-3, "periodic spread on f^" + std::to_string(iterate));
    out.detail << "spread f^" << iterate << " " << spread << " over " << p.orbits.size() << " orbits, ";
  }
  const RigidityReport r = run_rigidity(f, ensemble_seeds, ensemble_n, master_seed);
  out.require(r.rigid, "exponents within 3 stderr of the linear ones");
  out.detail << "rigidity " << to_string(r.verdict);
}

void contrapositive_control(Outcome& out) {
  const TorusMap f(builtin_map("da_ph:0.2"));
  const UbdReport u = ubd_constant(f, Sigma::u, ubd_lengths, UbdMode::analytic);
  out.require(u.verdict == UbdVerdict::growing, "K(R) growing");
  const PeriodicDataReport p = periodic_data_constancy(f, 4);
  out.require(p.spread[index(Sigma::u)] > 1e-3, "periodic lambda^u spread > 1e-3");
  const RigidityReport r = run_rigidity(f, ensemble_seeds, ensemble_n, master_seed);
  out.require(r.strict_drop, "lambda^u < lambda^u_A - 3 stderr");
  out.detail << "K slope " << u.slope << ", periodic spread " << p.spread[index(Sigma::u)] << ", lambda^u - lambda^u_A "
             << r.difference[index(Sigma::u)] << " (3se " << decision_sigmas * r.stderr_[index(Sigma::u)] << ")";
}

void skew_center(Outcome& out) {
  const CenterTopologyReport r =
      run_center_topology(TorusMap(builtin_map("skew_ph")), ensemble_seeds, ensemble_n, 16, master_seed);
  out.require(std::abs(r.exponent) <= 1e-5, "|lambda^c| <= 1e-5");
  out.require(r.max_closure <= 1e-6 && r.closes, "every center leaf closes within 1e-6");
  out.detail << "lambda^c " << r.exponent << ", " << r.closure.size() << " leaves, max closure " << r.max_closure;
}

void geometry(Outcome& out) {
  constexpr double R = 300.0;
  const double rounding = 8.0 * DBL_EPSILON * 2.0 * R;
  double margin = 1e300, angle = 0.0, prop_lo = 1e300, prop_hi = 0.0, strip = 0.0;
  const auto starts = seed_points(corpus().size(), master_seed + 1);
  std::size_t m = 0;
  for (const std::string& name : corpus()) {
    const TorusMap f(builtin_map(name));
    const Vec3 x = starts[m++];
    for (Sigma s : {Sigma::s, Sigma::u}) {
      const std::string tag = name + " " + std::string(to_string(s));
      const LeafSegment leaf = trace_strong_leaf(f, s, x, R, spaced(2e-2));
      const QuasiIsometryReport q = quasi_isometry_constant(leaf, 1.0);
      margin = std::min(margin, q.min_margin);
      out.require(q.min_margin >= -rounding, tag + ": d_W >= chord");
      for (const auto& d : asymptotic_direction(leaf, f.linearization().direction(s), {250.0})) {
        angle = std::max(angle, d.angle);
        out.require(d.angle < 1e-2, tag + ": angle at 250");
      }
      for (int k = 1; k <= 3; ++k) {
        const ComparabilityReport c = large_scale_comparability(f, leaf, k, 2.0);
        const bool ok = std::isfinite(c.reported_m) && c.prop_min_beyond > 0.5 && c.prop_max_beyond < 2.0;
        out.require(ok, tag + ": comparability k=" + std::to_string(k));
        if (std::isfinite(c.reported_m)) {
          prop_lo = std::min(prop_lo, c.prop_min_beyond);
          prop_hi = std::max(prop_hi, c.prop_max_beyond);
        }
      }
    }
    const Strip st = build_strip(f, x, 1.0, 1.0, 5, coarse_holonomy());
    const double r = st.max_length() / st.min_length();
    strip = std::max(strip, r);
    out.require(st.min_length() > 0.0 && r <= 2.0, name + ": strip lengths within a factor 2");
  }
  out.detail << "min d_W - chord " << margin << " (allowance " << rounding << "), max angle at 250 " << angle
             << ", comparability beyond M in [" << prop_lo << ", " << prop_hi << "], max strip ratio " << strip;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.find("\"timestamp\"") == std::string::npos) kept += line + "\n";
  return kept;
}

void reproducibility(Outcome& out, const std::string& cli) {
  if (cli.empty()) {
    out.require(false, "path to ph3lab not given");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "ph3_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"rigidity", "map = builtin:da_ph:0.2\nn = 20000\nseeds = 4\nseed = 11\n"},
      {"periodic", "map = builtin:da_anosov:0.2\nmax_period = 2\nseed = 11\n"},
      {"density", "map = builtin:da_anosov_inv:0.1\nR = 2\nsigma = s\nseed = 11\n"},
  };
  std::size_t files = 0;
  for (const auto& [kind, text] : runs) {
    const fs::path manifest = dir / (kind + ".txt");
    std::ofstream(manifest) << text;
    for (const char* tag : {"a", "b"}) {
      const std::string cmd = "\"" + cli + "\" " + kind + " --manifest \"" + manifest.string() + "\" --out \"" +
                              (dir / tag / kind).string() + "\"" + (tag[0] == 'b' ? " --jobs 1" : "") +
                              " > /dev/null 2>&1";
      out.require(std::system(cmd.c_str()) == 0, kind + " run " + tag + " exits 0");
    }
    for (const auto& e : fs::directory_iterator(dir / "a" / kind)) {
      const fs::path other = dir / "b" / kind / e.path().filename();
      const std::string a = read(e.path()), b = read(other);
      out.require(fs::exists(other) && without_timestamp(a) == without_timestamp(b),
                  kind + "/" + e.path().filename().string() + " identical");
      ++files;
    }
  }
  out.detail << files << " output files compared across two runs";
}

}  // namespace

/// acceptance <path to ph3lab> [criterion numbers...]
int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"linear exactness", linear_exactness},
      {"density formula vs empirical disintegration", density_consistency},
      {"cocycle identities", cocycle_identities},
      {"DA exponent inequality", exponent_inequality},
      {"epsilon sweep peaks at the linear map", epsilon_sweep},
      {"smooth conjugate positive control", positive_control},
      {"DA contrapositive control", contrapositive_control},
      {"skew center leaves", skew_center},
      {"leaf geometry", geometry},
      {"reproducibility", [&](Outcome& o) { reproducibility(o, cli); }},
  };
  std::vector<bool> selected(criteria.size(), argc <= 2);
  for (int a = 2; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k >= 1 && k <= int(criteria.size())) selected[std::size_t(k - 1)] = true;
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

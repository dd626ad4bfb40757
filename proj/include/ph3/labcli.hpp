#pragma once

#include "ph3/kv_format.hpp"
#include "ph3/report_json.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ph3::lab {

inline constexpr std::array<std::string_view, 11> kinds{
    "spectrum", "splitting", "leaf",     "density", "ubd", "holonomy", "periodic",
    "rigidity", "sweep",     "center-topology", "qi"};

bool known_kind(std::string_view kind);

/// Parsed and validated experiment manifest. Every key is checked before any
/// computation; unset parameters keep these defaults.
struct Manifest {
  std::string kind;
  std::string text;           ///< original manifest, echoed into the report
  std::string map_reference;  ///< "builtin:<name>" or a path
  TorusMapSpec map;
  std::string family;         ///< sweep only
  std::uint64_t seed = 1;
  std::string out = ".";

  std::size_t n = 100000;
  std::size_t seeds = 8;
  std::size_t burn_in = default_burn_in;
  std::size_t points = 8;
  int horizon = 0;
  int frame_horizon = 40;
  std::vector<Sigma> sigmas{Sigma::u};
  double R = 10.0;
  std::vector<double> lengths{1, 2, 5, 10, 25};
  double spacing = 1e-2;
  double tau = 1e-8;
  std::optional<Vec3> x;
  std::string mode;
  std::size_t centers = 4;
  double disk_radius = 0.05;
  int plaques = 9;
  int bins = 20;
  std::size_t samples = 200000;
  std::vector<double> du{1.0};
  std::vector<double> t{0.5, 2.0};
  std::size_t bases = 2;
  double center_length = 2.0;
  std::size_t strip_samples = 9;
  double ell = 0.05;
  int max_period = 3;
  double threshold = 1e-3;
  std::vector<int> iterates{1, 2};
  int slices = 4;
  std::vector<double> eps{0.0, -0.1, 0.1};
  int flip = 0;  ///< 1-based coordinate, 0 disables the mirror
  double separation = 0.1;
  std::size_t leaves = 4;
  double r_min = 1.0;
  std::vector<double> radii{10.0, 50.0};
  std::vector<int> ks{1, 2, 3};
  double c_target = 2.0;
};

/// Allowed keys of a kind (common keys included).
std::vector<std::string> allowed_keys(std::string_view kind);

/// FormatError or UsageError naming the offending key. Relative map paths are
/// resolved against base_dir.
Manifest parse_manifest(const std::string& text, const std::string& kind, const std::string& origin = "<manifest>",
                        const std::string& base_dir = "");
Manifest read_manifest(const std::string& path, const std::string& kind);

struct Outcome {
  Json report;
  std::vector<std::pair<std::string, std::string>> files;  ///< CSV name and content
  bool anomaly = false;  ///< a violation-class verdict
};

/// Runs the experiment; the report has no timestamp yet.
Outcome execute(const Manifest& m, Execution exec = Execution::parallel);

struct Invocation {
  std::string kind;
  std::string manifest;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_anomaly = 2;

/// Writes <out>/<kind>.json and the CSVs; returns the exit code.
int run(const Invocation& inv, std::ostream& log, std::ostream& err);

/// Built-in corpus with eigen data of each linear part.
std::string catalog_listing();

}  // namespace ph3::lab

#pragma once

#include "ph3/box.hpp"
#include "ph3/cocycle.hpp"
#include "ph3/experiments.hpp"
#include "ph3/holonomy.hpp"
#include "ph3/leaves.hpp"
#include "ph3/periodic.hpp"

#include <json.hpp>

#include <string>

namespace ph3 {

using Json = nlohmann::json;

Json to_json(const Vec3& v);
Json to_json(const Cell& v);
/// Name plus the map spec text, enough to rebuild the map.
Json to_json(const TorusMapSpec& spec);
Json to_json(const LinearData& lin);

Json to_json(const LyapunovReport& r);
Json to_json(const SplittingFrame& f);
Json to_json(const QuasiIsometryReport& r);
Json to_json(const DirectionSample& d);
Json to_json(const ComparabilityReport& r);
Json to_json(const DensityProfile& p);
Json to_json(const UbdReport& r);
Json to_json(const EmpiricalDisintegration& e);
Json to_json(const HolonomyReport& r);
Json to_json(const Strip& s);
Json to_json(const LipschitzDelta& l);
Json to_json(const PeriodicOrbit& o);
Json to_json(const PeriodicSearch& s);
Json to_json(const PeriodicDataReport& r);
Json to_json(const RigidityReport& r);
Json to_json(const SweepReport& r);
Json to_json(const CenterTopologyReport& r);
Json to_json(const AnosovCenterReport& r);

/// The only key whose value differs between identical runs.
inline constexpr const char* timestamp_key = "timestamp";

/// Serializes with sorted keys and round-trip doubles, then a newline.
std::string dump_report(const Json& report);

}  // namespace ph3

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavmec/alternating.hpp"

namespace uavmec {

enum class BaselineKind {
  kLocalComputing,    // every bit on its own UE, uniform over slots
  kDirectTrajectory,  // straight-line flight, task and bandwidth optimized
  kOffloadingOnly,    // no local computing
  kEqualBandwidth,    // bandwidth fixed at the equal split
};

const std::vector<BaselineKind>& all_baselines();
std::string_view to_string(BaselineKind kind);
std::optional<BaselineKind> parse_baseline(std::string_view name);

/// The local computing scheme still flies the straight line and its
/// propulsion energy is part of the reported TEC.
inline constexpr bool kLocalComputingIncludesFly = true;

/// Same result type as the full solver. For kLocalComputing the report has
/// a single trace entry and no outer iterations.
Solution run_baseline(BaselineKind kind, const ScenarioConfig& cfg, const SolveOptions& opts);
Solution run_baseline(BaselineKind kind, const ScenarioConfig& cfg);

}  // namespace uavmec

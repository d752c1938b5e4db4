#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "adaptivefog/harness.hpp"
#include "adaptivefog/latency_model.hpp"
#include "adaptivefog/mobility.hpp"
#include "adaptivefog/policy.hpp"
#include "adaptivefog/synth.hpp"
#include "adaptivefog/trace_model.hpp"

namespace adaptivefog {

using Json = nlohmann::json;

/// Bumped whenever a document layout changes incompatibly.
inline constexpr int kFormatVersion = 1;

/// Every top-level document carries {"format": <kind>, "version": 1}.
/// decode<T> throws FormatError on a missing field, a wrong type, an unknown
/// kind or version, or values that break the type's invariants.
Json encode(const GridSpec& grid);
Json encode(const ServiceSet& services);
Json encode(const SwitchCost& cost);
/// `exact` stores every sorted sample; otherwise entries with more than
/// kSketchPoints samples keep only that many evenly spaced quantiles.
Json encode(const LatencyModel& model, bool exact = true);
Json encode(const MobilityModel& model);
Json encode(const SwitchPolicy& policy);
Json encode(const ScenarioSpec& spec);
Json encode(const PolicyReplay& replay);
Json encode(const SweepResult& result);

inline constexpr std::size_t kSketchPoints = 257;

template <typename T>
T decode(const Json& json);

template <> GridSpec decode<GridSpec>(const Json& json);
template <> ServiceSet decode<ServiceSet>(const Json& json);
template <> SwitchCost decode<SwitchCost>(const Json& json);
template <> LatencyModel decode<LatencyModel>(const Json& json);
template <> MobilityModel decode<MobilityModel>(const Json& json);
template <> SwitchPolicy decode<SwitchPolicy>(const Json& json);
template <> ScenarioSpec decode<ScenarioSpec>(const Json& json);
template <> PolicyReplay decode<PolicyReplay>(const Json& json);
template <> SweepResult decode<SweepResult>(const Json& json);

/// IoError when unreadable, FormatError when not JSON.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& json);

}  // namespace adaptivefog

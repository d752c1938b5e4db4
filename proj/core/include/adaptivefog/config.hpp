#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "adaptivefog/empirical_stats.hpp"
#include "adaptivefog/latency_model.hpp"
#include "adaptivefog/mobility.hpp"
#include "adaptivefog/policy.hpp"
#include "adaptivefog/serialization.hpp"
#include "adaptivefog/trace_model.hpp"

namespace adaptivefog {

struct FitConfig {
  std::size_t min_samples = kDefaultMinSamples;
  /// false stores quantile sketches instead of every sample.
  bool exact = true;
};

struct PolicyConfig {
  Server server = Server::Fog;
  double discount = kDefaultDiscount;
  int horizon_slots = 10;
  SwitchCost cost;
  double theta_f = 0.05;
  InfiniteOptions solver;
};

struct SweepConfig {
  int points = 21;
  /// Defaults to prohibitive_cost() for the configured services and horizon.
  std::optional<double> max_cost;
  /// Explicit list; overrides points / max_cost when nonempty.
  std::vector<double> costs;
};

/// Everything the CLI reads from --config. Missing keys keep these defaults;
/// unknown keys are rejected.
struct Config {
  GridSpec grid;
  /// false: the origin is taken from the trace (south-west corner).
  bool grid_origin_set = false;
  ServiceSet services = ServiceSet::defaults();
  FitConfig fit;
  MobilityOptions mobility;
  /// UTC [start, end) hours.
  std::optional<std::pair<int, int>> time_of_day;
  PolicyConfig policy;
  SweepConfig sweep;
  double train_fraction = 3.0 / 7.0;
  /// Replay start network; by default the one with the higher training
  /// weighted confidence.
  std::optional<NetworkId> initial_network;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
Config config_from_json(const Json& json);
Json encode(const Config& config);
/// IoError when unreadable; ConfigError otherwise.
Config load_config(const std::filesystem::path& path);

}  // namespace adaptivefog

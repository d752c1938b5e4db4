#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptivefog/trace_model.hpp"

namespace adaptivefog {

enum class RegionClass : std::uint8_t { Fixed, UrbanDrive, OpenRoad, Parking, HandoverZone };

std::string_view to_string(RegionClass region) noexcept;
std::optional<RegionClass> parse_region(std::string_view text) noexcept;

/// Lognormal component parameterised by its own mean and standard deviation.
/// A zero spread is a point mass at `mean_ms`.
struct MixtureComponent {
  double mean_ms = 0.0;
  double spread_ms = 0.0;
  double weight = 0.0;

  friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

/// Lognormal mixture plus an optional Pareto-II (Lomax) excess: with
/// probability tail_weight the draw gets tail_scale_ms * (U^(-1/alpha) - 1)
/// added, alpha being tail_exponent.
struct LatencyMixture {
  std::vector<MixtureComponent> components;
  double tail_weight = 0.0;
  double tail_scale_ms = 0.0;
  double tail_exponent = 2.5;

  friend bool operator==(const LatencyMixture&, const LatencyMixture&) = default;
};

struct MixtureEntry {
  NetworkId network = 0;
  Server server = Server::Fog;
  RegionClass region = RegionClass::Fixed;
  LatencyMixture mixture;

  friend bool operator==(const MixtureEntry&, const MixtureEntry&) = default;
};

/// Axis-aligned rectangle in local metres from the scenario origin,
/// half-open on the max side. Where zones overlap the first listed wins.
struct Zone {
  RegionClass region = RegionClass::Fixed;
  double min_east_m = 0.0;
  double min_north_m = 0.0;
  double max_east_m = 0.0;
  double max_north_m = 0.0;

  bool contains(double east_m, double north_m) const noexcept {
    return east_m >= min_east_m && east_m < max_east_m && north_m >= min_north_m &&
           north_m < max_north_m;
  }
  friend bool operator==(const Zone&, const Zone&) = default;
};

/// `speed_mps` is the speed on the leg that leaves this waypoint.
struct Waypoint {
  double east_m = 0.0;
  double north_m = 0.0;
  double speed_mps = 0.0;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct ScenarioSpec {
  std::string name;
  std::string description;
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  std::vector<MixtureEntry> mixtures;
  std::vector<Zone> zones;
  /// One waypoint means a parked vehicle. A closed route drives back to the
  /// first waypoint; every lap (or run to the end when open) is one session.
  std::vector<Waypoint> route;
  bool closed_route = true;
  /// Session length when the route has no length (parked).
  std::int64_t session_ticks = 7200;
  std::int64_t tick_ms = 500;
  std::int64_t session_gap_ms = 3600000;
  std::int64_t start_time_ms = 1546336800000;  // 2019-01-01T10:00:00Z
  /// Reported speed jitter (standard deviation, m/s) around the leg speed.
  double speed_jitter_mps = 0.2;
  double min_rtt_ms = 5.0;
  std::uint64_t seed = 1;

  /// Throws SpecError on an empty route, mixtures whose weights do not sum
  /// to 1 (1e-9) or have non-positive means, zones that leave part of the
  /// route uncovered, or a (network, server, region) combination the route
  /// needs but no mixture provides.
  void validate() const;
  /// Sorted distinct (network, server) pairs; one row is emitted per pair
  /// and tick.
  std::vector<std::pair<NetworkId, Server>> streams() const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Simulates the route in `tick_ms` steps and emits n_samples rows, every
/// stream at every tick. Extra jitter N(0, 2 (v - 10)) ms is added above
/// 10 m/s. Deterministic in (spec, n_samples). Throws SpecError for
/// n_samples < 1 or an invalid spec.
std::vector<RttSample> generate(const ScenarioSpec& spec, std::int64_t n_samples);

/// Region class at a local point, or nullopt outside every zone.
std::optional<RegionClass> region_at(const ScenarioSpec& spec, double east_m, double north_m);

/// fixed-lab, city-drive-2mno, parking-garage, handover-corridor.
std::map<std::string, ScenarioSpec> preset_scenarios();
/// Throws SpecError for an unknown name.
ScenarioSpec preset(std::string_view name);

}  // namespace adaptivefog

#include <cmath>
#include <functional>

#include "adaptivefog/synth.hpp"

namespace adaptivefog {

namespace {

constexpr double kTucsonLat = 32.2319;
constexpr double kTucsonLon = -110.9501;

LatencyMixture mix(std::vector<MixtureComponent> comps, double tail_weight = 0.0,
                   double tail_scale = 0.0, double tail_exponent = 2.5) {
  return {std::move(comps), tail_weight, tail_scale, tail_exponent};
}

// Every component moved by `ms`; spreads optionally scaled.
LatencyMixture shifted(LatencyMixture m, double ms, double spread_factor = 1.0) {
  for (auto& c : m.components) {
    c.mean_ms += ms;
    c.spread_ms *= spread_factor;
  }
  return m;
}

// Cloud sits behind the fog node: a fixed extra delay with less spread.
LatencyMixture cloud_of(const LatencyMixture& fog, double ms) { return shifted(fog, ms, 0.7); }

void add(ScenarioSpec& s, NetworkId net, RegionClass region, const LatencyMixture& fog,
         double cloud_offset_ms) {
  s.mixtures.push_back({net, Server::Fog, region, fog});
  s.mixtures.push_back({net, Server::Cloud, region, cloud_of(fog, cloud_offset_ms)});
}

// Walks the polyline in 1 m steps and starts a new waypoint wherever the
// region changes, so each leg carries its region's speed.
std::vector<Waypoint> route_through(const ScenarioSpec& s, const std::vector<LocalOffset>& corners,
                                    const std::function<double(RegionClass)>& speed) {
  std::vector<Waypoint> route;
  std::optional<RegionClass> current;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const LocalOffset a = corners[i];
    const LocalOffset b = corners[(i + 1) % corners.size()];
    const auto steps = static_cast<int>(std::round(std::hypot(b.east_m - a.east_m, b.north_m - a.north_m)));
    for (int k = 0; k < steps; ++k) {
      const double f = static_cast<double>(k) / steps;
      const double e = a.east_m + f * (b.east_m - a.east_m);
      const double n = a.north_m + f * (b.north_m - a.north_m);
      const auto region = region_at(s, e, n);
      if (k == 0 || region != current) {
        route.push_back({e, n, speed(region.value_or(RegionClass::OpenRoad))});
        current = region;
      }
    }
  }
  return route;
}

ScenarioSpec fixed_lab() {
  ScenarioSpec s;
  s.name = "fixed-lab";
  s.description =
      "Parked UE next to the fog node. Fog RTT is dual-modal with peaks near 54 and 87 ms; "
      "cloud adds about 12 ms with lower spread. Targets: network 0 fog modes 54 +- 5 and "
      "87 +- 5 ms, cloud - fog mean 12 +- 3 ms.";
  s.origin_lat = kTucsonLat;
  s.origin_lon = kTucsonLon;
  s.seed = 20190101;
  s.zones = {{RegionClass::Fixed, 0, 0, 100, 100}};
  s.route = {{50, 50, 0}};
  s.session_ticks = 7200;
  add(s, 0, RegionClass::Fixed, mix({{54, 6, 0.72}, {87, 9, 0.28}}, 0.01, 40, 2.5), 12);
  add(s, 1, RegionClass::Fixed, mix({{66, 8, 0.6}, {80, 10, 0.4}}, 0.02, 40, 2.5), 15);
  return s;
}

ScenarioSpec city_drive() {
  ScenarioSpec s;
  s.name = "city-drive-2mno";
  s.description =
      "3 km x 1 km loop through alternating 500 m urban and open-road stripes with a handover "
      "stretch on the west side. Network 0 is strong downtown, network 1 on open road. "
      "Target: network 0 fog over the whole drive has mean 88 +- 3, STD 34 +- 5, median "
      "85 +- 3 and 90th percentile 120 +- 5 ms.";
  s.origin_lat = kTucsonLat;
  s.origin_lon = kTucsonLon;
  s.seed = 20190102;

  // Special zones first: they override the stripe underneath.
  s.zones.push_back({RegionClass::HandoverZone, 0, 300, 100, 800});
  s.zones.push_back({RegionClass::OpenRoad, 3000, 0, 3100, 1100});
  for (int i = 0; i < 6; ++i) {
    const auto region = i % 2 == 0 ? RegionClass::UrbanDrive : RegionClass::OpenRoad;
    s.zones.push_back({region, 500.0 * i, 0, 500.0 * (i + 1), 1100});
  }

  // Network 0: dual-modal downtown, one wide mode on open road. The cell-edge
  // stretch sits downtown so it hurts both networks alike.
  const auto n0_tail = [](LatencyMixture m) {
    m.tail_weight = 0.062;
    m.tail_scale_ms = 246.9;
    m.tail_exponent = 5.0;
    return m;
  };
  const LatencyMixture n0_urban = n0_tail(mix({{54.05, 4.16, 0.438}, {82.14, 6.32, 0.562}}));
  const LatencyMixture n0_open = n0_tail(mix({{101.22, 7.79, 0.55}, {111.34, 8.57, 0.45}}));
  add(s, 0, RegionClass::UrbanDrive, n0_urban, 12);
  add(s, 0, RegionClass::OpenRoad, n0_open, 12);
  add(s, 0, RegionClass::HandoverZone, shifted(n0_urban, 40), 12);

  const LatencyMixture n1_urban = mix({{72, 14, 0.4}, {128, 25, 0.6}}, 0.15, 110, 3.5);
  const LatencyMixture n1_open = mix({{60, 9, 0.7}, {92, 14, 0.3}}, 0.05, 110, 3.5);
  add(s, 1, RegionClass::UrbanDrive, n1_urban, 15);
  add(s, 1, RegionClass::OpenRoad, n1_open, 15);
  add(s, 1, RegionClass::HandoverZone, shifted(n1_urban, 40), 15);

  s.speed_jitter_mps = 0.15;
  s.route = route_through(s, {{50, 50}, {3050, 50}, {3050, 1050}, {50, 1050}}, [](RegionClass r) {
    switch (r) {
      case RegionClass::UrbanDrive: return 7.0;
      case RegionClass::HandoverZone: return 12.0;
      default: return 15.0;
    }
  });
  return s;
}

ScenarioSpec parking_garage() {
  ScenarioSpec s;
  s.name = "parking-garage";
  s.description =
      "Parked inside a garage: both networks degrade and grow a heavier tail. Targets: "
      "network 0 fog mean 97 +- 3 and median 92 +- 3 ms, cloud - fog mean 12 +- 3 ms.";
  s.origin_lat = kTucsonLat;
  s.origin_lon = kTucsonLon;
  s.seed = 20190103;
  s.zones = {{RegionClass::Parking, 0, 0, 100, 100}};
  s.route = {{50, 50, 0}};
  s.session_ticks = 3600;
  add(s, 0, RegionClass::Parking, mix({{78, 14, 0.55}, {112, 20, 0.45}}, 0.08, 60, 2.2), 12);
  add(s, 1, RegionClass::Parking, mix({{90, 16, 0.6}, {125, 22, 0.4}}, 0.1, 60, 2.2), 15);
  return s;
}

ScenarioSpec handover_corridor() {
  ScenarioSpec s;
  s.name = "handover-corridor";
  s.description =
      "2 km straight road at 12 m/s crossing a 400 m cell-edge stretch where RTT rises by "
      "about 40 ms (target 40 +- 5 ms over the neighbouring open road).";
  s.origin_lat = kTucsonLat;
  s.origin_lon = kTucsonLon;
  s.seed = 20190104;
  s.zones = {{RegionClass::HandoverZone, 800, 0, 1200, 100}, {RegionClass::OpenRoad, 0, 0, 2100, 100}};
  const LatencyMixture n0 = mix({{70, 10, 0.6}, {100, 14, 0.4}}, 0.02, 40, 2.5);
  const LatencyMixture n1 = mix({{76, 11, 0.65}, {108, 15, 0.35}}, 0.02, 40, 2.5);
  add(s, 0, RegionClass::OpenRoad, n0, 12);
  add(s, 0, RegionClass::HandoverZone, shifted(n0, 40), 12);
  add(s, 1, RegionClass::OpenRoad, n1, 15);
  add(s, 1, RegionClass::HandoverZone, shifted(n1, 40), 15);
  s.closed_route = false;
  s.route = {{50, 50, 12}, {2050, 50, 12}};
  return s;
}

}  // namespace

std::map<std::string, ScenarioSpec> preset_scenarios() {
  std::map<std::string, ScenarioSpec> out;
  for (auto spec : {fixed_lab(), city_drive(), parking_garage(), handover_corridor()}) {
    out.emplace(spec.name, std::move(spec));
  }
  return out;
}

}  // namespace adaptivefog

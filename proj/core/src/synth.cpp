#include "adaptivefog/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "adaptivefog/errors.hpp"

namespace adaptivefog {

namespace {

constexpr std::array<std::pair<RegionClass, std::string_view>, 5> kRegionNames{{
    {RegionClass::Fixed, "fixed"},
    {RegionClass::UrbanDrive, "urban-drive"},
    {RegionClass::OpenRoad, "open-road"},
    {RegionClass::Parking, "parking"},
    {RegionClass::HandoverZone, "handover-zone"},
}};

struct Leg {
  double east0, north0, east1, north1;
  double length;
  double speed;
};

std::vector<Leg> legs_of(const ScenarioSpec& spec) {
  std::vector<Leg> legs;
  const auto& r = spec.route;
  const std::size_t count = spec.closed_route ? r.size() : r.size() - 1;
  for (std::size_t i = 0; i < count && r.size() > 1; ++i) {
    const Waypoint& a = r[i];
    const Waypoint& b = r[(i + 1) % r.size()];
    const double len = std::hypot(b.east_m - a.east_m, b.north_m - a.north_m);
    if (len > 0.0) legs.push_back({a.east_m, a.north_m, b.east_m, b.north_m, len, a.speed_mps});
  }
  return legs;
}

double round_to(double x, double scale) { return std::round(x * scale) / scale; }

void check_mixture(const LatencyMixture& m) {
  if (m.components.empty()) throw SpecError("mixture has no components");
  double total = 0.0;
  for (const auto& c : m.components) {
    if (!(c.mean_ms > 0.0) || !std::isfinite(c.mean_ms)) throw SpecError("mixture mean must be > 0");
    if (!(c.spread_ms >= 0.0) || !std::isfinite(c.spread_ms)) throw SpecError("mixture spread must be >= 0");
    if (!(c.weight >= 0.0)) throw SpecError("mixture weight must be >= 0");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw SpecError("mixture weights must sum to 1");
  if (!(m.tail_weight >= 0.0 && m.tail_weight <= 1.0)) throw SpecError("tail weight must be in [0, 1]");
  if (m.tail_weight > 0.0 && !(m.tail_scale_ms >= 0.0 && m.tail_exponent > 0.0)) {
    throw SpecError("tail needs scale >= 0 and exponent > 0");
  }
}

/// Pre-computed lognormal parameters of one mixture.
struct Sampler {
  std::vector<double> cumulative;
  std::vector<double> mu, sigma, mean;
  double tail_weight, tail_scale, inv_alpha;

  explicit Sampler(const LatencyMixture& m)
      : tail_weight(m.tail_weight),
        tail_scale(m.tail_scale_ms),
        inv_alpha(m.tail_exponent > 0.0 ? 1.0 / m.tail_exponent : 0.0) {
    double acc = 0.0;
    for (const auto& c : m.components) {
      acc += c.weight;
      cumulative.push_back(acc);
      const double s2 = std::log1p((c.spread_ms * c.spread_ms) / (c.mean_ms * c.mean_ms));
      mu.push_back(std::log(c.mean_ms) - s2 / 2.0);
      sigma.push_back(std::sqrt(s2));
      mean.push_back(c.mean_ms);
    }
  }

  // Always consumes the same number of variates so streams stay aligned.
  double draw(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double pick = unit(rng) * cumulative.back();
    const double z = normal(rng);
    const double tail_u = unit(rng);
    const double tail_v = 1.0 - unit(rng);  // (0, 1]
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
    k = std::min(k, cumulative.size() - 1);
    double x = sigma[k] == 0.0 ? mean[k] : std::exp(mu[k] + sigma[k] * z);
    if (tail_u < tail_weight) x += tail_scale * (std::pow(tail_v, -inv_alpha) - 1.0);
    return x;
  }
};

}  // namespace

std::string_view to_string(RegionClass region) noexcept {
  for (const auto& [r, name] : kRegionNames) {
    if (r == region) return name;
  }
  return "fixed";
}

std::optional<RegionClass> parse_region(std::string_view text) noexcept {
  for (const auto& [r, name] : kRegionNames) {
    if (name == text) return r;
  }
  return std::nullopt;
}

std::optional<RegionClass> region_at(const ScenarioSpec& spec, double east_m, double north_m) {
  for (const auto& z : spec.zones) {
    if (z.contains(east_m, north_m)) return z.region;
  }
  return std::nullopt;
}

std::vector<std::pair<NetworkId, Server>> ScenarioSpec::streams() const {
  std::set<std::pair<NetworkId, Server>> s;
  for (const auto& e : mixtures) s.emplace(e.network, e.server);
  return {s.begin(), s.end()};
}

void ScenarioSpec::validate() const {
  if (route.empty()) throw SpecError("scenario route is empty");
  if (mixtures.empty()) throw SpecError("scenario has no mixtures");
  if (tick_ms <= 0) throw SpecError("tick_ms must be > 0");
  if (session_gap_ms <= tick_ms) throw SpecError("session gap must exceed one tick");
  if (!(speed_jitter_mps >= 0.0) || !(min_rtt_ms > 0.0)) throw SpecError("bad jitter or min rtt");
  std::set<std::tuple<NetworkId, Server, RegionClass>> seen;
  for (const auto& e : mixtures) {
    check_mixture(e.mixture);
    if (!seen.emplace(e.network, e.server, e.region).second) {
      throw SpecError("duplicate mixture for a (network, server, region)");
    }
  }
  for (const auto& z : zones) {
    if (!(z.max_east_m > z.min_east_m && z.max_north_m > z.min_north_m)) {
      throw SpecError("zone rectangle is empty");
    }
  }
  for (const auto& w : route) {
    if (!(w.speed_mps >= 0.0) || !std::isfinite(w.east_m) || !std::isfinite(w.north_m)) {
      throw SpecError("bad waypoint");
    }
  }

  const auto needed = streams();
  auto check_point = [&](double e, double n) {
    const auto region = region_at(*this, e, n);
    if (!region) throw SpecError("zones do not cover the route");
    for (const auto& [net, server] : needed) {
      if (!seen.count({net, server, *region})) {
        throw SpecError("no mixture for network " + std::to_string(net) + "/" +
                        std::string(to_string(server)) + " in region " +
                        std::string(to_string(*region)));
      }
    }
  };
  const auto legs = legs_of(*this);
  if (legs.empty()) {
    if (session_ticks <= 0) throw SpecError("parked scenario needs session_ticks > 0");
    check_point(route.front().east_m, route.front().north_m);
    return;
  }
  for (const auto& leg : legs) {
    if (!(leg.speed > 0.0)) throw SpecError("moving leg needs speed > 0");
    const auto steps = static_cast<long>(std::ceil(leg.length));
    for (long i = 0; i <= steps; ++i) {
      const double f = std::min(1.0, static_cast<double>(i) / static_cast<double>(steps));
      check_point(leg.east0 + f * (leg.east1 - leg.east0), leg.north0 + f * (leg.north1 - leg.north0));
    }
  }
}

std::vector<RttSample> generate(const ScenarioSpec& spec, std::int64_t n_samples) {
  if (n_samples < 1) throw SpecError("n_samples must be >= 1");
  spec.validate();

  const auto streams = spec.streams();
  // sampler index per (stream, region)
  std::vector<std::array<int, kRegionNames.size()>> table(streams.size());
  std::vector<Sampler> samplers;
  for (auto& row : table) row.fill(-1);
  for (const auto& e : spec.mixtures) {
    const auto s = static_cast<std::size_t>(
        std::lower_bound(streams.begin(), streams.end(), std::pair{e.network, e.server}) -
        streams.begin());
    table[s][static_cast<std::size_t>(e.region)] = static_cast<int>(samplers.size());
    samplers.emplace_back(e.mixture);
  }

  GridSpec frame;
  frame.origin_lat = spec.origin_lat;
  frame.origin_lon = spec.origin_lon;

  const auto legs = legs_of(spec);
  double lap_length = 0.0;
  for (const auto& l : legs) lap_length += l.length;
  const double tick_s = static_cast<double>(spec.tick_ms) / 1000.0;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<RttSample> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  std::int64_t now = spec.start_time_ms;
  double travelled = 0.0;  // distance into the current lap
  std::int64_t session_tick = 0;

  while (static_cast<std::int64_t>(out.size()) < n_samples) {
    double east = spec.route.front().east_m;
    double north = spec.route.front().north_m;
    double leg_speed = spec.route.front().speed_mps;
    if (!legs.empty()) {
      double s = travelled;
      std::size_t i = 0;
      while (i + 1 < legs.size() && s >= legs[i].length) s -= legs[i++].length;
      const Leg& leg = legs[i];
      const double f = std::clamp(s / leg.length, 0.0, 1.0);
      east = leg.east0 + f * (leg.east1 - leg.east0);
      north = leg.north0 + f * (leg.north1 - leg.north0);
      leg_speed = leg.speed;
    }
    const auto region = region_at(spec, east, north);
    if (!region) throw SpecError("zones do not cover the route");

    double speed = leg_speed;
    if (leg_speed > 0.0) speed = std::max(0.0, leg_speed + spec.speed_jitter_mps * normal(rng));
    speed = round_to(speed, 1e3);
    const auto [lat, lon] = unproject(frame, {east, north});

    for (std::size_t s = 0; s < streams.size() && static_cast<std::int64_t>(out.size()) < n_samples; ++s) {
      const int idx = table[s][static_cast<std::size_t>(*region)];
      double rtt = samplers[static_cast<std::size_t>(idx)].draw(rng);
      const double noise = normal(rng);
      if (speed > 10.0) rtt += 2.0 * (speed - 10.0) * noise;
      rtt = round_to(std::max(rtt, spec.min_rtt_ms), 1e3);
      out.push_back({now, round_to(lat, 1e7), round_to(lon, 1e7), speed, streams[s].first,
                     streams[s].second, rtt});
    }

    ++session_tick;
    travelled += leg_speed * tick_s;
    const bool lap_done = legs.empty() ? session_tick >= spec.session_ticks : travelled >= lap_length;
    if (lap_done) {
      travelled = 0.0;
      session_tick = 0;
      now += spec.session_gap_ms;
    } else {
      now += spec.tick_ms;
    }
  }
  return out;
}

ScenarioSpec preset(std::string_view name) {
  auto all = preset_scenarios();
  if (auto it = all.find(std::string(name)); it != all.end()) return it->second;
  throw SpecError("unknown preset '" + std::string(name) + "'");
}

}  // namespace adaptivefog

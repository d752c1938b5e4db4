#include "adaptivefog/config.hpp"

#include <set>
#include <string>

#include "adaptivefog/errors.hpp"

namespace adaptivefog {

namespace {

void only_keys(const Json& j, std::string_view section, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ConfigError(std::string(section) + " must be an object");
  const std::set<std::string_view> allowed(keys);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(section));
    }
  }
}

template <typename T>
void read(const Json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

Config config_from_json(const Json& j) {
  Config c;
  try {
    only_keys(j, "config", {"grid", "services", "fit", "mobility", "policy", "sweep", "train_fraction",
                            "initial_network"});
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      only_keys(g, "grid", {"origin_lat", "origin_lon", "cell_size_m", "speed_bin_edges", "max_offset_deg"});
      if (g.contains("origin_lat") != g.contains("origin_lon")) {
        throw ConfigError("grid origin needs both origin_lat and origin_lon");
      }
      c.grid_origin_set = g.contains("origin_lat");
      read(g, "origin_lat", c.grid.origin_lat);
      read(g, "origin_lon", c.grid.origin_lon);
      read(g, "cell_size_m", c.grid.cell_size_m);
      read(g, "speed_bin_edges", c.grid.speed_bin_edges);
      read(g, "max_offset_deg", c.grid.max_offset_deg);
      c.grid.validate();
    }
    if (j.contains("services")) {
      try {
        c.services = decode<ServiceSet>(j.at("services"));
      } catch (const FormatError& e) {
        throw ConfigError(e.what());
      }
    }
    if (j.contains("fit")) {
      const auto& f = j.at("fit");
      only_keys(f, "fit", {"min_samples", "exact"});
      read(f, "min_samples", c.fit.min_samples);
      read(f, "exact", c.fit.exact);
      if (c.fit.min_samples == 0) throw ConfigError("fit.min_samples must be >= 1");
    }
    if (j.contains("mobility")) {
      const auto& m = j.at("mobility");
      only_keys(m, "mobility", {"slot_ms", "smoothing_alpha", "session_gap_s", "time_of_day"});
      read(m, "slot_ms", c.mobility.slot_ms);
      read(m, "smoothing_alpha", c.mobility.smoothing_alpha);
      if (m.contains("session_gap_s")) {
        c.mobility.session_gap_ms = static_cast<std::int64_t>(m.at("session_gap_s").get<double>() * 1000.0);
      }
      if (m.contains("time_of_day")) {
        const auto hours = m.at("time_of_day").get<std::vector<int>>();
        if (hours.size() != 2 || hours[0] < 0 || hours[0] > 23 || hours[1] < 0 || hours[1] > 24) {
          throw ConfigError("mobility.time_of_day must be [start_hour, end_hour]");
        }
        c.time_of_day = std::pair{hours[0], hours[1]};
      }
      c.mobility.validate();
    }
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      only_keys(p, "policy", {"server", "discount", "horizon_slots", "switch_cost", "theta_f", "tolerance",
                              "max_iterations", "method"});
      if (p.contains("server")) {
        const auto s = parse_server(p.at("server").get<std::string>());
        if (!s) throw ConfigError("policy.server must be 'fog' or 'cloud'");
        c.policy.server = *s;
      }
      read(p, "discount", c.policy.discount);
      read(p, "horizon_slots", c.policy.horizon_slots);
      read(p, "theta_f", c.policy.theta_f);
      read(p, "tolerance", c.policy.solver.tolerance);
      read(p, "max_iterations", c.policy.solver.max_iterations);
      if (p.contains("method")) {
        const auto m = p.at("method").get<std::string>();
        if (m == "value-iteration") {
          c.policy.solver.method = InfiniteOptions::Method::ValueIteration;
        } else if (m == "delta-fixed-point") {
          c.policy.solver.method = InfiniteOptions::Method::DeltaFixedPoint;
        } else {
          throw ConfigError("policy.method must be 'value-iteration' or 'delta-fixed-point'");
        }
      }
      if (p.contains("switch_cost")) {
        only_keys(p.at("switch_cost"), "policy.switch_cost", {"mode", "value"});
        try {
          c.policy.cost = decode<SwitchCost>(p.at("switch_cost"));
        } catch (const FormatError& e) {
          throw ConfigError(e.what());
        }
      }
      if (!(c.policy.discount > 0.0 && c.policy.discount < 1.0)) {
        throw ConfigError("policy.discount must be in (0, 1)");
      }
      if (c.policy.horizon_slots < 1) throw ConfigError("policy.horizon_slots must be >= 1");
      if (!(c.policy.theta_f >= 0.0)) throw ConfigError("policy.theta_f must be >= 0");
      if (!(c.policy.cost.value >= 0.0)) throw ConfigError("switch cost must be >= 0");
      if (!(c.policy.solver.tolerance > 0.0) || c.policy.solver.max_iterations < 1) {
        throw ConfigError("solver tolerance and max_iterations must be positive");
      }
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      only_keys(s, "sweep", {"points", "max_cost", "costs"});
      read(s, "points", c.sweep.points);
      if (s.contains("max_cost")) c.sweep.max_cost = s.at("max_cost").get<double>();
      read(s, "costs", c.sweep.costs);
      if (c.sweep.points < 1) throw ConfigError("sweep.points must be >= 1");
    }
    read(j, "train_fraction", c.train_fraction);
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
      throw ConfigError("train_fraction must be in (0, 1)");
    }
    if (j.contains("initial_network")) {
      c.initial_network = j.at("initial_network").get<NetworkId>();
      if (*c.initial_network > 1) throw ConfigError("initial_network must be 0 or 1");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Json encode(const Config& c) {
  Json grid = encode(c.grid);
  if (!c.grid_origin_set) {
    grid.erase("origin_lat");
    grid.erase("origin_lon");
  }
  Json mobility{{"slot_ms", c.mobility.slot_ms},
                {"smoothing_alpha", c.mobility.smoothing_alpha},
                {"session_gap_s", static_cast<double>(c.mobility.session_gap_ms) / 1000.0}};
  if (c.time_of_day) mobility["time_of_day"] = {c.time_of_day->first, c.time_of_day->second};
  Json j{{"grid", grid},
         {"services", encode(c.services)},
         {"fit", {{"min_samples", c.fit.min_samples}, {"exact", c.fit.exact}}},
         {"mobility", mobility},
         {"policy",
          {{"server", to_string(c.policy.server)},
           {"discount", c.policy.discount},
           {"horizon_slots", c.policy.horizon_slots},
           {"switch_cost", encode(c.policy.cost)},
           {"theta_f", c.policy.theta_f},
           {"tolerance", c.policy.solver.tolerance},
           {"max_iterations", c.policy.solver.max_iterations},
           {"method", c.policy.solver.method == InfiniteOptions::Method::ValueIteration
                          ? "value-iteration"
                          : "delta-fixed-point"}}},
         {"sweep", {{"points", c.sweep.points}, {"costs", c.sweep.costs}}},
         {"train_fraction", c.train_fraction}};
  if (c.sweep.max_cost) j["sweep"]["max_cost"] = *c.sweep.max_cost;
  if (c.initial_network) j["initial_network"] = *c.initial_network;
  return j;
}

Config load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j);
}

}  // namespace adaptivefog

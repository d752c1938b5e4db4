#include "adaptivefog/serialization.hpp"

#include <fstream>
#include <sstream>

#include "adaptivefog/errors.hpp"

namespace adaptivefog {

namespace {

Json tagged(std::string_view kind) { return Json{{"format", kind}, {"version", kFormatVersion}}; }

void expect_kind(const Json& j, std::string_view kind) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != kind) {
    throw FormatError("expected a '" + std::string(kind) + "' document");
  }
  if (j.at("version").get<int>() != kFormatVersion) {
    throw FormatError("unsupported " + std::string(kind) + " version " + j.at("version").dump());
  }
}

// Runs a decoder, turning JSON access errors and invariant violations into
// FormatError.
template <typename F>
auto guarded(std::string_view what, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const FormatError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed " + std::string(what) + ": " + e.what());
  } catch (const DomainError& e) {
    throw FormatError("invalid " + std::string(what) + ": " + e.what());
  }
}

Server server_of(const Json& j) {
  const auto s = parse_server(j.get<std::string>());
  if (!s) throw FormatError("unknown server '" + j.get<std::string>() + "'");
  return *s;
}

Json pair_json(const NetworkPair& p) { return Json::array({p[0], p[1]}); }
NetworkPair pair_of(const Json& j) {
  if (j.size() != kNetworkCount) throw FormatError("expected a pair of values");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Json pairs_json(const std::vector<NetworkPair>& v) {
  Json a = Json::array();
  for (const auto& p : v) a.push_back(pair_json(p));
  return a;
}
std::vector<NetworkPair> pairs_of(const Json& j) {
  std::vector<NetworkPair> out;
  for (const auto& p : j) out.push_back(pair_of(p));
  return out;
}

Json layers_json(const std::vector<std::vector<NetworkPair>>& v) {
  Json a = Json::array();
  for (const auto& layer : v) a.push_back(pairs_json(layer));
  return a;
}
std::vector<std::vector<NetworkPair>> layers_of(const Json& j) {
  std::vector<std::vector<NetworkPair>> out;
  for (const auto& layer : j) out.push_back(pairs_of(layer));
  return out;
}

Json key_json(const MobilityKey& k) { return Json::array({k.cell.x, k.cell.y, k.speed_bin}); }
MobilityKey key_of(const Json& j) {
  if (j.size() != 3) throw FormatError("mobility state must be [x, y, speed_bin]");
  return {{j.at(0).get<std::int32_t>(), j.at(1).get<std::int32_t>()}, j.at(2).get<std::int32_t>()};
}

Json cdf_json(const LatencyModel::Entry& e, bool exact) {
  Json j{{"count", e.sample_count}};
  const auto values = e.cdf.values();
  if (exact || values.size() <= kSketchPoints) {
    j["samples"] = std::vector<double>(values.begin(), values.end());
  } else {
    std::vector<double> q;
    q.reserve(kSketchPoints);
    for (std::size_t i = 0; i < kSketchPoints; ++i) {
      q.push_back(interpolated_quantile(values, static_cast<double>(i) / (kSketchPoints - 1)));
    }
    j["quantiles"] = std::move(q);
  }
  return j;
}

LatencyModel::Entry entry_of(const Json& j) {
  LatencyModel::Entry e;
  e.sample_count = j.at("count").get<std::size_t>();
  if (j.contains("samples")) {
    e.cdf = EmpiricalCdf(j.at("samples").get<std::vector<double>>());
    if (e.cdf.sample_count() != e.sample_count) throw FormatError("sample count mismatch");
  } else {
    e.cdf = EmpiricalCdf(j.at("quantiles").get<std::vector<double>>());
  }
  return e;
}

Json stats_json(const LatencyStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"stddev", s.stddev}, {"median", s.median}, {"p90", s.p90}};
}
LatencyStats stats_of(const Json& j) {
  return {j.at("count").get<std::size_t>(), j.at("mean").get<double>(), j.at("stddev").get<double>(),
          j.at("median").get<double>(), j.at("p90").get<double>()};
}

Json mixture_json(const LatencyMixture& m) {
  Json comps = Json::array();
  for (const auto& c : m.components) {
    comps.push_back({{"mean_ms", c.mean_ms}, {"spread_ms", c.spread_ms}, {"weight", c.weight}});
  }
  return {{"components", comps},
          {"tail_weight", m.tail_weight},
          {"tail_scale_ms", m.tail_scale_ms},
          {"tail_exponent", m.tail_exponent}};
}
LatencyMixture mixture_of(const Json& j) {
  LatencyMixture m;
  for (const auto& c : j.at("components")) {
    m.components.push_back(
        {c.at("mean_ms").get<double>(), c.at("spread_ms").get<double>(), c.at("weight").get<double>()});
  }
  m.tail_weight = j.value("tail_weight", 0.0);
  m.tail_scale_ms = j.value("tail_scale_ms", 0.0);
  m.tail_exponent = j.value("tail_exponent", 2.5);
  return m;
}

RegionClass region_of(const Json& j) {
  const auto r = parse_region(j.get<std::string>());
  if (!r) throw FormatError("unknown region class '" + j.get<std::string>() + "'");
  return *r;
}

}  // namespace

Json encode(const GridSpec& g) {
  return {{"origin_lat", g.origin_lat},       {"origin_lon", g.origin_lon},
          {"cell_size_m", g.cell_size_m},     {"speed_bin_edges", g.speed_bin_edges},
          {"max_offset_deg", g.max_offset_deg}};
}

template <>
GridSpec decode<GridSpec>(const Json& j) {
  return guarded("grid", [&] {
    GridSpec g;
    g.origin_lat = j.at("origin_lat").get<double>();
    g.origin_lon = j.at("origin_lon").get<double>();
    g.cell_size_m = j.value("cell_size_m", g.cell_size_m);
    g.speed_bin_edges = j.value("speed_bin_edges", g.speed_bin_edges);
    g.max_offset_deg = j.value("max_offset_deg", g.max_offset_deg);
    return g;
  });
}

Json encode(const ServiceSet& services) {
  Json a = Json::array();
  for (const auto& s : services) {
    a.push_back({{"id", s.id}, {"max_latency_ms", s.max_latency_ms}, {"weight", s.weight}});
  }
  return a;
}

template <>
ServiceSet decode<ServiceSet>(const Json& j) {
  return guarded("services", [&] {
    if (!j.is_array()) throw FormatError("services must be an array");
    std::vector<ServiceClass> v;
    for (const auto& s : j) {
      v.push_back({s.at("id").get<int>(), s.at("max_latency_ms").get<double>(), s.at("weight").get<double>()});
    }
    return ServiceSet(std::move(v));
  });
}

Json encode(const SwitchCost& c) {
  return {{"mode", c.mode == SwitchCost::Mode::Scalar ? "scalar" : "cdf-shift"}, {"value", c.value}};
}

template <>
SwitchCost decode<SwitchCost>(const Json& j) {
  return guarded("switch cost", [&] {
    const auto mode = j.value("mode", std::string("scalar"));
    SwitchCost c;
    if (mode == "scalar") {
      c.mode = SwitchCost::Mode::Scalar;
    } else if (mode == "cdf-shift") {
      c.mode = SwitchCost::Mode::CdfShift;
    } else {
      throw FormatError("switch cost mode must be 'scalar' or 'cdf-shift'");
    }
    c.value = j.at("value").get<double>();
    return c;
  });
}

Json encode(const LatencyModel& model, bool exact) {
  Json j = tagged("latency_model");
  j["grid"] = encode(model.grid());
  j["min_samples"] = model.min_samples();
  j["exact"] = exact;
  Json direct = Json::array();
  for (const auto& [k, e] : model.direct_entries()) {
    Json item = cdf_json(e, exact);
    item["cell"] = {k.state.cell.x, k.state.cell.y};
    item["speed_bin"] = k.state.speed_bin;
    item["network"] = k.state.network;
    item["server"] = to_string(k.server);
    direct.push_back(std::move(item));
  }
  Json cells = Json::array();
  for (const auto& [k, e] : model.cell_pools()) {
    Json item = cdf_json(e, exact);
    item["cell"] = {k.cell.x, k.cell.y};
    item["network"] = k.network;
    item["server"] = to_string(k.server);
    cells.push_back(std::move(item));
  }
  Json networks = Json::array();
  for (const auto& [k, e] : model.network_pools()) {
    Json item = cdf_json(e, exact);
    item["network"] = k.network;
    item["server"] = to_string(k.server);
    networks.push_back(std::move(item));
  }
  j["direct"] = std::move(direct);
  j["cell_pools"] = std::move(cells);
  j["network_pools"] = std::move(networks);
  return j;
}

template <>
LatencyModel decode<LatencyModel>(const Json& j) {
  return guarded("latency model", [&] {
    expect_kind(j, "latency_model");
    std::map<StateServerKey, LatencyModel::Entry> direct;
    std::map<CellPoolKey, LatencyModel::Entry> cells;
    std::map<NetworkPoolKey, LatencyModel::Entry> networks;
    const auto cell = [](const Json& c) {
      return Cell{c.at(0).get<std::int32_t>(), c.at(1).get<std::int32_t>()};
    };
    for (const auto& item : j.at("direct")) {
      const StateServerKey key{
          {cell(item.at("cell")), item.at("speed_bin").get<std::int32_t>(), item.at("network").get<NetworkId>()},
          server_of(item.at("server"))};
      direct.emplace(key, entry_of(item));
    }
    for (const auto& item : j.at("cell_pools")) {
      cells.emplace(CellPoolKey{cell(item.at("cell")), item.at("network").get<NetworkId>(),
                                server_of(item.at("server"))},
                    entry_of(item));
    }
    for (const auto& item : j.at("network_pools")) {
      networks.emplace(NetworkPoolKey{item.at("network").get<NetworkId>(), server_of(item.at("server"))},
                       entry_of(item));
    }
    return LatencyModel(decode<GridSpec>(j.at("grid")), j.at("min_samples").get<std::size_t>(),
                        std::move(direct), std::move(cells), std::move(networks));
  });
}

Json encode(const MobilityModel& model) {
  Json j = tagged("mobility_model");
  j["slot_ms"] = model.slot_ms();
  Json states = Json::array();
  for (const auto& k : model.states()) states.push_back(key_json(k));
  j["states"] = std::move(states);
  Json rows = Json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto row = model.row(i);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["transitions"] = std::move(rows);
  return j;
}

template <>
MobilityModel decode<MobilityModel>(const Json& j) {
  return guarded("mobility model", [&] {
    expect_kind(j, "mobility_model");
    std::vector<MobilityKey> states;
    for (const auto& k : j.at("states")) states.push_back(key_of(k));
    std::vector<double> flat;
    for (const auto& row : j.at("transitions")) {
      if (row.size() != states.size()) throw FormatError("transition row length mismatch");
      for (const auto& p : row) flat.push_back(p.get<double>());
    }
    return MobilityModel(std::move(states), std::move(flat), j.at("slot_ms").get<std::int64_t>());
  });
}

Json encode(const SwitchPolicy& p) {
  Json j = tagged("switch_policy");
  j["kind"] = p.kind == PolicyKind::Finite ? "finite" : "stationary";
  Json states = Json::array();
  for (const auto& k : p.states) states.push_back(key_json(k));
  j["states"] = std::move(states);
  Json actions = Json::array();
  for (const auto& layer : p.actions) {
    Json l = Json::array();
    for (const auto& a : layer) l.push_back({a[0], a[1]});
    actions.push_back(std::move(l));
  }
  j["actions"] = std::move(actions);
  j["delta"] = layers_json(p.delta);
  j["y"] = layers_json(p.y);
  j["value"] = layers_json(p.value);
  j["kr"] = pairs_json(p.kr);
  j["penalty"] = pairs_json(p.penalty);
  j["discount"] = p.discount;
  j["solver"] = {{"name", p.stats.solver}, {"iterations", p.stats.iterations}, {"residual", p.stats.residual}};
  j["config"] = {{"services", encode(p.services)}, {"cost", encode(p.cost)}, {"server", to_string(p.server)}};
  return j;
}

template <>
SwitchPolicy decode<SwitchPolicy>(const Json& j) {
  return guarded("switch policy", [&] {
    expect_kind(j, "switch_policy");
    SwitchPolicy p;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "finite") {
      p.kind = PolicyKind::Finite;
    } else if (kind == "stationary") {
      p.kind = PolicyKind::Stationary;
    } else {
      throw FormatError("unknown policy kind '" + kind + "'");
    }
    for (const auto& k : j.at("states")) p.states.push_back(key_of(k));
    for (const auto& layer : j.at("actions")) {
      std::vector<std::array<std::uint8_t, kNetworkCount>> l;
      for (const auto& a : layer) {
        if (a.size() != kNetworkCount) throw FormatError("action entry must be a pair");
        l.push_back({a.at(0).get<std::uint8_t>(), a.at(1).get<std::uint8_t>()});
        if (l.back()[0] > 1 || l.back()[1] > 1) throw FormatError("actions are 0 or 1");
      }
      if (l.size() != p.states.size()) throw FormatError("action layer size mismatch");
      p.actions.push_back(std::move(l));
    }
    p.delta = layers_of(j.at("delta"));
    p.y = layers_of(j.at("y"));
    p.value = layers_of(j.at("value"));
    p.kr = pairs_of(j.at("kr"));
    p.penalty = pairs_of(j.at("penalty"));
    p.discount = j.at("discount").get<double>();
    const auto& s = j.at("solver");
    p.stats = {s.at("name").get<std::string>(), s.at("iterations").get<long>(), s.at("residual").get<double>()};
    const auto& c = j.at("config");
    p.services = decode<ServiceSet>(c.at("services"));
    p.cost = decode<SwitchCost>(c.at("cost"));
    p.server = server_of(c.at("server"));
    return p;
  });
}

Json encode(const ScenarioSpec& s) {
  Json j = tagged("scenario");
  j["name"] = s.name;
  j["description"] = s.description;
  j["origin_lat"] = s.origin_lat;
  j["origin_lon"] = s.origin_lon;
  Json mixtures = Json::array();
  for (const auto& e : s.mixtures) {
    mixtures.push_back({{"network", e.network},
                        {"server", to_string(e.server)},
                        {"region", to_string(e.region)},
                        {"mixture", mixture_json(e.mixture)}});
  }
  j["mixtures"] = std::move(mixtures);
  Json zones = Json::array();
  for (const auto& z : s.zones) {
    zones.push_back({{"region", to_string(z.region)},
                     {"min_east_m", z.min_east_m},
                     {"min_north_m", z.min_north_m},
                     {"max_east_m", z.max_east_m},
                     {"max_north_m", z.max_north_m}});
  }
  j["zones"] = std::move(zones);
  Json route = Json::array();
  for (const auto& w : s.route) {
    route.push_back({{"east_m", w.east_m}, {"north_m", w.north_m}, {"speed_mps", w.speed_mps}});
  }
  j["route"] = std::move(route);
  j["closed_route"] = s.closed_route;
  j["session_ticks"] = s.session_ticks;
  j["tick_ms"] = s.tick_ms;
  j["session_gap_ms"] = s.session_gap_ms;
  j["start_time_ms"] = s.start_time_ms;
  j["speed_jitter_mps"] = s.speed_jitter_mps;
  j["min_rtt_ms"] = s.min_rtt_ms;
  j["seed"] = s.seed;
  return j;
}

template <>
ScenarioSpec decode<ScenarioSpec>(const Json& j) {
  return guarded("scenario", [&] {
    expect_kind(j, "scenario");
    ScenarioSpec s;
    s.name = j.value("name", std::string());
    s.description = j.value("description", std::string());
    s.origin_lat = j.at("origin_lat").get<double>();
    s.origin_lon = j.at("origin_lon").get<double>();
    for (const auto& e : j.at("mixtures")) {
      s.mixtures.push_back({e.at("network").get<NetworkId>(), server_of(e.at("server")),
                            region_of(e.at("region")), mixture_of(e.at("mixture"))});
    }
    for (const auto& z : j.at("zones")) {
      s.zones.push_back({region_of(z.at("region")), z.at("min_east_m").get<double>(),
                         z.at("min_north_m").get<double>(), z.at("max_east_m").get<double>(),
                         z.at("max_north_m").get<double>()});
    }
    for (const auto& w : j.at("route")) {
      s.route.push_back({w.at("east_m").get<double>(), w.at("north_m").get<double>(),
                         w.at("speed_mps").get<double>()});
    }
    s.closed_route = j.value("closed_route", s.closed_route);
    s.session_ticks = j.value("session_ticks", s.session_ticks);
    s.tick_ms = j.value("tick_ms", s.tick_ms);
    s.session_gap_ms = j.value("session_gap_ms", s.session_gap_ms);
    s.start_time_ms = j.value("start_time_ms", s.start_time_ms);
    s.speed_jitter_mps = j.value("speed_jitter_mps", s.speed_jitter_mps);
    s.min_rtt_ms = j.value("min_rtt_ms", s.min_rtt_ms);
    s.seed = j.value("seed", s.seed);
    return s;
  });
}

Json encode(const PolicyReplay& r) {
  return {{"policy", r.policy},
          {"cost", r.cost},
          {"confidence", r.confidence},
          {"weighted_confidence", r.weighted_confidence},
          {"rtt", stats_json(r.rtt)},
          {"switches", r.switches},
          {"penalty_paid", r.penalty_paid},
          {"slots", r.slots},
          {"unseen_slots", r.unseen_slots},
          {"model_value", r.model_value ? Json(*r.model_value) : Json(nullptr)}};
}

template <>
PolicyReplay decode<PolicyReplay>(const Json& j) {
  return guarded("replay result", [&] {
    PolicyReplay r;
    r.policy = j.at("policy").get<std::string>();
    r.cost = j.at("cost").get<double>();
    r.confidence = j.at("confidence").get<std::vector<double>>();
    r.weighted_confidence = j.at("weighted_confidence").get<double>();
    r.rtt = stats_of(j.at("rtt"));
    r.switches = j.at("switches").get<long>();
    r.penalty_paid = j.at("penalty_paid").get<double>();
    r.slots = j.at("slots").get<std::size_t>();
    r.unseen_slots = j.value("unseen_slots", std::size_t{0});
    if (j.contains("model_value") && !j.at("model_value").is_null()) {
      r.model_value = j.at("model_value").get<double>();
    }
    for (double c : r.confidence) {
      if (!(c >= 0.0 && c <= 1.0)) throw FormatError("confidence outside [0, 1]");
    }
    if (r.switches < 0) throw FormatError("negative switch count");
    return r;
  });
}

Json encode(const SweepResult& r) {
  Json j = tagged("sweep_result");
  Json services = Json::array();
  for (const auto& s : r.services) {
    services.push_back({{"id", s.id}, {"max_latency_ms", s.max_latency_ms}, {"weight", s.weight}});
  }
  j["services"] = std::move(services);
  j["cost_mode"] = r.cost_mode;
  j["costs"] = r.costs;
  j["policies"] = r.policies;
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back(encode(e));
  j["entries"] = std::move(entries);
  return j;
}

template <>
SweepResult decode<SweepResult>(const Json& j) {
  return guarded("sweep result", [&] {
    expect_kind(j, "sweep_result");
    SweepResult r;
    const ServiceSet services = decode<ServiceSet>(j.at("services"));
    r.services.assign(services.begin(), services.end());
    r.cost_mode = j.at("cost_mode").get<std::string>();
    r.costs = j.at("costs").get<std::vector<double>>();
    r.policies = j.at("policies").get<std::vector<std::string>>();
    for (const auto& e : j.at("entries")) r.entries.push_back(decode<PolicyReplay>(e));
    if (r.entries.size() != r.costs.size() * r.policies.size()) {
      throw FormatError("sweep result needs one entry per cost and policy");
    }
    for (const auto& e : r.entries) {
      if (e.confidence.size() != r.services.size()) throw FormatError("confidence per service mismatch");
    }
    return r;
  });
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << json.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace adaptivefog

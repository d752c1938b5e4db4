#include "adaptivefog/latency_model.hpp"

#include "adaptivefog/errors.hpp"

namespace adaptivefog {

std::string_view to_string(FallbackLevel level) noexcept {
  switch (level) {
    case FallbackLevel::Direct:
      return "direct";
    case FallbackLevel::CellPool:
      return "cell";
    case FallbackLevel::NetworkPool:
      return "network";
  }
  return "direct";
}

LatencyModel::LatencyModel(GridSpec grid, std::size_t min_samples,
                           std::map<StateServerKey, Entry> direct,
                           std::map<CellPoolKey, Entry> cell_pools,
                           std::map<NetworkPoolKey, Entry> network_pools)
    : grid_(std::move(grid)),
      min_samples_(min_samples),
      direct_(std::move(direct)),
      cell_pools_(std::move(cell_pools)),
      network_pools_(std::move(network_pools)) {
  grid_.validate();
  if (min_samples_ == 0) throw ConfigError("min_samples must be >= 1");
  auto check = [&](const Entry& e) {
    if (e.cdf.empty() || e.sample_count < min_samples_) {
      throw ModelError("latency model entry below min_samples");
    }
  };
  for (const auto& [k, e] : direct_) check(e);
  for (const auto& [k, e] : cell_pools_) check(e);
  for (const auto& [k, e] : network_pools_) check(e);
}

LatencyModel::Lookup LatencyModel::try_lookup(const DiscreteState& state,
                                              Server server) const noexcept {
  if (auto it = direct_.find({state, server}); it != direct_.end()) {
    return {&it->second.cdf, FallbackLevel::Direct};
  }
  if (auto it = cell_pools_.find({state.cell, state.network, server}); it != cell_pools_.end()) {
    return {&it->second.cdf, FallbackLevel::CellPool};
  }
  if (auto it = network_pools_.find({state.network, server}); it != network_pools_.end()) {
    return {&it->second.cdf, FallbackLevel::NetworkPool};
  }
  return {};
}

LatencyModel::Lookup LatencyModel::lookup(const DiscreteState& state, Server server) const {
  Lookup found = try_lookup(state, server);
  if (found.cdf == nullptr) {
    throw ModelError("no latency data for network " + std::to_string(state.network) + " (" +
                     std::string(to_string(server)) + ") at cell (" +
                     std::to_string(state.cell.x) + ", " + std::to_string(state.cell.y) + ")");
  }
  return found;
}

std::vector<NetworkId> LatencyModel::networks(Server server) const {
  std::vector<NetworkId> out;
  for (const auto& [key, entry] : network_pools_) {
    if (key.server == server) out.push_back(key.network);
  }
  return out;
}

namespace {

template <typename Key>
std::map<Key, LatencyModel::Entry> build_entries(std::map<Key, std::vector<double>>& groups,
                                                 std::size_t min_samples) {
  std::map<Key, LatencyModel::Entry> out;
  for (auto& [key, values] : groups) {
    if (values.size() < min_samples) continue;
    const std::size_t n = values.size();
    out.emplace(key, LatencyModel::Entry{EmpiricalCdf(std::move(values)), n});
  }
  return out;
}

}  // namespace

LatencyModel fit_model(std::span<const RttSample> samples, const GridSpec& grid,
                       std::size_t min_samples) {
  grid.validate();
  if (samples.empty()) throw ModelError("cannot fit a latency model to an empty trace");
  if (min_samples == 0) throw ConfigError("min_samples must be >= 1");

  std::map<StateServerKey, std::vector<double>> by_state;
  std::map<CellPoolKey, std::vector<double>> by_cell;
  std::map<NetworkPoolKey, std::vector<double>> by_network;
  for (const auto& s : samples) {
    const DiscreteState state = discretize(s, grid);
    by_state[{state, s.server}].push_back(s.rtt_ms);
    by_cell[{state.cell, state.network, s.server}].push_back(s.rtt_ms);
    by_network[{state.network, s.server}].push_back(s.rtt_ms);
  }

  auto network_pools = build_entries(by_network, min_samples);
  if (network_pools.empty()) {
    throw ModelError("every (network, server) pool has fewer than " +
                     std::to_string(min_samples) + " samples");
  }
  return LatencyModel(grid, min_samples, build_entries(by_state, min_samples),
                      build_entries(by_cell, min_samples), std::move(network_pools));
}

}  // namespace adaptivefog

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "adaptivefog/empirical_stats.hpp"
#include "adaptivefog/trace_model.hpp"

namespace adaptivefog {

/// Which rung of the pooling ladder served a lookup.
enum class FallbackLevel {
  Direct,       // (cell, speed bin, network, server)
  CellPool,     // (cell, any speed bin, network, server)
  NetworkPool,  // (network, server) over the whole trace
};

std::string_view to_string(FallbackLevel level) noexcept;

struct StateServerKey {
  DiscreteState state;
  Server server = Server::Fog;
  friend auto operator<=>(const StateServerKey&, const StateServerKey&) = default;
};

struct CellPoolKey {
  Cell cell;
  NetworkId network = 0;
  Server server = Server::Fog;
  friend auto operator<=>(const CellPoolKey&, const CellPoolKey&) = default;
};

struct NetworkPoolKey {
  NetworkId network = 0;
  Server server = Server::Fog;
  friend auto operator<=>(const NetworkPoolKey&, const NetworkPoolKey&) = default;
};

/// Per-state empirical latency distributions with a three-level fallback
/// ladder for under-sampled states. Every stored CDF holds at least
/// min_samples observations; immutable once built.
class LatencyModel {
 public:
  struct Entry {
    EmpiricalCdf cdf;
    /// Observations behind the entry. Equals cdf.sample_count() for exact
    /// models; larger when the CDF was reloaded from a quantile sketch.
    std::size_t sample_count = 0;
  };

  struct Lookup {
    const EmpiricalCdf* cdf = nullptr;
    FallbackLevel level = FallbackLevel::Direct;
    bool is_fallback() const noexcept { return level != FallbackLevel::Direct; }
  };

  LatencyModel(GridSpec grid, std::size_t min_samples, std::map<StateServerKey, Entry> direct,
               std::map<CellPoolKey, Entry> cell_pools,
               std::map<NetworkPoolKey, Entry> network_pools);

  /// Resolves the CDF for a state, walking the ladder. Throws ModelError when
  /// no rung has an entry.
  Lookup lookup(const DiscreteState& state, Server server) const;
  /// Same as lookup() but returns an empty Lookup instead of throwing.
  Lookup try_lookup(const DiscreteState& state, Server server) const noexcept;

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t min_samples() const noexcept { return min_samples_; }
  const std::map<StateServerKey, Entry>& direct_entries() const noexcept { return direct_; }
  const std::map<CellPoolKey, Entry>& cell_pools() const noexcept { return cell_pools_; }
  const std::map<NetworkPoolKey, Entry>& network_pools() const noexcept { return network_pools_; }

  /// Networks that have a network-wide pool for `server`.
  std::vector<NetworkId> networks(Server server) const;

 private:
  GridSpec grid_;
  std::size_t min_samples_;
  std::map<StateServerKey, Entry> direct_;
  std::map<CellPoolKey, Entry> cell_pools_;
  std::map<NetworkPoolKey, Entry> network_pools_;
};

inline constexpr std::size_t kDefaultMinSamples = 30;

/// Groups samples by discrete state and server and builds one CDF per group
/// that reaches `min_samples`, plus the pooled rungs of the ladder. The result
/// does not depend on the order of `samples`.
///
/// Throws ModelError when `samples` is empty or when no (network, server)
/// pool reaches `min_samples`; OutOfRangeError when a sample is off-grid.
LatencyModel fit_model(std::span<const RttSample> samples, const GridSpec& grid,
                       std::size_t min_samples = kDefaultMinSamples);

}  // namespace adaptivefog

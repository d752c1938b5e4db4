#include "adaptivefog/mobility.hpp"

#include <cmath>

#include "adaptivefog/errors.hpp"

namespace adaptivefog {

void MobilityOptions::validate() const {
  if (slot_ms <= 0) throw ConfigError("mobility: slot_ms must be > 0");
  if (!(smoothing_alpha >= 0.0)) throw ConfigError("mobility: smoothing_alpha must be >= 0");
  if (session_gap_ms <= 0) throw ConfigError("mobility: session gap must be > 0");
}

MobilityModel::MobilityModel(std::vector<MobilityKey> states, std::vector<double> transitions,
                             std::int64_t slot_ms)
    : states_(std::move(states)), transitions_(std::move(transitions)), slot_ms_(slot_ms) {
  const std::size_t n = states_.size();
  if (n == 0) throw DomainError("mobility model needs at least one state");
  if (transitions_.size() != n * n) throw DomainError("transition matrix must be |S| x |S|");
  if (slot_ms_ <= 0) throw DomainError("slot duration must be > 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(states_[i], i).second) throw DomainError("duplicate mobility state");
    double sum = 0.0;
    for (double p : row(i)) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw DomainError("transition row does not sum to 1");
  }
}

std::optional<std::size_t> MobilityModel::index_of(const MobilityKey& key) const {
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  return std::nullopt;
}

MobilityModel estimate_transitions(std::span<const RttSample> samples, const GridSpec& grid,
                                   const MobilityOptions& options) {
  grid.validate();
  options.validate();

  std::vector<RttSample> sorted(samples.begin(), samples.end());
  const auto sessions = split_sessions(sorted, options.session_gap_ms);

  std::map<MobilityKey, std::size_t> index;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& session : sessions) {
    std::span<const RttSample> run(sorted.data() + session.begin, session.end - session.begin);
    const auto slots = resample_session(run, options.slot_ms, [](const RttSample&) { return true; });
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::size_t previous = kNone;
    for (const auto& slot : slots) {
      if (!slot) {
        previous = kNone;
        continue;
      }
      const MobilityKey key = discretize(run[*slot], grid).mobility();
      const std::size_t id = index.emplace(key, index.size()).first->second;
      if (previous != kNone) pairs.emplace_back(previous, id);
      previous = id;
    }
  }
  if (pairs.empty()) throw EstimationError("no consecutive slot pairs to estimate transitions from");

  // Re-number states in key order so the state list is deterministic.
  std::vector<MobilityKey> states;
  std::vector<std::size_t> remap(index.size());
  states.reserve(index.size());
  for (const auto& [key, first_seen] : index) {
    remap[first_seen] = states.size();
    states.push_back(key);
  }

  const std::size_t n = states.size();
  std::vector<double> counts(n * n, 0.0);
  for (auto [from, to] : pairs) counts[remap[from] * n + remap[to]] += 1.0;

  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      counts[i * n + j] += options.smoothing_alpha;
      row_sum += counts[i * n + j];
    }
    if (row_sum == 0.0) {
      counts[i * n + i] = 1.0;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) counts[i * n + j] /= row_sum;
  }
  return MobilityModel(std::move(states), std::move(counts), options.slot_ms);
}

}  // namespace adaptivefog

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "adaptivefog/trace_model.hpp"

namespace adaptivefog {

struct MobilityOptions {
  std::int64_t slot_ms = 500;
  /// Laplace pseudo-count added toward every observed state.
  double smoothing_alpha = 0.0;
  /// Timestamp gaps larger than this start a new driving session.
  std::int64_t session_gap_ms = 5000;

  void validate() const;
};

/// Markov chain over (cell, speed bin) states with a dense row-stochastic
/// transition matrix.
class MobilityModel {
 public:
  MobilityModel() = default;
  /// `transitions` is row-major |states| x |states|. Throws DomainError when a
  /// row is negative or does not sum to 1 within 1e-12, or when states repeat.
  MobilityModel(std::vector<MobilityKey> states, std::vector<double> transitions,
                std::int64_t slot_ms);

  std::size_t size() const noexcept { return states_.size(); }
  std::span<const MobilityKey> states() const noexcept { return states_; }
  std::optional<std::size_t> index_of(const MobilityKey& key) const;

  double probability(std::size_t from, std::size_t to) const noexcept {
    return transitions_[from * states_.size() + to];
  }
  std::span<const double> row(std::size_t from) const noexcept {
    return std::span<const double>(transitions_).subspan(from * states_.size(), states_.size());
  }
  std::span<const double> matrix() const noexcept { return transitions_; }
  std::int64_t slot_ms() const noexcept { return slot_ms_; }

 private:
  std::vector<MobilityKey> states_;
  std::vector<double> transitions_;
  std::map<MobilityKey, std::size_t> index_;
  std::int64_t slot_ms_ = 500;
};

/// Resamples one session (sorted by timestamp) onto slots t0 + k * slot_ms.
/// Each slot takes the nearest accepted sample within slot_ms / 2; slots with
/// none are gaps (nullopt). Indices refer to `session`.
template <typename Accept>
std::vector<std::optional<std::size_t>> resample_session(std::span<const RttSample> session,
                                                         std::int64_t slot_ms, Accept accept) {
  std::vector<std::optional<std::size_t>> slots;
  if (session.empty()) return slots;
  const std::int64_t t0 = session.front().timestamp_ms;
  const std::int64_t half = slot_ms / 2;
  std::vector<std::int64_t> best_distance;
  for (std::size_t i = 0; i < session.size(); ++i) {
    if (!accept(session[i])) continue;
    const std::int64_t dt = session[i].timestamp_ms - t0;
    const std::int64_t k = (dt + half) / slot_ms;
    const std::int64_t distance = dt - k * slot_ms < 0 ? k * slot_ms - dt : dt - k * slot_ms;
    if (distance > half) continue;
    const auto ku = static_cast<std::size_t>(k);
    if (ku >= slots.size()) {
      slots.resize(ku + 1);
      best_distance.resize(ku + 1, half + 1);
    }
    if (distance < best_distance[ku]) {
      best_distance[ku] = distance;
      slots[ku] = i;
    }
  }
  return slots;
}

/// Estimates the driving chain from traces: split into sessions, resample to
/// slots, count consecutive-slot state pairs, smooth and row-normalize. States
/// with no outgoing mass become self-loops. Network and server fields are
/// ignored. Throws EstimationError when no consecutive pair exists.
MobilityModel estimate_transitions(std::span<const RttSample> samples, const GridSpec& grid,
                                   const MobilityOptions& options = {});

}  // namespace adaptivefog

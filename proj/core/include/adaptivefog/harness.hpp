#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptivefog/empirical_stats.hpp"
#include "adaptivefog/latency_model.hpp"
#include "adaptivefog/policy.hpp"
#include "adaptivefog/trace_model.hpp"

namespace adaptivefog {

/// One replay slot: where the vehicle was and what each network would have
/// delivered.
struct AlignedSlot {
  std::int64_t timestamp_ms = 0;
  MobilityKey state;
  NetworkPair rtt{0.0, 0.0};
  /// Bit l set when network l's RTT was drawn from the model rather than observed.
  std::uint8_t counterfactual = 0;
  std::uint32_t session = 0;

  friend bool operator==(const AlignedSlot&, const AlignedSlot&) = default;
};

struct AlignOptions {
  std::int64_t slot_ms = 500;
  std::int64_t session_gap_ms = 5000;
  Server server = Server::Fog;
  /// Seed of the counterfactual stream.
  std::uint64_t seed = 0;
};

/// Resamples each session onto slots per network (nearest sample within half
/// a slot). A slot observed on one network only gets the other network's RTT
/// from `counterfactual`'s CDF for that state (inverse transform on a seeded
/// stream); without a model such slots are dropped, as are slots observed on
/// neither network. Throws ReplayError when no slot survives.
std::vector<AlignedSlot> align_slots(std::span<const RttSample> samples, const GridSpec& grid,
                                     const AlignOptions& options,
                                     const LatencyModel* counterfactual = nullptr);

struct TrainTestSplit {
  std::vector<RttSample> train;
  std::vector<RttSample> test;
  std::size_t train_sessions = 0;
  std::size_t test_sessions = 0;
};

/// First floor(fraction * sessions) sessions (at least one, leaving at least
/// one) train, the rest test. Train timestamps all precede test timestamps.
/// Throws DomainError for fraction outside (0, 1), ReplayError for fewer than
/// two sessions.
TrainTestSplit split_train_test(std::span<const RttSample> samples, std::int64_t session_gap_ms,
                                double train_fraction = 3.0 / 7.0);

struct PolicyReplay {
  std::string policy;
  double cost = 0.0;
  /// Achieved confidence per service, in service order.
  std::vector<double> confidence;
  double weighted_confidence = 0.0;
  LatencyStats rtt;
  long switches = 0;
  double penalty_paid = 0.0;
  std::size_t slots = 0;
  /// Slots whose state the mobility chain never saw (greedy fallback used).
  std::size_t unseen_slots = 0;
  /// Model value of the policy averaged over mobility states, starting on
  /// the replay's initial network (discounted for stationary policies, the
  /// expected T-slot total for the finite one).
  std::optional<double> model_value;

  friend bool operator==(const PolicyReplay&, const PolicyReplay&) = default;
};

struct ReplayOptions {
  NetworkId initial_network = 0;
  std::string label = "policy";
  /// Keep the current network on unseen states instead of the greedy rule
  /// (single-network baselines).
  bool stay_when_unseen = false;
};

/// Walks `slots`; every session starts on options.initial_network. At each
/// slot the policy decides for the current (state, network), the realized RTT
/// is the chosen network's slot value (plus the cost in CdfShift mode on a
/// switch slot), and switches and penalties are tallied. A finite policy is
/// applied receding-horizon, always with its first layer. States outside the
/// chain fall back to the greedy rule on the latency model's CDFs (or stay,
/// see ReplayOptions); with no model, or no CDF, that is a ReplayError.
PolicyReplay replay(const SwitchPolicy& policy, std::span<const AlignedSlot> slots,
                    const SwitchProblem& problem, const ReplayOptions& options = {});

inline const std::vector<std::string> kSweepPolicies = {"adaptive-finite", "adaptive-infinite",
                                                        "myopic", "single-A", "single-B"};

struct SweepSetup {
  MobilityModel mobility;
  std::shared_ptr<const LatencyModel> latency;
  ServiceSet services = ServiceSet::defaults();
  SwitchCost::Mode cost_mode = SwitchCost::Mode::Scalar;
  double discount = kDefaultDiscount;
  int horizon_slots = 10;
  Server server = Server::Fog;
  NetworkId initial_network = 0;
  InfiniteOptions solver;
};

struct SweepResult {
  std::vector<ServiceClass> services;
  std::vector<double> costs;
  std::vector<std::string> policies;
  std::string cost_mode = "scalar";
  /// Cost-major: entries[i * policies.size() + p].
  std::vector<PolicyReplay> entries;

  const PolicyReplay& at(std::size_t cost_index, std::size_t policy_index) const {
    return entries.at(cost_index * policies.size() + policy_index);
  }
  /// Weighted confidence of `policy` across the swept costs.
  std::vector<double> curve(std::string_view policy) const;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// `points` evenly spaced costs from 0 to max_cost inclusive.
std::vector<double> cost_grid(double max_cost, int points);
/// Smallest cost that rules out any switch for both horizons:
/// 1.05 * max(T, 1 / (1 - gamma)) * sum of weights.
double prohibitive_cost(const ServiceSet& services, double discount, int horizon_slots);

/// Solves and replays every kSweepPolicies policy at every cost. Costs must
/// be nonempty, nonnegative and ascending (UsageError otherwise). Solver and
/// replay errors are rethrown with the cost in the message.
SweepResult cost_sweep(const SweepSetup& setup, std::span<const double> costs,
                       std::span<const AlignedSlot> eval_slots);

/// Writes results.json, curves.csv (cost, policy, service, r_ms, confidence:
/// one row per cost x policy x service) and summary.txt into `dir`. Throws
/// FormatError when there is nothing to report, IoError when a file cannot be
/// written.
void report(const SweepResult& result, const std::filesystem::path& dir);

/// The Table-I-style text block used by report().
std::string summary_table(const SweepResult& result);

}  // namespace adaptivefog

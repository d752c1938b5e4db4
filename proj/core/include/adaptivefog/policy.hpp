#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "adaptivefog/empirical_stats.hpp"
#include "adaptivefog/latency_model.hpp"
#include "adaptivefog/mobility.hpp"
#include "adaptivefog/trace_model.hpp"

namespace adaptivefog {

/// The switching problem is defined for exactly two networks.
inline constexpr std::size_t kNetworkCount = 2;

/// One value per network index l in {0, 1}.
using NetworkPair = std::array<double, kNetworkCount>;

constexpr NetworkId other_network(NetworkId l) noexcept { return l == 0 ? 1 : 0; }

struct FiniteHorizon {
  int slots = 1;
  friend bool operator==(const FiniteHorizon&, const FiniteHorizon&) = default;
};
struct InfiniteHorizon {
  friend bool operator==(const InfiniteHorizon&, const InfiniteHorizon&) = default;
};
using Horizon = std::variant<FiniteHorizon, InfiniteHorizon>;

inline constexpr double kDefaultDiscount = 0.9;

/// Network-switching MDP over states <mobility state, network>. The action is
/// binary (stay / switch to the other network); mobility moves independently
/// of the action.
struct SwitchProblem {
  MobilityModel mobility;
  /// cdfs[m][l]: latency CDF of network l at mobility state m for `server`.
  std::vector<std::array<EmpiricalCdf, kNetworkCount>> cdfs;
  ServiceSet services;
  SwitchCost cost;
  /// Used by the infinite horizon; the finite-horizon objective is an
  /// undiscounted sum over the route.
  double discount = kDefaultDiscount;
  Horizon horizon = InfiniteHorizon{};
  Server server = Server::Fog;
  /// Optional; lets replay resolve states the mobility chain never saw.
  std::shared_ptr<const LatencyModel> latency;

  /// Throws DomainError / UsageError on inconsistent fields.
  void validate() const;
};

/// Resolves, for every mobility state and both networks, the latency CDF of
/// `server` through the model's fallback ladder. Throws UsageError unless the
/// model holds exactly networks {0, 1}, ModelError when a CDF cannot be
/// resolved.
SwitchProblem make_switch_problem(MobilityModel mobility,
                                  std::shared_ptr<const LatencyModel> latency,
                                  ServiceSet services, SwitchCost cost, double discount,
                                  Horizon horizon, Server server);

/// Per-state quantities the solvers work from.
struct ProblemTables {
  /// Weighted confidence of network l at state m.
  std::vector<NetworkPair> confidence;
  /// K(F, G) with F the CDF of network l and G the other network's.
  std::vector<NetworkPair> kr;
  /// Confidence lost when switching *onto* network n at state m.
  std::vector<NetworkPair> penalty;
};

ProblemTables tabulate(const SwitchProblem& problem);

/// kr[m][l] = K(F_l, G_{other}) at mobility state m.
std::vector<NetworkPair> kr_table(const SwitchProblem& problem);

enum class PolicyKind : std::uint8_t { Finite, Stationary };

struct SolverStats {
  std::string solver;
  long iterations = 0;
  double residual = 0.0;
};

/// Switching decisions with the quantities that justify them.
///
/// For a Finite policy the tables hold one layer per slot t = 1..T (index
/// t - 1); a Stationary policy holds a single layer. In layer t:
///  - action = 1 exactly when kr <= threshold, threshold being
///    delta - penalty_onto_other (finite) or discount * delta - penalty
///    (stationary);
///  - y is the value gap V(m, other) - V(m, l) at that slot, clamped to
///    [-penalty_onto_l, +penalty_onto_other];
///  - value is the expected utility from that slot on (finite), or the
///    discounted value (stationary).
struct SwitchPolicy {
  PolicyKind kind = PolicyKind::Stationary;
  std::vector<MobilityKey> states;
  std::vector<std::vector<std::array<std::uint8_t, kNetworkCount>>> actions;
  std::vector<std::vector<NetworkPair>> delta;
  std::vector<std::vector<NetworkPair>> y;
  std::vector<std::vector<NetworkPair>> value;
  std::vector<NetworkPair> kr;
  std::vector<NetworkPair> penalty;
  double discount = kDefaultDiscount;
  SolverStats stats;
  // config echo
  ServiceSet services;
  SwitchCost cost;
  Server server = Server::Fog;

  std::size_t slot_count() const noexcept { return actions.size(); }
  /// Action at a slot (0-based; clamped to the last layer) for state m on network l.
  bool switches(std::size_t slot, std::size_t m, NetworkId l) const;
  /// The threshold K is compared with at (slot, m, l).
  double threshold(std::size_t slot, std::size_t m, NetworkId l) const;
};

/// Backward induction on the continuation gap: delta_T = 0, and for t < T
/// delta_t(m, l) = sum_m' P(m'|m) Y_{t+1}(m', l) with
/// Y = clamp(delta - K, -c, +c). Switches iff K <= delta_t - c.
/// Throws UsageError unless the problem horizon is Finite with T >= 1.
SwitchPolicy solve_finite(const SwitchProblem& problem);

struct InfiniteOptions {
  enum class Method {
    /// Value iteration on the full state space, then the continuation gap is
    /// read off the converged values.
    ValueIteration,
    /// Fixed-point iteration directly on delta = P clamp(gamma delta - K, -c, c).
    DeltaFixedPoint,
  };
  Method method = Method::ValueIteration;
  double tolerance = 1e-10;
  long max_iterations = 100000;
};

/// Discounted infinite-horizon threshold policy: switch iff
/// K <= gamma * delta - c. Throws UsageError unless the horizon is Infinite,
/// DomainError unless 0 < gamma < 1, SolverError when the iteration does not
/// reach `tolerance` within `max_iterations`.
SwitchPolicy solve_infinite(const SwitchProblem& problem, const InfiniteOptions& options = {});

/// Switch iff K <= -c: the one-slot greedy rule.
SwitchPolicy myopic_policy(const SwitchProblem& problem);

/// Never switch. Used as the single-network baseline.
SwitchPolicy never_switch_policy(const SwitchProblem& problem);

/// K <= -2c: switching pays for itself regardless of what follows.
/// Throws DomainError for c < 0.
bool always_switch_check(double kr, double c);

/// Fog when its weighted confidence advantage over cloud for this service
/// exceeds theta_f, otherwise Cloud (ties go to cloud). Throws DomainError
/// for theta_f < 0.
Server select_server(const EmpiricalCdf& cloud, const EmpiricalCdf& fog,
                     const ServiceClass& service, double theta_f);

/// Worst-case accumulated loss of one wrong single-slot network choice: c + K.
double single_slot_loss_bound(double kr, double c) noexcept;

/// Exact expected utility of `policy` on `problem`: per-slot backward
/// evaluation for Finite policies (layer t = expected sum from slot t), a
/// dense linear solve of V = r + gamma P V for Stationary ones (requires
/// gamma < 1).
std::vector<std::vector<NetworkPair>> evaluate_policy(const SwitchProblem& problem,
                                                      const SwitchPolicy& policy);

}  // namespace adaptivefog

#include "adaptivefog/policy.hpp"

#include <algorithm>
#include <cmath>

#include "adaptivefog/errors.hpp"

namespace adaptivefog {

void SwitchProblem::validate() const {
  if (mobility.size() == 0) throw DomainError("switch problem has no mobility states");
  if (cdfs.size() != mobility.size()) {
    throw DomainError("switch problem needs one CDF pair per mobility state");
  }
  for (const auto& pair : cdfs) {
    for (const auto& cdf : pair) {
      if (cdf.empty()) throw DomainError("switch problem has an empty latency CDF");
    }
  }
  if (services.empty()) throw DomainError("switch problem has no services");
  if (!(cost.value >= 0.0)) throw DomainError("switching cost must be >= 0");
  if (!(discount > 0.0 && discount <= 1.0)) throw DomainError("discount must lie in (0, 1]");
  if (const auto* finite = std::get_if<FiniteHorizon>(&horizon); finite && finite->slots < 1) {
    throw UsageError("finite horizon needs T >= 1");
  }
}

SwitchProblem make_switch_problem(MobilityModel mobility,
                                  std::shared_ptr<const LatencyModel> latency,
                                  ServiceSet services, SwitchCost cost, double discount,
                                  Horizon horizon, Server server) {
  if (!latency) throw UsageError("switch problem needs a latency model");
  const auto networks = latency->networks(server);
  if (networks != std::vector<NetworkId>{0, 1}) {
    throw UsageError("the switching policy supports exactly two networks with ids 0 and 1; the "
                     "latency model has " + std::to_string(networks.size()) + " for " +
                     std::string(to_string(server)));
  }
  SwitchProblem problem;
  problem.cdfs.reserve(mobility.size());
  for (const auto& key : mobility.states()) {
    std::array<EmpiricalCdf, kNetworkCount> pair;
    for (NetworkId l = 0; l < kNetworkCount; ++l) {
      pair[l] = *latency->lookup({key.cell, key.speed_bin, l}, server).cdf;
    }
    problem.cdfs.push_back(std::move(pair));
  }
  problem.mobility = std::move(mobility);
  problem.services = std::move(services);
  problem.cost = cost;
  problem.discount = discount;
  problem.horizon = horizon;
  problem.server = server;
  problem.latency = std::move(latency);
  problem.validate();
  return problem;
}

ProblemTables tabulate(const SwitchProblem& problem) {
  problem.validate();
  ProblemTables t;
  const std::size_t n = problem.mobility.size();
  t.confidence.resize(n);
  t.kr.resize(n);
  t.penalty.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto& cdf = problem.cdfs[m];
    for (NetworkId l = 0; l < kNetworkCount; ++l) {
      t.confidence[m][l] = weighted_confidence(cdf[l], problem.services);
      t.kr[m][l] = kr_distance(cdf[l], cdf[other_network(l)], problem.services);
      t.penalty[m][l] = switching_penalty(cdf[l], problem.services, problem.cost);
    }
  }
  return t;
}

std::vector<NetworkPair> kr_table(const SwitchProblem& problem) { return tabulate(problem).kr; }

bool SwitchPolicy::switches(std::size_t slot, std::size_t m, NetworkId l) const {
  const std::size_t layer = std::min(slot, actions.size() - 1);
  return actions[layer][m][l] != 0;
}

double SwitchPolicy::threshold(std::size_t slot, std::size_t m, NetworkId l) const {
  const std::size_t layer = std::min(slot, delta.size() - 1);
  const double d = delta[layer][m][l];
  const double c = penalty[m][other_network(l)];
  return kind == PolicyKind::Finite ? d - c : discount * d - c;
}

namespace {

using Layer = std::vector<NetworkPair>;

/// Expected next-slot value sum_m' P(m'|m) v[m'][l] for every (m, l).
Layer expect_next(const MobilityModel& mobility, const Layer& v) {
  const std::size_t n = mobility.size();
  Layer out(n, NetworkPair{0.0, 0.0});
  for (std::size_t m = 0; m < n; ++m) {
    const auto row = mobility.row(m);
    double e0 = 0.0;
    double e1 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      e0 += row[j] * v[j][0];
      e1 += row[j] * v[j][1];
    }
    out[m] = {e0, e1};
  }
  return out;
}

/// Value gap clamped to the switching costs: switching back onto l costs
/// penalty[l], switching onto the other network costs penalty[other].
double clamp_gap(double gap, const NetworkPair& penalty, NetworkId l) {
  return std::clamp(gap, -penalty[l], penalty[other_network(l)]);
}

SwitchPolicy make_shell(const SwitchProblem& problem, const ProblemTables& tables,
                        PolicyKind kind, std::size_t layers) {
  SwitchPolicy policy;
  const std::size_t n = problem.mobility.size();
  policy.kind = kind;
  policy.states.assign(problem.mobility.states().begin(), problem.mobility.states().end());
  policy.actions.assign(layers, std::vector<std::array<std::uint8_t, kNetworkCount>>(n, {0, 0}));
  policy.delta.assign(layers, Layer(n, NetworkPair{0.0, 0.0}));
  policy.y.assign(layers, Layer(n, NetworkPair{0.0, 0.0}));
  policy.kr = tables.kr;
  policy.penalty = tables.penalty;
  policy.discount = problem.discount;
  policy.services = problem.services;
  policy.cost = problem.cost;
  policy.server = problem.server;
  return policy;
}

double sup_diff(const Layer& a, const Layer& b) {
  double worst = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    for (std::size_t l = 0; l < kNetworkCount; ++l) {
      worst = std::max(worst, std::abs(a[m][l] - b[m][l]));
    }
  }
  return worst;
}

void check_infinite(const SwitchProblem& problem) {
  if (!std::holds_alternative<InfiniteHorizon>(problem.horizon)) {
    throw UsageError("solve_infinite called on a finite-horizon problem");
  }
  if (!(problem.discount > 0.0 && problem.discount < 1.0)) {
    throw DomainError("infinite horizon requires a discount in (0, 1)");
  }
}

}  // namespace

SwitchPolicy solve_finite(const SwitchProblem& problem) {
  const auto* finite = std::get_if<FiniteHorizon>(&problem.horizon);
  if (finite == nullptr) throw UsageError("solve_finite called on an infinite-horizon problem");
  if (finite->slots < 1) throw UsageError("finite horizon needs T >= 1");
  const ProblemTables tables = tabulate(problem);
  const auto horizon = static_cast<std::size_t>(finite->slots);
  const std::size_t n = problem.mobility.size();

  SwitchPolicy policy = make_shell(problem, tables, PolicyKind::Finite, horizon);
  policy.stats = {"threshold-backward-induction", finite->slots, 0.0};

  // Nothing follows the last slot, so its continuation gap is zero.
  for (std::size_t t = horizon; t-- > 0;) {
    auto& delta = policy.delta[t];
    auto& y = policy.y[t];
    auto& act = policy.actions[t];
    for (std::size_t m = 0; m < n; ++m) {
      for (NetworkId l = 0; l < kNetworkCount; ++l) {
        const double k = tables.kr[m][l];
        act[m][l] = k <= delta[m][l] - tables.penalty[m][other_network(l)] ? 1 : 0;
        y[m][l] = clamp_gap(delta[m][l] - k, tables.penalty[m], l);
      }
    }
    if (t > 0) policy.delta[t - 1] = expect_next(problem.mobility, y);
  }
  policy.value = evaluate_policy(problem, policy);
  return policy;
}

SwitchPolicy solve_infinite(const SwitchProblem& problem, const InfiniteOptions& options) {
  check_infinite(problem);
  if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
    throw ConfigError("solver tolerance and iteration limit must be positive");
  }
  const ProblemTables tables = tabulate(problem);
  const std::size_t n = problem.mobility.size();
  const double gamma = problem.discount;
  SwitchPolicy policy = make_shell(problem, tables, PolicyKind::Stationary, 1);

  Layer delta(n, NetworkPair{0.0, 0.0});
  Layer value;
  long iterations = 0;
  double residual = 0.0;

  if (options.method == InfiniteOptions::Method::ValueIteration) {
    Layer v(n, NetworkPair{0.0, 0.0});
    while (true) {
      const Layer next_value = expect_next(problem.mobility, v);
      Layer updated(n);
      for (std::size_t m = 0; m < n; ++m) {
        for (NetworkId l = 0; l < kNetworkCount; ++l) {
          const NetworkId k = other_network(l);
          const double stay = tables.confidence[m][l] + gamma * next_value[m][l];
          const double move =
              tables.confidence[m][k] - tables.penalty[m][k] + gamma * next_value[m][k];
          updated[m][l] = std::max(stay, move);
        }
      }
      residual = sup_diff(updated, v);
      v = std::move(updated);
      ++iterations;
      if (residual < options.tolerance) break;
      if (iterations >= options.max_iterations) {
        throw SolverError("value iteration did not converge (residual " +
                              std::to_string(residual) + ")",
                          residual, iterations);
      }
    }
    const Layer next_value = expect_next(problem.mobility, v);
    for (std::size_t m = 0; m < n; ++m) {
      delta[m] = {next_value[m][1] - next_value[m][0], next_value[m][0] - next_value[m][1]};
    }
    value = std::move(v);
    policy.stats.solver = "value-iteration";
  } else {
    while (true) {
      Layer gap(n);
      for (std::size_t m = 0; m < n; ++m) {
        for (NetworkId l = 0; l < kNetworkCount; ++l) {
          gap[m][l] = clamp_gap(gamma * delta[m][l] - tables.kr[m][l], tables.penalty[m], l);
        }
      }
      Layer updated = expect_next(problem.mobility, gap);
      residual = sup_diff(updated, delta);
      delta = std::move(updated);
      ++iterations;
      if (residual < options.tolerance) break;
      if (iterations >= options.max_iterations) {
        throw SolverError("continuation-gap iteration did not converge (residual " +
                              std::to_string(residual) + ")",
                          residual, iterations);
      }
    }
    policy.stats.solver = "delta-fixed-point";
  }
  policy.stats.iterations = iterations;
  policy.stats.residual = residual;

  policy.delta[0] = delta;
  for (std::size_t m = 0; m < n; ++m) {
    for (NetworkId l = 0; l < kNetworkCount; ++l) {
      const double k = tables.kr[m][l];
      const double threshold = gamma * delta[m][l] - tables.penalty[m][other_network(l)];
      policy.actions[0][m][l] = k <= threshold ? 1 : 0;
      policy.y[0][m][l] = clamp_gap(gamma * delta[m][l] - k, tables.penalty[m], l);
    }
  }
  if (value.empty()) {
    policy.value = evaluate_policy(problem, policy);
  } else {
    policy.value = {std::move(value)};
  }
  return policy;
}

SwitchPolicy myopic_policy(const SwitchProblem& problem) {
  const ProblemTables tables = tabulate(problem);
  SwitchPolicy policy = make_shell(problem, tables, PolicyKind::Stationary, 1);
  policy.stats = {"myopic", 0, 0.0};
  for (std::size_t m = 0; m < tables.kr.size(); ++m) {
    for (NetworkId l = 0; l < kNetworkCount; ++l) {
      policy.actions[0][m][l] = tables.kr[m][l] <= -tables.penalty[m][other_network(l)] ? 1 : 0;
      policy.y[0][m][l] = clamp_gap(-tables.kr[m][l], tables.penalty[m], l);
    }
  }
  if (problem.discount < 1.0) policy.value = evaluate_policy(problem, policy);
  return policy;
}

SwitchPolicy never_switch_policy(const SwitchProblem& problem) {
  const ProblemTables tables = tabulate(problem);
  SwitchPolicy policy = make_shell(problem, tables, PolicyKind::Stationary, 1);
  policy.stats = {"never-switch", 0, 0.0};
  if (problem.discount < 1.0) policy.value = evaluate_policy(problem, policy);
  return policy;
}

bool always_switch_check(double kr, double c) {
  if (!(c >= 0.0)) throw DomainError("switching cost must be >= 0");
  return kr <= -2.0 * c;
}

Server select_server(const EmpiricalCdf& cloud, const EmpiricalCdf& fog,
                     const ServiceClass& service, double theta_f) {
  if (!(theta_f >= 0.0)) throw DomainError("server-selection threshold must be >= 0");
  const double advantage = service.weight * (confidence(fog, service.max_latency_ms) -
                                             confidence(cloud, service.max_latency_ms));
  return advantage <= theta_f ? Server::Cloud : Server::Fog;
}

double single_slot_loss_bound(double kr, double c) noexcept { return c + kr; }

}  // namespace adaptivefog

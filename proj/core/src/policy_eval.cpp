#include <Eigen/Dense>

#include "adaptivefog/errors.hpp"
#include "adaptivefog/policy.hpp"

namespace adaptivefog {

namespace {

std::size_t flat(std::size_t m, NetworkId l) { return 2 * m + l; }

/// Reward and successor network of taking the policy's action at (m, l).
struct Step {
  double reward;
  NetworkId next_network;
};

Step step(const ProblemTables& t, const SwitchPolicy& policy, std::size_t layer, std::size_t m,
          NetworkId l) {
  if (policy.actions[layer][m][l] != 0) {
    const NetworkId k = other_network(l);
    return {t.confidence[m][k] - t.penalty[m][k], k};
  }
  return {t.confidence[m][l], l};
}

}  // namespace

std::vector<std::vector<NetworkPair>> evaluate_policy(const SwitchProblem& problem,
                                                      const SwitchPolicy& policy) {
  const ProblemTables tables = tabulate(problem);
  const std::size_t n = problem.mobility.size();
  if (policy.states.size() != n || policy.actions.empty()) {
    throw UsageError("policy does not match the problem's state space");
  }

  if (policy.kind == PolicyKind::Finite) {
    const std::size_t horizon = policy.actions.size();
    std::vector<std::vector<NetworkPair>> value(horizon, std::vector<NetworkPair>(n));
    std::vector<NetworkPair> after(n, NetworkPair{0.0, 0.0});
    for (std::size_t t = horizon; t-- > 0;) {
      for (std::size_t m = 0; m < n; ++m) {
        const auto row = problem.mobility.row(m);
        for (NetworkId l = 0; l < kNetworkCount; ++l) {
          const Step s = step(tables, policy, t, m, l);
          double future = 0.0;
          for (std::size_t j = 0; j < n; ++j) future += row[j] * after[j][s.next_network];
          value[t][m][l] = s.reward + future;
        }
      }
      after = value[t];
    }
    return value;
  }

  const double gamma = problem.discount;
  if (!(gamma < 1.0)) throw DomainError("stationary policy evaluation requires discount < 1");
  const auto size = static_cast<Eigen::Index>(2 * n);
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(size, size);
  Eigen::VectorXd reward(size);
  for (std::size_t m = 0; m < n; ++m) {
    const auto row = problem.mobility.row(m);
    for (NetworkId l = 0; l < kNetworkCount; ++l) {
      const Step s = step(tables, policy, 0, m, l);
      const auto i = static_cast<Eigen::Index>(flat(m, l));
      reward(i) = s.reward;
      for (std::size_t j = 0; j < n; ++j) {
        system(i, static_cast<Eigen::Index>(flat(j, s.next_network))) -= gamma * row[j];
      }
    }
  }
  const Eigen::VectorXd v = system.partialPivLu().solve(reward);
  std::vector<NetworkPair> layer(n);
  for (std::size_t m = 0; m < n; ++m) {
    layer[m] = {v(static_cast<Eigen::Index>(flat(m, 0))), v(static_cast<Eigen::Index>(flat(m, 1)))};
  }
  return {std::move(layer)};
}

}  // namespace adaptivefog

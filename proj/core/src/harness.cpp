#include "adaptivefog/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "adaptivefog/errors.hpp"
#include "adaptivefog/mobility.hpp"
#include "adaptivefog/serialization.hpp"

namespace adaptivefog {

std::vector<AlignedSlot> align_slots(std::span<const RttSample> samples, const GridSpec& grid,
                                     const AlignOptions& options,
                                     const LatencyModel* counterfactual) {
  if (options.slot_ms <= 0 || options.session_gap_ms <= 0) {
    throw ConfigError("slot and session gap must be > 0");
  }
  std::vector<RttSample> sorted(samples.begin(), samples.end());
  const auto sessions = split_sessions(sorted, options.session_gap_ms);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<AlignedSlot> out;
  std::uint32_t session_id = 0;

  for (const auto& session : sessions) {
    std::span<const RttSample> run(sorted.data() + session.begin, session.end - session.begin);
    std::array<std::vector<std::optional<std::size_t>>, kNetworkCount> per_network;
    for (NetworkId l = 0; l < kNetworkCount; ++l) {
      per_network[l] = resample_session(run, options.slot_ms, [&](const RttSample& s) {
        return s.network_id == l && s.server == options.server;
      });
    }
    const std::size_t length = std::max(per_network[0].size(), per_network[1].size());
    bool any = false;
    for (std::size_t k = 0; k < length; ++k) {
      std::array<const RttSample*, kNetworkCount> seen{nullptr, nullptr};
      for (NetworkId l = 0; l < kNetworkCount; ++l) {
        if (k < per_network[l].size() && per_network[l][k]) seen[l] = &run[*per_network[l][k]];
      }
      const RttSample* where = seen[0] ? seen[0] : seen[1];
      if (!where) continue;

      AlignedSlot slot;
      slot.timestamp_ms = run.front().timestamp_ms + static_cast<std::int64_t>(k) * options.slot_ms;
      slot.state = discretize(*where, grid).mobility();
      slot.session = session_id;
      bool complete = true;
      for (NetworkId l = 0; l < kNetworkCount; ++l) {
        if (seen[l]) {
          slot.rtt[l] = seen[l]->rtt_ms;
          continue;
        }
        const double u = 1.0 - unit(rng);  // (0, 1]
        const auto hit = counterfactual
                             ? counterfactual->try_lookup({slot.state.cell, slot.state.speed_bin, l},
                                                          options.server)
                             : LatencyModel::Lookup{};
        if (!hit.cdf) {
          complete = false;
          break;
        }
        slot.rtt[l] = hit.cdf->quantile(u);
        slot.counterfactual |= static_cast<std::uint8_t>(1u << l);
      }
      if (!complete) continue;
      out.push_back(slot);
      any = true;
    }
    if (any) ++session_id;
  }
  if (out.empty()) throw ReplayError("no replayable slots: need RTTs for both networks");
  return out;
}

TrainTestSplit split_train_test(std::span<const RttSample> samples, std::int64_t session_gap_ms,
                                double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train fraction must be in (0, 1)");
  }
  std::vector<RttSample> sorted(samples.begin(), samples.end());
  const auto sessions = split_sessions(sorted, session_gap_ms);
  if (sessions.size() < 2) throw ReplayError("train/test split needs at least two sessions");

  auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(sessions.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, sessions.size() - 1);
  const std::size_t cut = sessions[n_train].begin;

  TrainTestSplit split;
  split.train.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(cut));
  split.test.assign(sorted.begin() + static_cast<std::ptrdiff_t>(cut), sorted.end());
  split.train_sessions = n_train;
  split.test_sessions = sessions.size() - n_train;
  return split;
}

namespace {

struct Decision {
  bool switch_now;
  double penalty;  // confidence charged if switching
};

}  // namespace

PolicyReplay replay(const SwitchPolicy& policy, std::span<const AlignedSlot> slots,
                    const SwitchProblem& problem, const ReplayOptions& options) {
  if (slots.empty()) throw ReplayError("nothing to replay");
  if (options.initial_network >= kNetworkCount) throw UsageError("initial network must be 0 or 1");
  const ProblemTables tables = tabulate(problem);

  PolicyReplay result;
  result.policy = options.label;
  result.cost = problem.cost.value;
  std::vector<double> realized;
  realized.reserve(slots.size());

  NetworkId network = options.initial_network;
  std::uint32_t session = slots.front().session;

  for (const AlignedSlot& slot : slots) {
    if (slot.session != session) {
      session = slot.session;
      network = options.initial_network;
    }
    const NetworkId other = other_network(network);
    Decision d{false, 0.0};
    if (const auto m = problem.mobility.index_of(slot.state)) {
      d = {policy.switches(0, *m, network), tables.penalty[*m][other]};
    } else {
      ++result.unseen_slots;
      if (!options.stay_when_unseen) {
        if (!problem.latency) {
          throw ReplayError("state outside the mobility chain and no latency model to fall back on");
        }
        const auto here = problem.latency->try_lookup(
            {slot.state.cell, slot.state.speed_bin, network}, problem.server);
        const auto there = problem.latency->try_lookup(
            {slot.state.cell, slot.state.speed_bin, other}, problem.server);
        if (!here.cdf || !there.cdf) throw ReplayError("no latency CDF for an unseen state");
        const double k = kr_distance(*here.cdf, *there.cdf, problem.services);
        const double pen = switching_penalty(*there.cdf, problem.services, problem.cost);
        d = {k <= -pen, pen};
      }
    }
    double rtt;
    if (d.switch_now) {
      network = other;
      ++result.switches;
      result.penalty_paid += d.penalty;
      rtt = slot.rtt[network];
      if (problem.cost.mode == SwitchCost::Mode::CdfShift) rtt += problem.cost.value;
    } else {
      rtt = slot.rtt[network];
    }
    realized.push_back(rtt);
  }

  result.slots = realized.size();
  result.confidence.reserve(problem.services.size());
  std::sort(realized.begin(), realized.end());
  for (const auto& s : problem.services) {
    const auto hits = std::upper_bound(realized.begin(), realized.end(), s.max_latency_ms) - realized.begin();
    const double conf = static_cast<double>(hits) / static_cast<double>(realized.size());
    result.confidence.push_back(conf);
    result.weighted_confidence += s.weight * conf;
  }
  result.rtt = summarize(realized);
  return result;
}

std::vector<double> SweepResult::curve(std::string_view policy) const {
  const auto it = std::find(policies.begin(), policies.end(), policy);
  if (it == policies.end()) throw UsageError("unknown policy '" + std::string(policy) + "'");
  const auto p = static_cast<std::size_t>(it - policies.begin());
  std::vector<double> out;
  for (std::size_t i = 0; i < costs.size(); ++i) out.push_back(at(i, p).weighted_confidence);
  return out;
}

std::vector<double> cost_grid(double max_cost, int points) {
  if (points < 1) throw UsageError("sweep needs at least one point");
  if (!(max_cost >= 0.0)) throw UsageError("sweep maximum must be >= 0");
  if (points == 1) return {0.0};
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(max_cost * i / (points - 1));
  return out;
}

double prohibitive_cost(const ServiceSet& services, double discount, int horizon_slots) {
  if (!(discount > 0.0 && discount < 1.0)) throw DomainError("discount must be in (0, 1)");
  const double slots = std::max(static_cast<double>(horizon_slots), 1.0 / (1.0 - discount));
  return 1.05 * slots * services.total_weight();
}

namespace {

double mean_start_value(const std::vector<NetworkPair>& layer, NetworkId start) {
  double sum = 0.0;
  for (const auto& v : layer) sum += v[start];
  return sum / static_cast<double>(layer.size());
}

std::string at_cost(double c) {
  std::ostringstream s;
  s << " (switch cost " << c << ")";
  return s.str();
}

}  // namespace

SweepResult cost_sweep(const SweepSetup& setup, std::span<const double> costs,
                       std::span<const AlignedSlot> eval_slots) {
  if (costs.empty()) throw UsageError("cost sweep needs at least one cost");
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (!(costs[i] >= 0.0)) throw UsageError("switch costs must be >= 0");
    if (i > 0 && costs[i] < costs[i - 1]) throw UsageError("switch costs must be ascending");
  }
  if (setup.horizon_slots < 1) throw UsageError("horizon must be >= 1 slot");

  SweepResult result;
  result.services.assign(setup.services.begin(), setup.services.end());
  result.costs.assign(costs.begin(), costs.end());
  result.policies = kSweepPolicies;
  result.cost_mode = setup.cost_mode == SwitchCost::Mode::Scalar ? "scalar" : "cdf-shift";

  const NetworkId start = setup.initial_network;
  for (const double c : costs) {
    try {
      const SwitchCost cost{setup.cost_mode, c};
      SwitchProblem finite = make_switch_problem(setup.mobility, setup.latency, setup.services, cost,
                                                 setup.discount, FiniteHorizon{setup.horizon_slots},
                                                 setup.server);
      SwitchProblem infinite = finite;
      infinite.horizon = InfiniteHorizon{};

      const SwitchPolicy adaptive_f = solve_finite(finite);
      const SwitchPolicy adaptive_i = solve_infinite(infinite, setup.solver);
      const SwitchPolicy greedy = myopic_policy(infinite);
      const SwitchPolicy never = never_switch_policy(infinite);

      auto run = [&](const SwitchPolicy& policy, const SwitchProblem& problem,
                     const std::string& label, NetworkId first) {
        PolicyReplay r = replay(policy, eval_slots, problem, {first, label, &policy == &never});
        r.model_value = mean_start_value(evaluate_policy(problem, policy).front(), first);
        result.entries.push_back(std::move(r));
      };
      run(adaptive_f, finite, kSweepPolicies[0], start);
      run(adaptive_i, infinite, kSweepPolicies[1], start);
      run(greedy, infinite, kSweepPolicies[2], start);
      run(never, infinite, kSweepPolicies[3], 0);
      run(never, infinite, kSweepPolicies[4], 1);
    } catch (const SolverError& e) {
      throw SolverError(e.what() + at_cost(c), e.residual(), e.iterations());
    } catch (const ReplayError& e) {
      throw ReplayError(e.what() + at_cost(c));
    }
  }
  return result;
}

std::string summary_table(const SweepResult& result) {
  std::ostringstream out;
  char buf[64];
  auto cell = [&](double v, const char* fmt) {
    std::snprintf(buf, sizeof buf, fmt, v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < result.costs.size(); ++i) {
    out << "switch cost " << result.costs[i] << " (" << result.cost_mode << ")\n";
    out << std::string(20, ' ');
    for (const auto& p : result.policies) {
      std::snprintf(buf, sizeof buf, "%18s", p.c_str());
      out << buf;
    }
    out << '\n';
    auto row = [&](const std::string& name, auto get, const char* fmt) {
      std::snprintf(buf, sizeof buf, "%-20s", name.c_str());
      out << buf;
      for (std::size_t p = 0; p < result.policies.size(); ++p) out << cell(get(result.at(i, p)), fmt);
      out << '\n';
    };
    row("Mean (ms)", [](const PolicyReplay& r) { return r.rtt.mean; }, "%18.1f");
    row("STD (ms)", [](const PolicyReplay& r) { return r.rtt.stddev; }, "%18.1f");
    row("Median (ms)", [](const PolicyReplay& r) { return r.rtt.median; }, "%18.1f");
    row("90th pct (ms)", [](const PolicyReplay& r) { return r.rtt.p90; }, "%18.1f");
    for (std::size_t s = 0; s < result.services.size(); ++s) {
      std::snprintf(buf, sizeof buf, "Conf <= %g ms", result.services[s].max_latency_ms);
      row(buf, [s](const PolicyReplay& r) { return r.confidence.at(s); }, "%18.4f");
    }
    row("Weighted conf", [](const PolicyReplay& r) { return r.weighted_confidence; }, "%18.4f");
    row("Switches", [](const PolicyReplay& r) { return static_cast<double>(r.switches); }, "%18.0f");
    row("Penalty paid", [](const PolicyReplay& r) { return r.penalty_paid; }, "%18.3f");
    row("Model value", [](const PolicyReplay& r) { return r.model_value.value_or(NAN); }, "%18.4f");
    out << '\n';
  }
  return out.str();
}

void report(const SweepResult& result, const std::filesystem::path& dir) {
  if (result.costs.empty() || result.policies.empty() || result.services.empty() ||
      result.entries.size() != result.costs.size() * result.policies.size()) {
    throw FormatError("report needs at least one curve with one point per cost and policy");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  write_json_file(dir / "results.json", encode(result));

  std::ostringstream csv;
  csv.precision(12);
  csv << "cost,policy,service_id,max_latency_ms,confidence\n";
  for (std::size_t i = 0; i < result.costs.size(); ++i) {
    for (std::size_t p = 0; p < result.policies.size(); ++p) {
      const auto& r = result.at(i, p);
      for (std::size_t s = 0; s < result.services.size(); ++s) {
        csv << result.costs[i] << ',' << result.policies[p] << ',' << result.services[s].id << ','
            << result.services[s].max_latency_ms << ',' << r.confidence.at(s) << '\n';
      }
    }
  }
  const auto write_text = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << text;
    if (!f) throw IoError("write failed for " + path.string());
  };
  write_text(dir / "curves.csv", csv.str());
  write_text(dir / "summary.txt", summary_table(result));
}

}  // namespace adaptivefog

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adaptivefog/empirical_stats.hpp"
#include "adaptivefog/harness.hpp"
#include "adaptivefog/latency_model.hpp"
#include "adaptivefog/mobility.hpp"
#include "adaptivefog/policy.hpp"
#include "adaptivefog/synth.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace adaptivefog;

namespace {

using Clock = std::chrono::steady_clock;

class Criterion {
 public:
  Criterion(int id, std::string title, double time_limit_s)
      : id_(id), title_(std::move(title)), limit_(time_limit_s), start_(Clock::now()) {}

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_ < 5) problems_.push_back(what);
    ++failures_;
  }
  void note(const std::string& s) { notes_.push_back(s); }

  bool finish() {
    const double elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
    if (limit_ > 0.0 && elapsed >= limit_) {
      problems_.push_back("runtime " + fmt(elapsed) + " s exceeds " + fmt(limit_) + " s");
      ++failures_;
    }
    const bool pass = failures_ == 0;
    std::printf("%s [%d] %s (%.2f s", pass ? "PASS" : "FAIL", id_, title_.c_str(), elapsed);
    for (const auto& n : notes_) std::printf("; %s", n.c_str());
    std::printf(")\n");
    for (const auto& p : problems_) std::printf("       %s\n", p.c_str());
    if (failures_ > static_cast<long>(problems_.size())) {
      std::printf("       ... %ld failures in total\n", failures_);
    }
    std::fflush(stdout);
    return pass;
  }

  static std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
  }

 private:
  int id_;
  std::string title_;
  double limit_;
  Clock::time_point start_;
  long failures_ = 0;
  std::vector<std::string> problems_;
  std::vector<std::string> notes_;
};

constexpr double kTie = 1e-9;

std::string where(int instance, std::size_t t, std::size_t m, NetworkId l) {
  return "instance " + std::to_string(instance) + " slot " + std::to_string(t) + " state " + std::to_string(m) +
         " network " + std::to_string(l);
}

// Solved instances from (1) and (2), kept for (3).
struct Solved {
  SwitchProblem problem;
  std::vector<SwitchPolicy> policies;
};
std::vector<Solved> g_solved;

bool finite_oracle() {
  Criterion c(1, "finite horizon matches exhaustive enumeration on 200 instances", 10.0);
  gen::Rng rng(1001);
  long decisions = 0;
  long tie_skips = 0;
  int enumerated = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 4);
    const int horizon = 1 + (i / 4) % 5;
    const auto p = gen::problem(rng, {.states = n, .horizon = FiniteHorizon{horizon}, .cdf_shift = i % 5 == 4});
    const auto pol = solve_finite(p);
    const auto mdp = oracle::build(p);
    const auto value = evaluate_policy(p, pol);
    const auto dp = oracle::backward_induction(mdp, horizon);

    // Exhaustive over all 2^(2 n T) tables where that is affordable; the
    // Q-value backward induction (what enumeration computes) otherwise.
    const bool exhaustive = 2 * n * static_cast<std::size_t>(horizon) <= 16;
    oracle::EnumerationResult best;
    if (exhaustive) {
      best = oracle::enumerate_tables(mdp, horizon);
      ++enumerated;
    }
    for (std::size_t t = 0; t < static_cast<std::size_t>(horizon); ++t) {
      for (std::size_t m = 0; m < n; ++m) {
        for (NetworkId l = 0; l < 2; ++l) {
          const double ref_v = exhaustive ? best.v[t][m][l] : dp.v[t][m][l];
          c.expect(std::abs(value[t][m][l] - ref_v) <= 1e-9,
                   where(i, t, m, l) + ": value " + Criterion::fmt(value[t][m][l], 17) + " vs " +
                       Criterion::fmt(ref_v, 17));
          const auto& q = dp.q[t][m][l];
          const bool tie = std::abs(q[1] - q[0]) <= kTie;
          if (tie && !(exhaustive && best.optima == 1)) {
            ++tie_skips;
            continue;
          }
          const bool expected = exhaustive && best.optima == 1 ? best.actions[t][m][l] != 0 : q[1] > q[0];
          c.expect(pol.switches(t, m, l) == expected, where(i, t, m, l) + ": decision differs");
          ++decisions;
        }
      }
    }
    g_solved.push_back({p, {pol}});
  }
  c.note(std::to_string(enumerated) + " enumerated exhaustively, " + std::to_string(200 - enumerated) +
         " via Q-value induction");
  c.note(std::to_string(decisions) + " decisions compared, " + std::to_string(tie_skips) + " exact ties");
  return c.finish();
}

bool infinite_oracle() {
  Criterion c(2, "infinite horizon matches value-iteration greedy actions on 100 instances", 30.0);
  gen::Rng rng(2002);
  double worst_gap = 0.0;
  long decisions = 0;
  long tie_skips = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 6);
    const auto p = gen::problem(rng, {.states = n, .discount = 0.9, .cdf_shift = i % 5 == 4});
    const auto ref = oracle::value_iteration(oracle::build(p));
    Solved solved{p, {}};
    for (auto method : {InfiniteOptions::Method::ValueIteration, InfiniteOptions::Method::DeltaFixedPoint}) {
      const auto pol = solve_infinite(p, {.method = method});
      const auto v = evaluate_policy(p, pol);
      for (std::size_t m = 0; m < n; ++m) {
        for (NetworkId l = 0; l < 2; ++l) {
          const double gap = std::abs(v[0][m][l] - ref.v[m][l]);
          worst_gap = std::max(worst_gap, gap);
          c.expect(gap < 1e-8, where(i, 0, m, l) + ": |V gap| " + Criterion::fmt(gap));
          const auto& q = ref.q[m][l];
          if (std::abs(q[1] - q[0]) <= kTie) {
            ++tie_skips;
            continue;
          }
          c.expect(pol.switches(0, m, l) == (q[1] > q[0]), where(i, 0, m, l) + ": " + pol.stats.solver +
                                                                 " decision differs");
          ++decisions;
        }
      }
      solved.policies.push_back(pol);
    }
    g_solved.push_back(std::move(solved));
  }
  c.note("both solvers; " + std::to_string(decisions) + " decisions compared, " + std::to_string(tie_skips) +
         " exact ties");
  c.note("max |V gap| " + Criterion::fmt(worst_gap, 3));
  return c.finish();
}

bool always_switch() {
  Criterion c(3, "K <= -2c implies switching under both solvers", 0.0);
  long checked = 0;
  int idx = 0;
  for (const auto& s : g_solved) {
    // Add the other horizon's solution for the same instance.
    auto policies = s.policies;
    auto other = s.problem;
    if (std::holds_alternative<FiniteHorizon>(s.problem.horizon)) {
      other.horizon = InfiniteHorizon{};
      policies.push_back(solve_infinite(other));
    } else {
      other.horizon = FiniteHorizon{5};
      policies.push_back(solve_finite(other));
    }
    for (const auto& pol : policies) {
      // CdfShift charges a different amount per (state, network); the largest
      // of them plays the role of c. For a scalar cost they are all equal.
      double cost = 0.0;
      for (const auto& row : pol.penalty) cost = std::max({cost, row[0], row[1]});
      for (std::size_t m = 0; m < pol.kr.size(); ++m) {
        for (NetworkId l = 0; l < 2; ++l) {
          if (!always_switch_check(pol.kr[m][l], cost)) continue;
          for (std::size_t t = 0; t < pol.slot_count(); ++t) {
            ++checked;
            c.expect(pol.switches(t, m, l), where(idx, t, m, l) + " (" + pol.stats.solver + ")");
          }
        }
      }
    }
    ++idx;
  }
  c.expect(checked > 0, "no state met the condition");
  c.note(std::to_string(checked) + " (slot, state) pairs met the condition");
  return c.finish();
}

bool metric_axioms() {
  Criterion c(4, "metric axioms on 1000 random CDF pairs, exact rationals", 0.0);
  gen::Rng rng(4004);
  std::uniform_int_distribution<int> weight_num(1, 1000);
  for (int i = 0; i < 1000; ++i) {
    const auto a = gen::latencies(rng, 40, 20.0, 220.0, true);
    const auto b = gen::latencies(rng, 40, 20.0, 220.0, true);
    // Weights k / 1000 held as doubles by the library and as fractions here.
    auto services = gen::services(rng);
    std::vector<ServiceClass> items(services.begin(), services.end());
    std::vector<oracle::Fraction> w;
    oracle::Fraction total;
    for (auto& s : items) {
      const int k = weight_num(rng);
      s.weight = k / 1000.0;
      s.max_latency_ms = std::round(s.max_latency_ms);
      w.emplace_back(k, 1000);
      total = total + w.back();
    }
    services = ServiceSet(items);
    const auto count = [](const std::vector<double>& xs, double r) {
      return static_cast<__int128>(std::count_if(xs.begin(), xs.end(), [r](double x) { return x <= r; }));
    };
    oracle::Fraction hf, hg, k;
    for (std::size_t s = 0; s < items.size(); ++s) {
      const double r = items[s].max_latency_ms;
      const oracle::Fraction fa(count(a, r), static_cast<__int128>(a.size()));
      const oracle::Fraction fb(count(b, r), static_cast<__int128>(b.size()));
      hf = hf + w[s] * fa;
      hg = hg + w[s] * fb;
      k = k + w[s] * (fa - fb);
    }
    const EmpiricalCdf f(a), g(b);
    const double kfg = kr_distance(f, g, services);
    const double kgf = kr_distance(g, f, services);
    const std::string tag = "pair " + std::to_string(i);
    c.expect(std::abs(kfg - k.to_double()) <= 1e-12, tag + ": K differs from the exact value");
    c.expect(std::abs(kfg + kgf) <= 1e-12, tag + ": antisymmetry");
    c.expect(-total <= k && k <= total, tag + ": exact |K| > sum w");
    c.expect(std::abs(kfg) <= total.to_double() + 1e-12, tag + ": |K| > sum w");
    c.expect(hf - hg == k, tag + ": exact H_F - H_G != K");
    c.expect(std::abs(weighted_confidence(f, services) - weighted_confidence(g, services) - kfg) <= 1e-12,
             tag + ": H_F - H_G != K");
  }
  return c.finish();
}

bool penalty_properties() {
  Criterion c(5, "CdfShift penalty: zero at c = 0, nondecreasing, hand example", 0.0);
  gen::Rng rng(5005);
  for (int i = 0; i < 100; ++i) {
    const EmpiricalCdf f(gen::latencies(rng, 40, 20.0, 220.0, i % 2 == 0));
    const auto services = gen::services(rng);
    double prev = -1.0;
    for (int cost = 0; cost <= 200; cost += 10) {
      const double p = switching_penalty(f, services, SwitchCost::cdf_shift(cost));
      if (cost == 0) c.expect(p == 0.0, "cdf " + std::to_string(i) + ": nonzero at c = 0");
      c.expect(p >= prev, "cdf " + std::to_string(i) + ": decreases at c = " + std::to_string(cost));
      prev = p;
    }
  }
  const double hand =
      switching_penalty(EmpiricalCdf({50.0, 90.0}), ServiceSet({{0, 100.0, 1.0}}), SwitchCost::cdf_shift(20.0));
  c.expect(hand == 0.5, "hand example gave " + Criterion::fmt(hand, 17));
  c.note("hand example " + Criterion::fmt(hand));
  return c.finish();
}

std::vector<double> stream(const std::vector<RttSample>& xs, NetworkId net, Server server) {
  std::vector<double> out;
  for (const auto& s : xs) {
    if (s.network_id == net && s.server == server) out.push_back(s.rtt_ms);
  }
  return out;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

bool calibration() {
  Criterion c(6, "generator calibration at 100k samples", 20.0);
  const auto city = generate(preset("city-drive-2mno"), 100000);
  const auto st = summarize(stream(city, 0, Server::Fog));
  c.expect(std::abs(st.mean - 88.0) <= 3.0, "city mean " + Criterion::fmt(st.mean));
  c.expect(std::abs(st.stddev - 34.0) <= 5.0, "city STD " + Criterion::fmt(st.stddev));
  c.expect(std::abs(st.median - 85.0) <= 3.0, "city median " + Criterion::fmt(st.median));
  c.expect(std::abs(st.p90 - 120.0) <= 5.0, "city p90 " + Criterion::fmt(st.p90));
  c.note("city fog: mean " + Criterion::fmt(st.mean) + ", STD " + Criterion::fmt(st.stddev) + ", median " +
         Criterion::fmt(st.median) + ", p90 " + Criterion::fmt(st.p90));

  const auto lab = generate(preset("fixed-lab"), 100000);
  const auto fog = stream(lab, 0, Server::Fog);
  const auto modes = oracle::kde_modes(fog, 3.0, 20.0, 200.0, 0.25);
  c.expect(modes.size() == 2, "fixed-lab KDE found " + std::to_string(modes.size()) + " modes");
  if (modes.size() == 2) {
    c.expect(std::abs(modes[0] - 54.0) <= 5.0, "first mode " + Criterion::fmt(modes[0]));
    c.expect(std::abs(modes[1] - 87.0) <= 5.0, "second mode " + Criterion::fmt(modes[1]));
    c.note("fixed-lab modes " + Criterion::fmt(modes[0]) + " / " + Criterion::fmt(modes[1]));
  }
  const double gap = mean_of(stream(lab, 0, Server::Cloud)) - mean_of(fog);
  c.expect(std::abs(gap - 12.0) <= 3.0, "cloud - fog gap " + Criterion::fmt(gap));
  c.note("cloud - fog " + Criterion::fmt(gap));
  return c.finish();
}

bool end_to_end() {
  Criterion c(7, "city-drive-2mno cost sweep behaviour", 120.0);
  const auto samples = generate(preset("city-drive-2mno"), 100000);
  // Same protocol as the CLI sweep with default configuration.
  GridSpec grid;
  grid.origin_lat = std::numeric_limits<double>::infinity();
  grid.origin_lon = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    grid.origin_lat = std::min(grid.origin_lat, s.latitude);
    grid.origin_lon = std::min(grid.origin_lon, s.longitude);
  }
  const MobilityOptions mob;
  const auto split = split_train_test(samples, mob.session_gap_ms);
  auto model = std::make_shared<const LatencyModel>(fit_model(split.train, grid));

  SweepSetup setup;
  setup.mobility = estimate_transitions(split.train, grid, mob);
  setup.latency = model;
  const auto& pools = model->network_pools();
  setup.initial_network =
      weighted_confidence(pools.at({1, Server::Fog}).cdf, setup.services) >
              weighted_confidence(pools.at({0, Server::Fog}).cdf, setup.services)
          ? 1
          : 0;
  const auto costs = cost_grid(prohibitive_cost(setup.services, setup.discount, setup.horizon_slots), 21);
  const auto slots = align_slots(split.test, grid, {}, model.get());
  const auto result = cost_sweep(setup, costs, slots);

  const auto single_a = result.curve("single-A");
  const auto single_b = result.curve("single-B");
  const double best = std::max(single_a.front(), single_b.front());
  const double worst = std::min(single_a.front(), single_b.front());
  for (const char* name : {"adaptive-finite", "adaptive-infinite"}) {
    const auto curve = result.curve(name);
    const std::string n(name);
    c.expect(curve.front() >= best - 0.01, n + " at c = 0: " + Criterion::fmt(curve.front()) + " < best single " +
                                               Criterion::fmt(best) + " - 0.01");
    c.expect(curve.front() - worst >= 0.15, n + " at c = 0 beats worst single by only " +
                                                Criterion::fmt(curve.front() - worst));
    for (std::size_t i = 1; i < curve.size(); ++i) {
      c.expect(curve[i] <= curve[i - 1], n + " rises at c = " + Criterion::fmt(costs[i]) + ": " +
                                             Criterion::fmt(curve[i - 1], 6) + " -> " + Criterion::fmt(curve[i], 6));
    }
    const double end_gap = std::min(std::abs(curve.back() - single_a.back()), std::abs(curve.back() - single_b.back()));
    c.expect(end_gap <= 0.01, n + " at the sweep maximum is " + Criterion::fmt(end_gap) + " from every single curve");
    c.note(n + " " + Criterion::fmt(curve.front()) + " -> " + Criterion::fmt(curve.back()));
  }
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const auto& inf = result.at(i, 1);
    const auto& my = result.at(i, 2);
    if (!inf.model_value || !my.model_value) {
      c.expect(false, "missing model value at c = " + Criterion::fmt(costs[i]));
      continue;
    }
    const double gap = *inf.model_value - *my.model_value;
    min_gap = std::min(min_gap, gap);
    c.expect(gap >= 0.0, "myopic beats adaptive-infinite by " + Criterion::fmt(-gap) + " at c = " +
                             Criterion::fmt(costs[i]));
  }
  c.note("singles " + Criterion::fmt(single_a.front()) + " / " + Criterion::fmt(single_b.front()));
  c.note("min value gap " + Criterion::fmt(min_gap, 3));
  c.note(std::to_string(costs.size()) + " costs up to " + Criterion::fmt(costs.back()));
  return c.finish();
}

bool server_selection() {
  Criterion c(8, "server selection at 63 ms and 85 ms with threshold 0.05", 0.0);
  std::vector<double> fog, cloud;
  fog.insert(fog.end(), 8000, 50.0);
  fog.insert(fog.end(), 1500, 70.0);
  fog.insert(fog.end(), 500, 100.0);
  cloud.insert(cloud.end(), 2140, 60.0);
  cloud.insert(cloud.end(), 7337, 80.0);
  cloud.insert(cloud.end(), 523, 120.0);
  const EmpiricalCdf f(fog), g(cloud);
  const double adv63 = confidence(f, 63) - confidence(g, 63);
  const double adv85 = confidence(f, 85) - confidence(g, 85);
  c.expect(std::abs(adv63 - 0.586) < 1e-12, "advantage at 63 ms " + Criterion::fmt(adv63));
  c.expect(std::abs(adv85 - 0.0023) < 1e-12, "advantage at 85 ms " + Criterion::fmt(adv85));
  c.expect(select_server(g, f, {0, 63.0, 1.0}, 0.05) == Server::Fog, "63 ms did not pick fog");
  c.expect(select_server(g, f, {1, 85.0, 1.0}, 0.05) == Server::Cloud, "85 ms did not pick cloud");
  c.note("advantages " + Criterion::fmt(adv63) + " / " + Criterion::fmt(adv85));
  return c.finish();
}

bool mobility_estimation() {
  Criterion c(9, "mobility fixture A,A,B,B and row sums", 0.0);
  GridSpec grid;
  grid.origin_lat = 32.2319;
  grid.origin_lon = -110.9501;
  std::vector<RttSample> aabb;
  for (int i = 0; i < 4; ++i) {
    // 0.0012 degrees of longitude is about 113 m here: the next cell east.
    aabb.push_back({1546336800000 + 500LL * i, 32.2319, i < 2 ? -110.9501 : -110.9489, 1.0, 0, Server::Fog, 60.0});
  }
  const auto m = estimate_transitions(aabb, grid);
  c.expect(m.size() == 2, "fixture gave " + std::to_string(m.size()) + " states");
  if (m.size() == 2) {
    const auto a = *m.index_of(discretize(aabb[0], grid).mobility());
    const auto b = *m.index_of(discretize(aabb[3], grid).mobility());
    c.expect(m.probability(a, a) == 0.5 && m.probability(a, b) == 0.5, "row A wrong");
    c.expect(m.probability(b, b) == 1.0 && m.probability(b, a) == 0.0, "row B wrong");
  }

  std::vector<MobilityModel> models{m};
  gen::Rng rng(9009);
  GridSpec g2;
  g2.origin_lat = 32.0;
  g2.origin_lon = -111.0;
  for (int i = 0; i < 20; ++i) {
    MobilityOptions opts;
    opts.smoothing_alpha = i % 4 == 0 ? 0.0 : 0.05 * i;
    models.push_back(estimate_transitions(gen::trace(rng, 2 + i % 4, 100 + 20 * i), g2, opts));
  }
  for (const char* name : {"city-drive-2mno", "handover-corridor", "parking-garage"}) {
    const auto spec = preset(name);
    GridSpec g3;
    g3.origin_lat = spec.origin_lat - 0.01;
    g3.origin_lon = spec.origin_lon - 0.01;
    models.push_back(estimate_transitions(generate(spec, 60000), g3));
  }
  double worst = 0.0;
  for (const auto& model : models) {
    for (std::size_t i = 0; i < model.size(); ++i) {
      double sum = 0.0;
      for (double p : model.row(i)) sum += p;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  c.expect(worst <= 1e-12, "row sum off by " + Criterion::fmt(worst));
  c.note(std::to_string(models.size()) + " matrices, worst row-sum error " + Criterion::fmt(worst, 3));
  return c.finish();
}

}  // namespace

int main() {
  const std::vector<std::function<bool()>> criteria = {finite_oracle,  infinite_oracle, always_switch,
                                                       metric_axioms,  penalty_properties, calibration,
                                                       end_to_end,     server_selection, mobility_estimation};
  int failed = 0;
  for (const auto& run : criteria) {
    try {
      failed += run() ? 0 : 1;
    } catch (const std::exception& e) {
      std::printf("FAIL (exception: %s)\n", e.what());
      ++failed;
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

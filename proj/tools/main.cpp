// adaptivefog command line: trace ingestion, model fitting, policy solving
// and replay evaluation.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "adaptivefog/config.hpp"
#include "adaptivefog/errors.hpp"
#include "adaptivefog/harness.hpp"
#include "adaptivefog/latency_model.hpp"
#include "adaptivefog/mobility.hpp"
#include "adaptivefog/policy.hpp"
#include "adaptivefog/serialization.hpp"
#include "adaptivefog/synth.hpp"
#include "adaptivefog/trace_model.hpp"

namespace fs = std::filesystem;
using namespace adaptivefog;

namespace {

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  Config config;
};

fs::path out_dir(const Globals& g) {
  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::vector<RttSample> load_trace(const std::string& path, const Config& config) {
  auto parsed = read_trace_file(path);
  if (parsed.skipped_rows > 0) {
    std::cerr << "note: skipped " << parsed.skipped_rows << " malformed row(s) in " << path << "\n";
  }
  if (config.time_of_day) {
    parsed.samples = filter_time_of_day(parsed.samples, config.time_of_day->first,
                                        config.time_of_day->second);
  }
  if (parsed.samples.empty()) throw FormatError(path + ": no usable samples");
  return std::move(parsed.samples);
}

// Config origin when given, otherwise the trace's south-west corner.
GridSpec grid_for(std::span<const RttSample> samples, const Config& config) {
  GridSpec grid = config.grid;
  if (!config.grid_origin_set) {
    grid.origin_lat = std::numeric_limits<double>::infinity();
    grid.origin_lon = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      grid.origin_lat = std::min(grid.origin_lat, s.latitude);
      grid.origin_lon = std::min(grid.origin_lon, s.longitude);
    }
  }
  grid.validate();
  return grid;
}

std::shared_ptr<const LatencyModel> load_model(const std::string& path) {
  return std::make_shared<const LatencyModel>(decode<LatencyModel>(read_json_file(path)));
}

NetworkId start_network(const Config& config, const LatencyModel& model, const ServiceSet& services,
                        Server server) {
  if (config.initial_network) return *config.initial_network;
  const auto& pools = model.network_pools();
  const auto a = pools.find({0, server});
  const auto b = pools.find({1, server});
  if (a == pools.end() || b == pools.end()) return 0;
  return weighted_confidence(b->second.cdf, services) > weighted_confidence(a->second.cdf, services) ? 1 : 0;
}

Horizon horizon_of(const std::string& name, const Config& config) {
  if (name == "finite") return FiniteHorizon{config.policy.horizon_slots};
  if (name == "infinite") return InfiniteHorizon{};
  throw UsageError("--horizon must be 'finite' or 'infinite'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

// --- subcommands ---------------------------------------------------------

void run_ingest(const Globals& g, const std::string& trace) {
  auto samples = load_trace(trace, g.config);
  const auto sessions = split_sessions(samples, g.config.mobility.session_gap_ms);
  const fs::path dir = out_dir(g);
  write_trace_file(dir / "trace.csv", samples);

  Json streams = Json::array();
  std::map<std::pair<NetworkId, Server>, std::vector<double>> by_stream;
  for (const auto& s : samples) by_stream[{s.network_id, s.server}].push_back(s.rtt_ms);
  std::cout << "rows " << samples.size() << ", sessions " << sessions.size() << "\n";
  for (const auto& [key, values] : by_stream) {
    const auto st = summarize(values);
    streams.push_back({{"network", key.first},
                       {"server", to_string(key.second)},
                       {"count", st.count},
                       {"mean", st.mean},
                       {"stddev", st.stddev},
                       {"median", st.median},
                       {"p90", st.p90}});
    std::cout << "  network " << key.first << " " << to_string(key.second) << ": n=" << st.count
              << " mean=" << st.mean << " std=" << st.stddev << " median=" << st.median
              << " p90=" << st.p90 << "\n";
  }
  write_json_file(dir / "ingest.json",
                  {{"rows", samples.size()}, {"sessions", sessions.size()}, {"streams", streams}});
}

void run_fit(const Globals& g, const std::string& trace) {
  const auto samples = load_trace(trace, g.config);
  const GridSpec grid = grid_for(samples, g.config);
  const LatencyModel model = fit_model(samples, grid, g.config.fit.min_samples);
  const fs::path path = out_dir(g) / "latency_model.json";
  write_json_file(path, encode(model, g.config.fit.exact));
  std::cout << "direct " << model.direct_entries().size() << ", cell pools " << model.cell_pools().size()
            << ", network pools " << model.network_pools().size() << " -> " << path.string() << "\n";
}

void run_mobility(const Globals& g, const std::string& trace, const std::string& model_path) {
  const auto samples = load_trace(trace, g.config);
  const GridSpec grid = model_path.empty() ? grid_for(samples, g.config) : load_model(model_path)->grid();
  const MobilityModel mobility = estimate_transitions(samples, grid, g.config.mobility);
  const fs::path path = out_dir(g) / "mobility_model.json";
  write_json_file(path, encode(mobility));
  std::cout << mobility.size() << " mobility states -> " << path.string() << "\n";
}

SwitchProblem problem_from(const Globals& g, const std::string& model_path, const std::string& mobility_path,
                           Horizon horizon, std::optional<SwitchCost> cost = std::nullopt) {
  return make_switch_problem(decode<MobilityModel>(read_json_file(mobility_path)), load_model(model_path),
                             g.config.services, cost.value_or(g.config.policy.cost), g.config.policy.discount,
                             horizon, g.config.policy.server);
}

void run_kr(const Globals& g, const std::string& model_path, const std::string& mobility_path) {
  const SwitchProblem problem = problem_from(g, model_path, mobility_path, InfiniteHorizon{});
  const ProblemTables t = tabulate(problem);
  std::ostringstream csv;
  csv.precision(12);
  csv << "cell_x,cell_y,speed_bin,confidence_0,confidence_1,kr_0_vs_1,penalty_onto_0,penalty_onto_1\n";
  const auto states = problem.mobility.states();
  for (std::size_t m = 0; m < states.size(); ++m) {
    csv << states[m].cell.x << ',' << states[m].cell.y << ',' << states[m].speed_bin << ','
        << t.confidence[m][0] << ',' << t.confidence[m][1] << ',' << t.kr[m][0] << ',' << t.penalty[m][0]
        << ',' << t.penalty[m][1] << '\n';
  }
  const fs::path path = out_dir(g) / "kr.csv";
  write_text(path, csv.str());
  std::cout << states.size() << " states -> " << path.string() << "\n";
}

void run_solve(const Globals& g, const std::string& horizon, const std::string& model_path,
               const std::string& mobility_path, std::optional<double> cost_value) {
  std::optional<SwitchCost> cost;
  if (cost_value) cost = SwitchCost{g.config.policy.cost.mode, *cost_value};
  const SwitchProblem problem = problem_from(g, model_path, mobility_path, horizon_of(horizon, g.config), cost);
  const SwitchPolicy policy = std::holds_alternative<FiniteHorizon>(problem.horizon)
                                  ? solve_finite(problem)
                                  : solve_infinite(problem, g.config.policy.solver);
  const fs::path path = out_dir(g) / "policy.json";
  write_json_file(path, encode(policy));
  std::size_t switching = 0;
  for (const auto& a : policy.actions.front()) switching += a[0] + a[1];
  std::cout << policy.stats.solver << ": " << policy.stats.iterations << " iterations, residual "
            << policy.stats.residual << ", " << switching << " switching (state, network) pairs -> "
            << path.string() << "\n";
}

void run_replay(const Globals& g, const std::string& policy_path, const std::string& model_path,
                const std::string& mobility_path, const std::string& trace) {
  const SwitchPolicy policy = decode<SwitchPolicy>(read_json_file(policy_path));
  const Horizon horizon = policy.kind == PolicyKind::Finite
                              ? Horizon{FiniteHorizon{static_cast<int>(policy.slot_count())}}
                              : Horizon{InfiniteHorizon{}};
  auto model = load_model(model_path);
  const SwitchProblem problem =
      make_switch_problem(decode<MobilityModel>(read_json_file(mobility_path)), model, policy.services,
                          policy.cost, policy.discount, horizon, policy.server);
  if (policy.states.size() != problem.mobility.size() ||
      !std::equal(policy.states.begin(), policy.states.end(), problem.mobility.states().begin())) {
    throw UsageError("policy and mobility model have different state spaces");
  }
  const auto samples = load_trace(trace, g.config);
  AlignOptions align{g.config.mobility.slot_ms, g.config.mobility.session_gap_ms, policy.server, g.seed};
  const auto slots = align_slots(samples, model->grid(), align, model.get());
  const NetworkId start = start_network(g.config, *model, policy.services, policy.server);
  const PolicyReplay r = replay(policy, slots, problem, {start, fs::path(policy_path).stem().string()});
  const fs::path path = out_dir(g) / "replay.json";
  write_json_file(path, encode(r));
  std::cout << "slots " << r.slots << ", weighted confidence " << r.weighted_confidence << ", switches "
            << r.switches << ", penalty " << r.penalty_paid << " -> " << path.string() << "\n";
}

void run_sweep(const Globals& g, const std::string& trace, std::vector<double> costs) {
  const auto samples = load_trace(trace, g.config);
  const GridSpec grid = grid_for(samples, g.config);
  const auto split = split_train_test(samples, g.config.mobility.session_gap_ms, g.config.train_fraction);
  auto model = std::make_shared<const LatencyModel>(fit_model(split.train, grid, g.config.fit.min_samples));

  SweepSetup setup;
  setup.mobility = estimate_transitions(split.train, grid, g.config.mobility);
  setup.latency = model;
  setup.services = g.config.services;
  setup.cost_mode = g.config.policy.cost.mode;
  setup.discount = g.config.policy.discount;
  setup.horizon_slots = g.config.policy.horizon_slots;
  setup.server = g.config.policy.server;
  setup.initial_network = start_network(g.config, *model, setup.services, setup.server);
  setup.solver = g.config.policy.solver;

  if (costs.empty()) costs = g.config.sweep.costs;
  if (costs.empty()) {
    const double max_cost = g.config.sweep.max_cost.value_or(
        prohibitive_cost(setup.services, setup.discount, setup.horizon_slots));
    costs = cost_grid(max_cost, g.config.sweep.points);
  }
  AlignOptions align{g.config.mobility.slot_ms, g.config.mobility.session_gap_ms, setup.server, g.seed};
  const auto slots = align_slots(split.test, grid, align, model.get());
  const SweepResult result = cost_sweep(setup, costs, slots);
  const fs::path dir = out_dir(g);
  report(result, dir);
  std::cout << "train sessions " << split.train_sessions << ", test sessions " << split.test_sessions
            << ", mobility states " << setup.mobility.size() << ", start network " << setup.initial_network
            << ", test slots " << slots.size() << "\n"
            << summary_table(SweepResult{result.services, {result.costs.front()}, result.policies,
                                         result.cost_mode,
                                         {result.entries.begin(),
                                          result.entries.begin() + static_cast<std::ptrdiff_t>(result.policies.size())}})
            << "wrote results.json, curves.csv, summary.txt to " << dir.string() << "\n";
}

void run_synth(const Globals& g, const std::string& preset_name, const std::string& spec_path,
               std::int64_t samples, bool seed_given) {
  if (preset_name.empty() == spec_path.empty()) throw UsageError("synth needs exactly one of --preset / --spec");
  ScenarioSpec spec = spec_path.empty() ? preset(preset_name) : decode<ScenarioSpec>(read_json_file(spec_path));
  if (seed_given) spec.seed = g.seed;
  const auto trace = generate(spec, samples);
  const fs::path path = g.out.empty() ? fs::path(spec.name.empty() ? "trace.csv" : spec.name + ".csv")
                                      : fs::path(g.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_trace_file(path, trace);
  std::cout << trace.size() << " samples (" << spec.name << ", seed " << spec.seed << ") -> " << path.string()
            << "\n";
}

void run_report(const Globals& g, const std::string& results_path) {
  const SweepResult result = decode<SweepResult>(read_json_file(results_path));
  const fs::path dir = out_dir(g);
  report(result, dir);
  std::cout << summary_table(result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-switching policies for vehicular fog computing over two mobile networks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for every random stream");
  app.add_option("--out", g.out, "Output directory (output file for synth)");

  std::string trace, model, mobility, policy, horizon, preset_name, spec_path, results;
  std::optional<double> cost;
  std::vector<double> costs;
  std::int64_t samples = 100000;

  auto* ingest = app.add_subcommand("ingest", "Validate a trace CSV and summarize its streams");
  ingest->add_option("--trace", trace, "Trace CSV")->required();

  auto* fit = app.add_subcommand("fit", "Fit per-state latency CDFs");
  fit->add_option("--trace", trace, "Trace CSV")->required();

  auto* mob = app.add_subcommand("mobility", "Estimate the driving Markov chain");
  mob->add_option("--trace", trace, "Trace CSV")->required();
  mob->add_option("--model", model, "Latency model whose grid to reuse");
  std::optional<std::int64_t> slot_ms;
  std::optional<double> smoothing_alpha, session_gap_s;
  mob->add_option("--slot-ms", slot_ms, "Slot duration (ms)");
  mob->add_option("--smoothing-alpha", smoothing_alpha, "Pseudo-count added toward observed states");
  mob->add_option("--session-gap-s", session_gap_s, "Gap that starts a new session (s)");

  auto* kr = app.add_subcommand("kr", "Tabulate confidences and K per mobility state");
  kr->add_option("--model", model, "Latency model JSON")->required();
  kr->add_option("--mobility", mobility, "Mobility model JSON")->required();

  auto* solve = app.add_subcommand("solve", "Solve the switching MDP");
  solve->add_option("--horizon", horizon, "finite or infinite")
      ->required()
      ->check(CLI::IsMember({"finite", "infinite"}));
  solve->add_option("--model", model, "Latency model JSON")->required();
  solve->add_option("--mobility", mobility, "Mobility model JSON")->required();
  solve->add_option("--cost", cost, "Switch cost (overrides the config value)");

  auto* rep = app.add_subcommand("replay", "Replay a policy over a trace");
  rep->add_option("--policy", policy, "Policy JSON")->required();
  rep->add_option("--model", model, "Latency model JSON")->required();
  rep->add_option("--mobility", mobility, "Mobility model JSON")->required();
  rep->add_option("--trace", trace, "Evaluation trace CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "Train/test split, then sweep switching costs over all policies");
  sweep->add_option("--trace", trace, "Trace CSV")->required();
  sweep->add_option("--costs", costs, "Explicit ascending cost list");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic trace");
  synth->add_option("--preset", preset_name, "fixed-lab, city-drive-2mno, parking-garage, handover-corridor");
  synth->add_option("--spec", spec_path, "Scenario JSON")->check(CLI::ExistingFile);
  synth->add_option("--samples", samples, "Rows to emit")->check(CLI::PositiveNumber);

  auto* rpt = app.add_subcommand("report", "Re-emit report files from results.json");
  rpt->add_option("--results", results, "results.json from sweep")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!g.config_path.empty()) g.config = load_config(g.config_path);
    if (slot_ms) g.config.mobility.slot_ms = *slot_ms;
    if (smoothing_alpha) g.config.mobility.smoothing_alpha = *smoothing_alpha;
    if (session_gap_s) g.config.mobility.session_gap_ms = static_cast<std::int64_t>(*session_gap_s * 1000.0);
    g.config.mobility.validate();
    if (*ingest) run_ingest(g, trace);
    if (*fit) run_fit(g, trace);
    if (*mob) run_mobility(g, trace, model);
    if (*kr) run_kr(g, model, mobility);
    if (*solve) run_solve(g, horizon, model, mobility, cost);
    if (*rep) run_replay(g, policy, model, mobility, trace);
    if (*sweep) run_sweep(g, trace, costs);
    if (*synth) run_synth(g, preset_name, spec_path, samples, seed_opt->count() > 0);
    if (*rpt) run_report(g, results);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

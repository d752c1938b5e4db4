#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "adaptivefog/config.hpp"
#include "adaptivefog/errors.hpp"
#include "adaptivefog/serialization.hpp"
#include "generators.hpp"

using namespace adaptivefog;

namespace {

GridSpec grid() {
  GridSpec g;
  g.origin_lat = 32.0;
  g.origin_lon = -111.0;
  return g;
}

}  // namespace

TEST(Json, SmallTypesRoundTrip) {
  GridSpec g = grid();
  g.cell_size_m = 75.0;
  EXPECT_EQ(decode<GridSpec>(encode(g)), g);
  const ServiceSet s({{3, 80.0, 0.25}, {7, 140.0, 0.5}});
  const auto back = decode<ServiceSet>(encode(s));
  EXPECT_TRUE(std::equal(back.begin(), back.end(), s.begin(), s.end()));
  for (const auto& c : {SwitchCost::scalar(0.125), SwitchCost::cdf_shift(20.0)}) {
    EXPECT_EQ(decode<SwitchCost>(encode(c)), c);
  }
}

TEST(Json, LatencyModelRoundTrip) {
  gen::Rng rng(61);
  const auto xs = gen::trace(rng, 3, 200);
  const auto model = fit_model(xs, grid(), 20);
  const auto back = decode<LatencyModel>(encode(model));
  EXPECT_EQ(back.grid(), model.grid());
  EXPECT_EQ(back.min_samples(), model.min_samples());
  ASSERT_EQ(back.direct_entries().size(), model.direct_entries().size());
  for (const auto& [key, entry] : model.direct_entries()) {
    EXPECT_TRUE(back.direct_entries().at(key).cdf == entry.cdf);
  }
  EXPECT_EQ(back.network_pools().size(), model.network_pools().size());
}

TEST(Json, SketchKeepsCountsAndQuantiles) {
  gen::Rng rng(62);
  const auto xs = gen::trace(rng, 4, 600);
  const auto model = fit_model(xs, grid(), 20);
  const auto back = decode<LatencyModel>(encode(model, false));
  for (const auto& [key, entry] : model.network_pools()) {
    const auto& b = back.network_pools().at(key);
    EXPECT_EQ(b.sample_count, entry.sample_count);
    EXPECT_LE(b.cdf.sample_count(), kSketchPoints);
    EXPECT_NEAR(b.cdf.quantile(0.5), entry.cdf.quantile(0.5), 2.0);
  }
}

TEST(Json, MobilityAndPolicyRoundTrip) {
  gen::Rng rng(63);
  const auto p = gen::problem(rng, {.states = 4, .horizon = FiniteHorizon{3}});
  const auto m = decode<MobilityModel>(encode(p.mobility));
  EXPECT_TRUE(std::equal(m.matrix().begin(), m.matrix().end(), p.mobility.matrix().begin()));
  EXPECT_TRUE(std::equal(m.states().begin(), m.states().end(), p.mobility.states().begin()));
  const auto pol = solve_finite(p);
  const auto back = decode<SwitchPolicy>(encode(pol));
  EXPECT_EQ(back.kind, pol.kind);
  EXPECT_EQ(back.actions, pol.actions);
  EXPECT_EQ(back.delta, pol.delta);
  EXPECT_EQ(back.value, pol.value);
  EXPECT_EQ(back.cost, pol.cost);
  EXPECT_EQ(back.stats.solver, pol.stats.solver);
}

TEST(Json, ScenarioRoundTrip) {
  for (const auto& [name, spec] : preset_scenarios()) {
    const auto back = decode<ScenarioSpec>(encode(spec));
    std::ostringstream a, b;
    serialize_trace(a, generate(spec, 400));
    serialize_trace(b, generate(back, 400));
    EXPECT_EQ(a.str(), b.str()) << name;
  }
}

TEST(Json, MalformedDocumentsAreFormatErrors) {
  EXPECT_THROW(decode<GridSpec>(Json::parse(R"({"cell_size_m": "big"})")), FormatError);
  EXPECT_THROW(decode<MobilityModel>(Json::parse(R"({"format": "switch_policy", "version": 1})")), FormatError);
  auto doc = encode(MobilityModel({{{0, 0}, 0}}, {1.0}, 500));
  doc["version"] = 99;
  EXPECT_THROW(decode<MobilityModel>(doc), FormatError);
  doc = encode(MobilityModel({{{0, 0}, 0}}, {1.0}, 500));
  doc["transitions"] = {0.5};
  EXPECT_THROW(decode<MobilityModel>(doc), FormatError);
  EXPECT_THROW(decode<ServiceSet>(Json::array()), FormatError);
}

TEST(JsonFile, Errors) {
  EXPECT_THROW(read_json_file("/nonexistent/x.json"), IoError);
  const auto path = std::filesystem::temp_directory_path() / "adaptivefog_bad.json";
  std::ofstream(path) << "{not json";
  EXPECT_THROW(read_json_file(path), FormatError);
}

TEST(Config, DefaultsAndOverrides) {
  const auto c = config_from_json(Json::object());
  EXPECT_EQ(c.policy.discount, 0.9);
  EXPECT_EQ(c.sweep.points, 21);
  EXPECT_EQ(c.services.size(), 3u);
  EXPECT_FALSE(c.grid_origin_set);

  const auto d = config_from_json(Json::parse(R"({
    "grid": {"origin_lat": 32.2, "origin_lon": -110.9, "cell_size_m": 50},
    "services": [{"id": 0, "max_latency_ms": 90, "weight": 1.0}],
    "mobility": {"slot_ms": 1000, "smoothing_alpha": 0.5, "session_gap_s": 10, "time_of_day": [7, 19]},
    "policy": {"server": "cloud", "discount": 0.8, "switch_cost": {"mode": "cdf-shift", "value": 15},
               "method": "delta-fixed-point"},
    "sweep": {"points": 5, "max_cost": 2.0},
    "initial_network": 1
  })"));
  EXPECT_TRUE(d.grid_origin_set);
  EXPECT_EQ(d.grid.cell_size_m, 50.0);
  EXPECT_EQ(d.mobility.slot_ms, 1000);
  EXPECT_EQ(d.mobility.session_gap_ms, 10000);
  EXPECT_EQ(d.time_of_day, (std::pair{7, 19}));
  EXPECT_EQ(d.policy.server, Server::Cloud);
  EXPECT_EQ(d.policy.cost, SwitchCost::cdf_shift(15.0));
  EXPECT_EQ(d.policy.solver.method, InfiniteOptions::Method::DeltaFixedPoint);
  EXPECT_EQ(d.sweep.max_cost, 2.0);
  EXPECT_EQ(d.initial_network, 1u);

  const auto again = config_from_json(encode(d));
  EXPECT_EQ(encode(again), encode(d));
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {
           R"({"unknown": 1})",
           R"({"grid": {"cell_size": 10}})",
           R"({"grid": {"origin_lat": 32}})",
           R"({"policy": {"discount": 1.0}})",
           R"({"policy": {"server": "edge"}})",
           R"({"policy": {"method": "guess"}})",
           R"({"policy": {"switch_cost": {"mode": "scalar", "value": -1}}})",
           R"({"mobility": {"slot_ms": 0}})",
           R"({"services": []})",
           R"({"train_fraction": 1.5})",
           R"({"initial_network": 2})",
           R"({"sweep": {"points": "many"}})",
       }) {
    EXPECT_THROW(config_from_json(Json::parse(text)), ConfigError) << text;
  }
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

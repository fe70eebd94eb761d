#include <doctest.h>

#include <stdexcept>

#include "dse/codesign.hpp"
#include "dse/errors.hpp"
#include "fixtures.hpp"

using namespace dse;

TEST_CASE("deployment rates and attribution on a scripted trace") {
  auto rep = analyze_codesign(fx::scripted_trace());
  CHECK(rep.iterations == 20);
  CHECK(rep.convergence_rate == doctest::Approx(1.9 / 20));

  CHECK(rep.at("metric").switches == 1);
  CHECK(rep.at("metric").deployment_rate == doctest::Approx(1.0 / 19));
  CHECK(rep.at("metric").convergence_attribution == doctest::Approx(0.10));

  CHECK(rep.at("workload").switches == 19);
  CHECK(rep.at("workload").deployment_rate == doctest::Approx(1.0));
  CHECK(rep.at("workload").convergence_attribution == doctest::Approx(0.10));

  CHECK(rep.at("high_level").switches == 4);
  CHECK(rep.at("high_level").deployment_rate == doctest::Approx(4.0 / 19));
  CHECK(rep.at("high_level").convergence_attribution == doctest::Approx(0.10));

  CHECK(rep.at("low_level").switches == 2);
  CHECK(rep.at("low_level").deployment_rate == doctest::Approx(2.0 / 19));
  CHECK(rep.at("low_level").convergence_attribution == doctest::Approx(0.06));

  CHECK(rep.at("boundedness").switches == 1);
  CHECK(rep.at("boundedness").convergence_attribution == doctest::Approx(0.15));
  CHECK_THROWS_AS(rep.at("color"), std::out_of_range);
}

TEST_CASE("focus along each vector") {
  auto t = fx::scripted_trace();
  CHECK(focus_of(t.records[0], "metric") == t.records[0].metric.label());
  CHECK(focus_of(t.records[12], "high_level") == "customization");
  CHECK(focus_of(t.records[16], "boundedness") == "communication");
  CHECK_THROWS_AS(focus_of(t.records[0], "color"), std::out_of_range);
}

TEST_CASE("short traces") {
  ExplorationTrace t;
  CHECK_THROWS_AS(analyze_codesign(t), EmptyTraceError);
  t.initial_distance = 1.0;
  t.records.push_back({});
  t.records.back().accepted_distance = 0.5;
  auto rep = analyze_codesign(t);
  CHECK(rep.convergence_rate == doctest::Approx(0.5));
  for (const auto& v : rep.vectors) {
    CHECK(v.switches == 0);
    CHECK(v.deployment_rate == 0.0);
  }
}

TEST_CASE("a real exploration trace can be analyzed") {
  auto db = fx::round_db();
  WorkloadSet w{fx::diamond("d", 1e6, 1e4)};
  Budget b;
  b.latency_s["d"] = 1e-3;
  b.power_w = 1;
  b.area_mm2 = 100;
  ExplorerConfig cfg;
  cfg.max_iterations = 30;
  auto r = anneal(w, db, b, cfg);
  auto rep = analyze_codesign(r.trace);
  CHECK(rep.vectors.size() == kCodesignVectors.size());
  for (const auto& v : rep.vectors) {
    CHECK(v.deployment_rate >= 0.0);
    CHECK(v.deployment_rate <= 1.0);
  }
}

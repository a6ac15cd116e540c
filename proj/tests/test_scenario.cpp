#include "zkmixer/error.hpp"
#include "zkmixer/scenario.hpp"

#include <gtest/gtest.h>

#include "test_helpers.hpp"

using namespace zkmixer;
using testutil::error_code;

namespace {

ScenarioScript bundled(std::string_view name) { return load_scenario(*bundled_scenario_source(name)); }

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool has_event(const Report& r, std::string_view op, std::string_view actor, std::string_view outcome = "ok") {
  for (const auto& e : r.events.records()) {
    if (e.operation == op && e.actor == actor && e.outcome == outcome) return true;
  }
  return false;
}

}  // namespace

TEST(Scenario, BundledScenariosMeetTheirExpectations) {
  ASSERT_EQ(bundled_scenarios().size(), 12u);
  for (const auto& b : bundled_scenarios()) {
    auto script = load_scenario(b.source);
    EXPECT_EQ(script.name, b.name);
    auto report = run_scenario(script);
    EXPECT_TRUE(report.invariants_hold()) << b.name;
    EXPECT_TRUE(report.expectation_met()) << b.name << " got " << to_string(report.attack.verdict) << "/"
                                          << report.attack.stage;
  }
}

TEST(Scenario, FilesMatchEmbeddedCopies) {
  for (const auto& b : bundled_scenarios()) {
    auto text = testutil::read_file(std::string(ZKMIXER_SCENARIOS) + "/" + std::string(b.name) + ".scenario");
    EXPECT_EQ(text, b.source) << b.name;
  }
}

TEST(Scenario, SuccessfulLifecycleCost) {
  auto r = run_scenario(bundled("fig5_success"));
  ASSERT_EQ(r.lifecycle.size(), 1u);
  const auto& path = r.lifecycle[0].path;
  ASSERT_EQ(path.size(), 2u);
  EXPECT_EQ(path[0].first, DepositState::Pending);
  EXPECT_EQ(path[1].first, DepositState::Admitted);
  EXPECT_EQ(r.cost.total_gas, 102'299u + 452'440u + 279'198u);
  EXPECT_EQ(format_usd(r.cost.total_cents), "$1.67");
}

TEST(Scenario, RefundAndConfiscationPaths) {
  auto refund = run_scenario(bundled("fig7_refund"));
  auto confiscate = run_scenario(bundled("fig8_confiscate"));
  auto last_state = [](const Report& r, const std::string& who) {
    for (const auto& row : r.lifecycle) {
      if (row.depositor.str() == who) return row.path.back().first;
    }
    return DepositState::Pending;
  };
  EXPECT_EQ(last_state(refund, "mallory"), DepositState::Refunded);
  EXPECT_EQ(last_state(confiscate, "mallory"), DepositState::Confiscated);
  EXPECT_EQ(confiscate.final_balances.at(AccountId("exchange")), 1u);
}

TEST(Scenario, BaselineEventSequence) {
  auto r = run_scenario(bundled("fig3_poi_bypass"));
  EXPECT_EQ(r.attack.verdict, AttackVerdict::AttackSucceeded);
  EXPECT_TRUE(r.attack.poi_valid);
  EXPECT_EQ(r.attack.hops_completed, 2u);
  EXPECT_TRUE(has_event(r, "tag.report", "oracle"));
  EXPECT_TRUE(has_event(r, "plain.deposit", "m1"));
  EXPECT_TRUE(has_event(r, "poi.list_add", "screener"));
  EXPECT_TRUE(has_event(r, "poi.check", r.attack.terminal_account));
  EXPECT_GT(r.attack.terminal_taint, 0);

  auto blocked = run_scenario(bundled("fig3_poi_scenario1"));
  EXPECT_EQ(blocked.attack.verdict, AttackVerdict::AttackBlocked);
  EXPECT_EQ(blocked.attack.stage, "ComplianceCheck");
}

TEST(Scenario, PairedRunOnlySwapsMixerAndVerifiers) {
  auto base = bundled("fig3_poi_bypass");
  auto defended = base;
  defended.plain_mixer.reset();
  MixerConfig zk;
  zk.mode = MixerMode::MovingAverage;
  zk.min_delay = 10;
  zk.period_length = 5;
  zk.window = 3;
  defended.zk_mixer = zk;
  ConsensusSpec cs;
  cs.manager = AccountId("operator");
  std::vector<ActorSpec> actors;
  for (const auto& a : base.actors) {
    if (a.strategy != "screening_verifier") actors.push_back(a);
  }
  for (int i = 1; i <= 3; ++i) {
    ActorSpec v{AccountId("verifier" + std::to_string(i)), "screening_verifier", {{"detection_latency", 2}}};
    cs.verifiers.push_back(v.id);
    actors.push_back(v);
  }
  defended.actors = actors;
  defended.consensus = cs;
  defended.expect.reset();

  auto b = run_scenario(base);
  auto d = run_scenario(defended);
  EXPECT_EQ(b.attack.verdict, AttackVerdict::AttackSucceeded);
  EXPECT_EQ(d.attack.verdict, AttackVerdict::AttackBlocked);
  EXPECT_EQ(d.attack.stage, "FirstDeposit");
  EXPECT_EQ(d.tree_escrow_taint, 0);
  EXPECT_TRUE(d.invariants_hold());
}

TEST(Scenario, SameSeedSameDigest) {
  for (auto name : {"zk_attack_defended", "burst_freeze", "fig3_poi_bypass"}) {
    auto s = bundled(name);
    EXPECT_EQ(run_scenario(s).digest_hex(), run_scenario(s).digest_hex()) << name;
  }
}

TEST(Scenario, NoLaunderersMeansNotApplicable) {
  auto r = run_scenario(bundled("fig6_consensus_approval"));
  EXPECT_EQ(r.attack.verdict, AttackVerdict::NotApplicable);
}

TEST(Scenario, ReportJsonShape) {
  auto r = run_scenario(bundled("fig5_success"));
  auto j = r.to_json();
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["scenario"], "fig5_success");
  EXPECT_EQ(j["events"]["count"], r.events.size());
  EXPECT_EQ(j["events"]["digest"], r.events.digest_hex());
  EXPECT_EQ(j["attack"]["verdict"], "NotApplicable");
  EXPECT_TRUE(j["invariants"].is_array());
  EXPECT_FALSE(r.summary_table().empty());
}

TEST(Scenario, RoundTripsThroughJson) {
  for (const auto& b : bundled_scenarios()) {
    auto s = load_scenario(b.source);
    auto again = load_scenario(scenario_to_json(s).dump());
    EXPECT_EQ(run_scenario(s).digest_hex(), run_scenario(again).digest_hex()) << b.name;
  }
}

TEST(ScenarioLoad, ParseErrorsCarryPosition) {
  auto msg = error_text([] { load_scenario("{\n  \"name\": \"x\",\n  oops\n}"); });
  EXPECT_NE(msg.find("ParseError"), std::string::npos) << msg;
  EXPECT_NE(msg.find("3:"), std::string::npos) << msg;
  EXPECT_EQ(error_code([] { load_scenario("[1,2"); }), Errc::ParseError);
}

TEST(ScenarioLoad, ValidationNamesTheField) {
  auto base = scenario_to_json(bundled("fig5_success"));

  auto unknown = base;
  unknown["actors"][0]["strategy"] = "time_traveller";
  auto msg = error_text([&] { load_scenario(unknown.dump()); });
  EXPECT_EQ(error_code([&] { load_scenario(unknown.dump()); }), Errc::ValidationError);
  EXPECT_NE(msg.find("time_traveller"), std::string::npos) << msg;

  auto late = base;
  late["schedule"] = nlohmann::ordered_json::array(
      {{{"tick", 10'000}, {"actor", "alice"}, {"action", "transfer"}, {"args", {{"to", "bob"}, {"amount", 1}}}}});
  msg = error_text([&] { load_scenario(late.dump()); });
  EXPECT_EQ(error_code([&] { load_scenario(late.dump()); }), Errc::ValidationError);
  EXPECT_NE(msg.find("schedule"), std::string::npos) << msg;

  auto extra = base;
  extra["chain"]["colour"] = "blue";
  msg = error_text([&] { load_scenario(extra.dump()); });
  EXPECT_NE(msg.find("chain.colour"), std::string::npos) << msg;

  auto version = base;
  version["schema_version"] = 99;
  EXPECT_EQ(error_code([&] { load_scenario(version.dump()); }), Errc::ValidationError);

  auto params = base;
  params["actors"][0]["params"]["hops"] = 2;
  EXPECT_EQ(error_code([&] { load_scenario(params.dump()); }), Errc::ValidationError);
}

TEST(ScenarioLoad, MissingFileNamesThePath) {
  auto msg = error_text([] { load_scenario_file("/nonexistent/x.scenario"); });
  EXPECT_NE(msg.find("/nonexistent/x.scenario"), std::string::npos) << msg;
}

TEST(ScenarioRun, FaultInjectionTripsConservation) {
  auto r = run_scenario(load_scenario_file(std::string(ZKMIXER_FIXTURES) + "/fault_mint.scenario"));
  EXPECT_FALSE(r.invariants_hold());
  ASSERT_NE(r.invariant("supply_conserved"), nullptr);
  EXPECT_FALSE(r.invariant("supply_conserved")->passed);
}

TEST(ScenarioRun, RandomScenariosKeepInvariants) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto s = make_random_scenario(seed);
    auto a = run_scenario(s);
    EXPECT_TRUE(a.invariants_hold()) << "seed " << seed;
    EXPECT_EQ(a.digest_hex(), run_scenario(s).digest_hex()) << "seed " << seed;
  }
}

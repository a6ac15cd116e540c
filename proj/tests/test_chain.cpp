#include "zkmixer/chain.hpp"
#include "zkmixer/error.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "test_helpers.hpp"

using namespace zkmixer;

namespace {

using testutil::error_code;

std::string usd(std::uint64_t gas) { return format_usd(usd_cents_for_gas(gas, GasPrices{})); }

}  // namespace

TEST(Gas, OperationTariffInDollars) {
  const auto t = GasTariff::operations();
  const std::vector<std::tuple<std::string, std::uint64_t, std::string>> rows{
      {"Deposit", 102'299, "$0.20"},       {"Withdraw", 279'198, "$0.56"}, {"Approve", 452'440, "$0.90"},
      {"Remove Verifier", 31'106, "$0.06"}, {"Tally", 50'295, "$0.10"},     {"Vote", 52'521, "$0.11"},
      {"Add Verifier", 53'039, "$0.11"},    {"Propose", 154'033, "$0.31"}};
  ASSERT_EQ(t.entries.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [name, gas, dollars] = rows[i];
    EXPECT_EQ(t.entries[i].first, name);
    EXPECT_EQ(t.entries[i].second, gas);
    EXPECT_EQ(usd(gas), dollars) << name;
  }
}

TEST(Gas, DeploymentTableAndTotal) {
  auto report = static_cost_table(GasTariff::deployment(), GasPrices{});
  const std::vector<std::tuple<std::string, std::uint64_t, std::string>> rows{{"Groth16Verifier", 428'190, "$0.86"},
                                                                              {"multiSig", 1'669'860, "$3.34"},
                                                                              {"zkMixer", 3'265'751, "$6.53"},
                                                                              {"PoseidonT3", 5'245'573, "$10.49"}};
  ASSERT_EQ(report.lines.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(report.lines[i].item, std::get<0>(rows[i]));
    EXPECT_EQ(report.lines[i].gas, std::get<1>(rows[i]));
    EXPECT_EQ(format_usd(report.lines[i].cents), std::get<2>(rows[i]));
  }
  EXPECT_EQ(report.total_gas, 10'609'374u);
  EXPECT_EQ(format_usd(report.total_cents), "$21.22");
}

TEST(Gas, CentRoundingIsHalfUp) {
  // 2500 gas at 1 Gwei and $2000 is exactly half a cent
  EXPECT_EQ(usd_cents_for_gas(2'500, GasPrices{}), 1u);
  EXPECT_EQ(usd_cents_for_gas(2'499, GasPrices{}), 0u);
  EXPECT_EQ(usd_cents_for_gas(0, GasPrices{}), 0u);
  auto p = GasPrices::from_decimal(20, 3000.5);
  EXPECT_EQ(p.gas_price_wei, 20'000'000'000u);
  EXPECT_EQ(p.eth_usd_cents, 300'050u);
  EXPECT_EQ(format_usd(123456), "$1234.56");
  EXPECT_EQ(format_usd(5), "$0.05");
}

TEST(Gas, MeterAccumulatesInTariffOrder) {
  GasMeter m;
  m.charge(op::kWithdraw);
  m.charge(op::kDeposit);
  m.charge(op::kDeposit);
  EXPECT_EQ(error_code([&] { m.charge("Teleport"); }), Errc::UnknownOperation);
  auto r = m.report();
  ASSERT_EQ(r.lines.size(), 2u);
  EXPECT_EQ(r.lines[0].item, "Deposit");
  EXPECT_EQ(r.lines[0].count, 2u);
  EXPECT_EQ(r.lines[0].gas, 204'598u);
  EXPECT_EQ(r.total_gas, 2 * 102'299u + 279'198u);
  EXPECT_EQ(m.total_gas(), r.total_gas);
}

TEST(SimChain, TransfersAreAtomic) {
  SimChain c;
  c.create_account(AccountId("a"), 10);
  c.create_account(AccountId("b"), 0);
  c.transfer(AccountId("a"), AccountId("b"), 4, "a");
  EXPECT_EQ(c.balance(AccountId("a")), 6u);
  EXPECT_EQ(c.balance(AccountId("b")), 4u);
  EXPECT_EQ(error_code([&] { c.transfer(AccountId("a"), AccountId("b"), 7, "a"); }), Errc::InsufficientFunds);
  EXPECT_EQ(c.balance(AccountId("a")), 6u);
  EXPECT_EQ(c.balance(AccountId("b")), 4u);
  c.transfer(AccountId("b"), AccountId("new"), 1, "b");
  EXPECT_EQ(c.balance(AccountId("new")), 1u);
  EXPECT_EQ(c.total_supply(), 10u);
  EXPECT_EQ(c.genesis_supply(), 10u);
  EXPECT_EQ(error_code([&] { c.balance(AccountId("ghost")); }), Errc::NoSuchAccount);
  EXPECT_EQ(error_code([&] { c.create_account(AccountId("a"), 1); }), Errc::ValidationError);
}

TEST(SimChain, TicksOnlyMoveForward) {
  SimChain c;
  c.advance_to(3);
  c.advance_to(3);
  EXPECT_EQ(error_code([&] { c.advance_to(2); }), Errc::NonMonotonicTick);
  EXPECT_EQ(c.tick(), 3u);
}

TEST(SimChain, ObserversSeeTransfers) {
  SimChain c;
  c.create_account(AccountId("a"), 5);
  std::vector<Transfer> seen;
  c.subscribe([&](const Transfer& t) { seen.push_back(t); });
  c.transfer(AccountId("a"), AccountId("b"), 2, "a");
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].from_balance_before, 5u);
  EXPECT_EQ(seen[0].amount, 2u);
}

TEST(SimChain, FaultMintBreaksConservation) {
  SimChain c;
  c.create_account(AccountId("a"), 5);
  c.inject_fault_mint(AccountId("a"), 3);
  EXPECT_EQ(c.total_supply(), 8u);
  EXPECT_EQ(c.genesis_supply(), 5u);
}

TEST(EventLog, DeterministicDigestAndJsonShape) {
  auto build = [] {
    SimChain c;
    c.create_account(AccountId("a"), 5);
    c.advance_to(1);
    c.transfer(AccountId("a"), AccountId("b"), 1, "a");
    c.log("a", "custom", {{"k", "v"}}, "WrongState");
    return c.events();
  };
  auto x = build(), y = build();
  EXPECT_EQ(x.digest_hex(), y.digest_hex());
  EXPECT_EQ(x.to_jsonl(), y.to_jsonl());
  ASSERT_EQ(x.size(), 2u);
  auto j = nlohmann::json::parse(x.records()[1].to_json_line());
  EXPECT_EQ(j["tick"], 1);
  EXPECT_EQ(j["operation"], "custom");
  EXPECT_EQ(j["outcome"], "WrongState");
  EXPECT_EQ(j["params"]["k"], "v");
  EXPECT_FALSE(x.records()[1].ok());
  EXPECT_EQ(x.records()[1].params_digest().size(), 32u);

  EventLog other = x;
  other.append(Event{2, "z", "noop", {}, "ok"});
  EXPECT_NE(other.digest_hex(), x.digest_hex());
}

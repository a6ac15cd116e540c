#pragma once

#include "zkmixer/chain.hpp"
#include "zkmixer/consensus.hpp"
#include "zkmixer/mixer.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zkmixer {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

struct AccountSpec {
  AccountId id;
  Amount balance = 0;
  std::optional<std::string> taint;  // origin label for the whole balance
};

struct ChainSpec {
  GasPrices prices;
  Tick ticks_per_hour = 1;
  std::vector<AccountSpec> accounts;
};

struct PlainMixerSpec {
  std::string name = "plain";
  Amount denomination = 1;
  unsigned tree_depth = 20;
  std::size_t root_history = IncrementalMerkleTree::kDefaultRootHistory;
  bool poi_required = true;  // withdrawals must be followed by a proof of innocence
};

struct ConsensusSpec {
  AccountId manager;
  std::vector<AccountId> verifiers;
  std::optional<Tick> proposal_expiry;
  bool allow_confiscation = false;
};

/// Public announcement that an address is linked to an illicit origin.
struct TagReport {
  Tick tick = 0;
  AccountId account;
  std::string label = "stolen";
};

struct ActorSpec {
  AccountId id;
  std::string strategy;
  nlohmann::json params = nlohmann::json::object();
};

struct ScheduledAction {
  Tick tick = 0;
  AccountId actor;
  std::string action;
  nlohmann::json args = nlohmann::json::object();
};

struct FaultSpec {
  Tick tick = 0;
  AccountId account;
  Amount amount = 0;
};

/// Optional self-check carried by bundled scenarios.
struct ExpectedOutcome {
  std::string verdict;  // NotApplicable | AttackSucceeded | AttackBlocked
  std::string stage;    // empty = any
};

struct ScenarioScript {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  std::uint64_t seed = 0;
  Tick tick_limit = 0;
  ChainSpec chain;
  std::optional<MixerConfig> zk_mixer;
  std::optional<PlainMixerSpec> plain_mixer;
  std::optional<ConsensusSpec> consensus;
  std::optional<std::string> hash_params;  // inline key/value text; default scheme when absent
  std::vector<TagReport> tag_reports;
  std::vector<ActorSpec> actors;
  std::vector<ScheduledAction> schedule;
  std::vector<FaultSpec> faults;
  std::optional<ExpectedOutcome> expect;
};

/// Throws Error(ParseError) with line:column for malformed text and
/// Error(ValidationError) naming the field for schema violations.
ScenarioScript load_scenario(std::string_view source);
ScenarioScript load_scenario_file(const std::string& path);
nlohmann::ordered_json scenario_to_json(const ScenarioScript& script);
/// Semantic checks (references, ranges, strategy parameters).
void validate_scenario(const ScenarioScript& script);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class AttackVerdict { NotApplicable, AttackSucceeded, AttackBlocked };
std::string_view to_string(AttackVerdict v);

struct AttackOutcome {
  AttackVerdict verdict = AttackVerdict::NotApplicable;
  std::string stage;  // e.g. "FirstDeposit", "ComplianceCheck"; empty unless blocked
  std::string actor;
  std::string terminal_account;
  Rational terminal_taint{0};
  bool poi_valid = false;
  std::uint64_t hops_completed = 0;
};

struct InvariantResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct LifecycleRow {
  std::string mixer;
  PreDepositId id = 0;
  AccountId depositor;
  std::string commitment;
  Tick deposit_tick = 0;
  Tick unlock_tick = 0;
  std::vector<std::pair<DepositState, Tick>> path;
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  Tick tick_limit = 0;
  Tick last_tick = 0;
  Tick ticks_per_hour = 1;
  EventLog events;
  std::map<AccountId, Amount> final_balances;
  std::vector<LifecycleRow> lifecycle;
  AttackOutcome attack;
  CostReport cost;
  std::vector<InvariantResult> invariants;
  Rational tree_escrow_taint{0};
  std::vector<std::string> taint_anomalies;
  std::optional<ExpectedOutcome> expect;

  /// True when there is no expectation or the verdict (and stage) match.
  bool expectation_met() const;
  bool invariants_hold() const;
  const InvariantResult* invariant(std::string_view name) const;
  nlohmann::ordered_json to_json() const;
  std::string summary_table() const;
  std::string digest_hex() const;
};

Report run_scenario(const ScenarioScript& script);

// ---------------------------------------------------------------------------
// Bundled scenarios
// ---------------------------------------------------------------------------

struct BundledScenario {
  std::string_view name;
  std::string_view source;
};

const std::vector<BundledScenario>& bundled_scenarios();
std::optional<std::string_view> bundled_scenario_source(std::string_view name);

/// Seeded random scenario for property runs (honest users, launderers,
/// verifiers of several kinds, random mode and timings).
ScenarioScript make_random_scenario(std::uint64_t seed);

std::string cost_report_json_key(std::string_view item);
nlohmann::ordered_json cost_report_to_json(const CostReport& report);
std::string cost_report_table(const CostReport& report, std::string_view title);

}  // namespace zkmixer

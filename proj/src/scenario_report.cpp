#include "zkmixer/scenario.hpp"

#include "zkmixer/digest.hpp"
#include "zkmixer/error.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

namespace zkmixer {

using oj = nlohmann::ordered_json;

std::string_view to_string(AttackVerdict v) {
  switch (v) {
    case AttackVerdict::NotApplicable: return "NotApplicable";
    case AttackVerdict::AttackSucceeded: return "AttackSucceeded";
    case AttackVerdict::AttackBlocked: return "AttackBlocked";
  }
  return "?";
}

namespace {

std::string rational_text(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string pad(std::string s, std::size_t width, bool left = true) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

std::string with_commas(std::uint64_t v) {
  auto s = std::to_string(v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

}  // namespace

std::string cost_report_json_key(std::string_view item) {
  std::string out;
  for (char c : item) out += c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

oj cost_report_to_json(const CostReport& report) {
  oj j;
  j["gas_price_wei"] = report.prices.gas_price_wei;
  j["eth_usd_cents"] = report.prices.eth_usd_cents;
  j["lines"] = oj::array();
  for (const auto& l : report.lines) {
    j["lines"].push_back({{"item", l.item},
                          {"key", cost_report_json_key(l.item)},
                          {"count", l.count},
                          {"gas", l.gas},
                          {"usd_cents", l.cents},
                          {"usd", format_usd(l.cents)}});
  }
  j["total_gas"] = report.total_gas;
  j["total_usd_cents"] = report.total_cents;
  j["total_usd"] = format_usd(report.total_cents);
  return j;
}

std::string cost_report_table(const CostReport& report, std::string_view title) {
  std::ostringstream os;
  os << title << "\n";
  os << pad("item", 18) << pad("count", 7, false) << pad("gas", 14, false) << pad("usd", 10, false) << "\n";
  for (const auto& l : report.lines) {
    os << pad(l.item, 18) << pad(std::to_string(l.count), 7, false) << pad(with_commas(l.gas), 14, false)
       << pad(format_usd(l.cents), 10, false) << "\n";
  }
  os << pad("total", 18) << pad("", 7, false) << pad(with_commas(report.total_gas), 14, false)
     << pad(format_usd(report.total_cents), 10, false) << "\n";
  return os.str();
}

bool Report::invariants_hold() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const auto& i) { return i.passed; });
}

const InvariantResult* Report::invariant(std::string_view name) const {
  for (const auto& i : invariants) {
    if (i.name == name) return &i;
  }
  return nullptr;
}

bool Report::expectation_met() const {
  if (!expect) return true;
  if (expect->verdict != to_string(attack.verdict)) return false;
  return expect->stage.empty() || expect->stage == attack.stage;
}

oj Report::to_json() const {
  oj j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["tick_limit"] = tick_limit;
  j["last_tick"] = last_tick;
  j["ticks_per_hour"] = ticks_per_hour;
  j["events"] = {{"count", events.size()}, {"digest", events.digest_hex()}};
  oj a;
  a["verdict"] = std::string(to_string(attack.verdict));
  a["stage"] = attack.stage.empty() ? oj(nullptr) : oj(attack.stage);
  a["actor"] = attack.actor.empty() ? oj(nullptr) : oj(attack.actor);
  a["terminal_account"] = attack.terminal_account.empty() ? oj(nullptr) : oj(attack.terminal_account);
  a["terminal_taint"] = rational_text(attack.terminal_taint);
  a["poi_valid"] = attack.poi_valid;
  a["hops_completed"] = attack.hops_completed;
  j["attack"] = a;
  if (expect) {
    j["expectation"] = {{"verdict", expect->verdict},
                        {"stage", expect->stage.empty() ? oj(nullptr) : oj(expect->stage)},
                        {"met", expectation_met()}};
  }
  j["balances"] = oj::object();
  for (const auto& [id, bal] : final_balances) j["balances"][id.str()] = bal;
  j["lifecycle"] = oj::array();
  for (const auto& row : lifecycle) {
    oj path = oj::array();
    for (const auto& [state, tick] : row.path) path.push_back({{"state", std::string(to_string(state))}, {"tick", tick}});
    j["lifecycle"].push_back({{"mixer", row.mixer},
                              {"id", row.id},
                              {"depositor", row.depositor.str()},
                              {"commitment", row.commitment},
                              {"deposit_tick", row.deposit_tick},
                              {"unlock_tick", row.unlock_tick},
                              {"path", path}});
  }
  j["cost"] = cost_report_to_json(cost);
  j["invariants"] = oj::array();
  for (const auto& i : invariants) {
    j["invariants"].push_back({{"name", i.name}, {"passed", i.passed}, {"detail", i.detail}});
  }
  j["tree_escrow_taint"] = rational_text(tree_escrow_taint);
  j["taint_anomalies"] = taint_anomalies;
  return j;
}

std::string Report::digest_hex() const { return to_hex(blake2b_256(as_bytes(to_json().dump()))); }

std::string Report::summary_table() const {
  std::ostringstream os;
  os << "scenario  " << scenario << "\n";
  os << "seed      " << seed << "\n";
  os << "ticks     " << last_tick << " of " << tick_limit << " (" << ticks_per_hour << " per hour)\n";
  os << "events    " << events.size() << "  digest " << events.digest_hex() << "\n";
  os << "verdict   " << to_string(attack.verdict);
  if (!attack.stage.empty()) os << " (" << attack.stage << ")";
  if (!attack.actor.empty()) os << "  actor " << attack.actor;
  os << "\n";
  if (expect) os << "expected  " << expect->verdict << (expectation_met() ? "  [met]" : "  [NOT MET]") << "\n";
  os << "tree escrow taint " << rational_text(tree_escrow_taint) << "\n\n";

  if (!lifecycle.empty()) {
    os << "deposits\n";
    for (const auto& row : lifecycle) {
      os << "  #" << pad(std::to_string(row.id), 4) << pad(row.depositor.str(), 20);
      for (std::size_t i = 0; i < row.path.size(); ++i) {
        os << (i ? " -> " : "") << to_string(row.path[i].first) << "@" << row.path[i].second;
      }
      os << "\n";
    }
    os << "\n";
  }
  os << "balances\n";
  for (const auto& [id, bal] : final_balances) os << "  " << pad(id.str(), 24) << pad(std::to_string(bal), 10, false) << "\n";
  os << "\n" << cost_report_table(cost, "gas") << "\n";
  os << "invariants\n";
  for (const auto& i : invariants) {
    os << "  " << (i.passed ? "ok    " : "FAILED") << " " << i.name;
    if (!i.passed) os << "  " << i.detail;
    os << "\n";
  }
  return os.str();
}

std::optional<std::string_view> bundled_scenario_source(std::string_view name) {
  for (const auto& b : bundled_scenarios()) {
    if (b.name == name) return b.source;
  }
  return std::nullopt;
}

ScenarioScript make_random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eed5eed5eedULL);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  ScenarioScript s;
  s.name = "random-" + std::to_string(seed);
  s.seed = seed;
  s.tick_limit = pick(30, 70);
  s.chain.accounts.push_back({AccountId("manager"), 0, std::nullopt});
  s.chain.accounts.push_back({AccountId("victim"), 0, std::nullopt});

  const Amount denom = pick(1, 5);
  const bool zk = chance(0.75);
  std::vector<std::string> honest;
  if (zk) {
    MixerConfig m;
    m.mode = static_cast<MixerMode>(pick(0, 3));
    m.denomination = denom;
    m.min_delay = pick(1, 8);
    m.constant_lock = pick(0, 8);
    m.delay_shape = chance(0.5) ? DelayShape::Linear : DelayShape::Exponential;
    m.period_length = pick(1, 5);
    m.window = pick(1, 4);
    m.max_delay = 40;
    m.tree_depth = 8;
    const char* predicates[] = {"accept_all", "reject_all", "allowlist"};
    m.auto_predicate = predicates[pick(0, 2)];
    s.zk_mixer = m;
  } else {
    PlainMixerSpec p;
    p.denomination = denom;
    p.tree_depth = 8;
    p.poi_required = chance(0.7);
    s.plain_mixer = p;
  }

  const auto users = pick(2, 6);
  for (std::uint64_t i = 0; i < users; ++i) {
    std::string id = "user" + std::to_string(i);
    honest.push_back(id);
    s.chain.accounts.push_back({AccountId(id), denom * pick(1, 3), std::nullopt});
    s.actors.push_back({AccountId(id),
                        "honest_user",
                        {{"deposit_tick", pick(0, 10)}, {"withdraw_delay", pick(0, 5)}, {"fresh_recipient", chance(0.8)}}});
    if (chance(0.3)) {
      s.schedule.push_back({pick(0, s.tick_limit), AccountId(id), "transfer", {{"to", "victim"}, {"amount", 1}}});
    }
  }
  if (s.zk_mixer) {
    for (std::uint64_t i = 0; i < users; ++i) {
      if (chance(0.5)) s.zk_mixer->predicate_accounts.push_back(AccountId(honest[i]));
    }
  }
  const auto launderers = pick(0, 2);
  for (std::uint64_t i = 0; i < launderers; ++i) {
    std::string id = "thief" + std::to_string(i);
    s.chain.accounts.push_back({AccountId(id), denom * pick(1, 3), std::string("stolen")});
    s.tag_reports.push_back({pick(0, 3), AccountId(id), "stolen"});
    s.actors.push_back({AccountId(id),
                        "launderer",
                        {{"hops", pick(1, 3)}, {"patience", pick(0, 4)}, {"start_tick", pick(0, 10)}}});
  }
  if (zk) {
    ConsensusSpec c;
    c.manager = AccountId("manager");
    c.allow_confiscation = chance(0.5);
    if (chance(0.5)) c.proposal_expiry = pick(1, 6);
    const auto verifiers = pick(1, 5);
    for (std::uint64_t i = 0; i < verifiers; ++i) {
      std::string id = "verifier" + std::to_string(i);
      c.verifiers.emplace_back(id);
      s.chain.accounts.push_back({AccountId(id), 0, std::nullopt});
      const auto kind = pick(0, 9);
      if (kind < 6) {
        nlohmann::json p{{"detection_latency", pick(0, 6)}};
        if (c.allow_confiscation && chance(0.5)) {
          p["action"] = "confiscate";
          p["victim"] = "victim";
        }
        if (chance(0.3)) p["burst_freeze_threshold"] = pick(1, 3);
        s.actors.push_back({AccountId(id), "screening_verifier", p});
      } else if (kind < 8) {
        s.actors.push_back({AccountId(id), "rogue_verifier", {{"targets", nlohmann::json::array({honest[0]})}}});
      } else {
        s.actors.push_back({AccountId(id), "idle", nlohmann::json::object()});
      }
    }
    if (chance(0.2)) {
      s.actors.push_back({AccountId("manager"), "passive", nlohmann::json::object()});
      s.schedule.push_back(
          {pick(0, s.tick_limit), AccountId("manager"), "remove_verifier", {{"verifier", c.verifiers[0].str()}}});
    }
    s.consensus = c;
  } else {
    s.chain.accounts.push_back({AccountId("screener"), 0, std::nullopt});
    s.actors.push_back({AccountId("screener"), "screening_verifier", {{"detection_latency", pick(0, 6)}}});
  }
  return s;
}

}  // namespace zkmixer

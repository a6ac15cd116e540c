#include "scenario_internal.hpp"

#include "zkmixer/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace zkmixer {

using nlohmann::json;
using detail::ParamReader;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(Errc::ValidationError, field + ": " + why);
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

/// Field reader over one JSON object that rejects unknown keys.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) invalid(where_, "expected an object");
  }

  bool has(const char* k) const { return j_.contains(k) && !j_.at(k).is_null(); }
  std::string path(const char* k) const { return where_.empty() ? k : where_ + "." + k; }
  const json& at(const char* k) const {
    if (!j_.contains(k)) invalid(path(k), "required");
    return j_.at(k);
  }

  std::uint64_t u64(const char* k) const {
    const auto& v = at(k);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) invalid(path(k), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::uint64_t u64(const char* k, std::uint64_t d) const { return has(k) ? u64(k) : d; }
  double number(const char* k, double d) const {
    if (!has(k)) return d;
    if (!at(k).is_number()) invalid(path(k), "expected a number");
    return at(k).get<double>();
  }
  bool boolean(const char* k, bool d) const {
    if (!has(k)) return d;
    if (!at(k).is_boolean()) invalid(path(k), "expected true or false");
    return at(k).get<bool>();
  }
  std::string str(const char* k) const {
    const auto& v = at(k);
    if (!v.is_string()) invalid(path(k), "expected a string");
    return v.get<std::string>();
  }
  std::string str(const char* k, std::string d) const { return has(k) ? str(k) : d; }
  const json& array(const char* k) const {
    static const json empty = json::array();
    if (!has(k)) return empty;
    if (!at(k).is_array()) invalid(path(k), "expected a list");
    return at(k);
  }
  std::vector<AccountId> ids(const char* k) const {
    std::vector<AccountId> out;
    for (const auto& e : array(k)) {
      if (!e.is_string()) invalid(path(k), "expected a list of strings");
      out.emplace_back(e.get<std::string>());
    }
    return out;
  }
  void allow_only(std::initializer_list<const char*> keys) const {
    for (const auto& [k, _] : j_.items()) {
      bool ok = false;
      for (auto* key : keys) ok = ok || k == key;
      if (!ok) invalid(where_.empty() ? k : where_ + "." + k, "unknown field");
    }
  }

 private:
  const json& j_;
  std::string where_;
};

MixerConfig read_mixer(const Obj& o) {
  o.allow_only({"name", "mode", "denomination", "min_delay", "constant_lock", "delay_shape", "period_length", "window",
                "max_delay", "auto_predicate", "predicate_accounts", "tree_depth", "root_history"});
  MixerConfig c;
  c.name = o.str("name", c.name);
  try {
    c.mode = parse_mixer_mode(o.str("mode", "constant_time"));
  } catch (const Error& e) {
    invalid(o.path("mode"), e.detail());
  }
  try {
    c.delay_shape = parse_delay_shape(o.str("delay_shape", "linear"));
  } catch (const Error& e) {
    invalid(o.path("delay_shape"), e.detail());
  }
  c.denomination = o.u64("denomination");
  c.min_delay = o.u64("min_delay", 0);
  c.constant_lock = o.u64("constant_lock", 0);
  c.period_length = o.u64("period_length", 1);
  c.window = o.u64("window", 1);
  c.max_delay = o.u64("max_delay", kDefaultMaxDelay);
  c.auto_predicate = o.str("auto_predicate", c.auto_predicate);
  c.predicate_accounts = o.ids("predicate_accounts");
  c.tree_depth = static_cast<unsigned>(o.u64("tree_depth", 20));
  c.root_history = o.u64("root_history", IncrementalMerkleTree::kDefaultRootHistory);
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(Errc::ValidationError, "zk_mixer." + e.detail());
  }
  return c;
}

ScenarioScript from_json(const json& root) {
  Obj top(root, "");
  top.allow_only({"schema_version", "name", "description", "seed", "tick_limit", "chain", "zk_mixer", "plain_mixer",
                  "consensus", "hash_params", "tag_reports", "actors", "schedule", "fault_injection", "expect"});
  ScenarioScript s;
  s.schema_version = static_cast<int>(top.u64("schema_version"));
  if (s.schema_version != kScenarioSchemaVersion) {
    invalid("schema_version", "unsupported version " + std::to_string(s.schema_version));
  }
  s.name = top.str("name");
  s.description = top.str("description", "");
  s.seed = top.u64("seed");
  s.tick_limit = top.u64("tick_limit");

  if (top.has("chain")) {
    Obj c(top.at("chain"), "chain");
    c.allow_only({"gas_price_gwei", "eth_usd", "gas_price_wei", "eth_usd_cents", "ticks_per_hour", "accounts"});
    if (c.has("gas_price_gwei") || c.has("eth_usd")) {
      s.chain.prices = GasPrices::from_decimal(c.number("gas_price_gwei", 1.0), c.number("eth_usd", 2000.0));
    }
    s.chain.prices.gas_price_wei = c.u64("gas_price_wei", s.chain.prices.gas_price_wei);
    s.chain.prices.eth_usd_cents = c.u64("eth_usd_cents", s.chain.prices.eth_usd_cents);
    s.chain.ticks_per_hour = c.u64("ticks_per_hour", 1);
    const auto& accounts = c.array("accounts");
    for (std::size_t i = 0; i < accounts.size(); ++i) {
      Obj a(accounts[i], "chain.accounts[" + std::to_string(i) + "]");
      a.allow_only({"id", "balance", "taint"});
      AccountSpec spec{AccountId(a.str("id")), a.u64("balance", 0), std::nullopt};
      if (a.has("taint")) spec.taint = a.str("taint");
      s.chain.accounts.push_back(std::move(spec));
    }
  }
  if (top.has("zk_mixer")) s.zk_mixer = read_mixer(Obj(top.at("zk_mixer"), "zk_mixer"));
  if (top.has("plain_mixer")) {
    Obj p(top.at("plain_mixer"), "plain_mixer");
    p.allow_only({"name", "denomination", "tree_depth", "root_history", "poi_required"});
    PlainMixerSpec spec;
    spec.name = p.str("name", spec.name);
    spec.denomination = p.u64("denomination");
    spec.tree_depth = static_cast<unsigned>(p.u64("tree_depth", 20));
    spec.root_history = p.u64("root_history", spec.root_history);
    spec.poi_required = p.boolean("poi_required", true);
    s.plain_mixer = spec;
  }
  if (top.has("consensus")) {
    Obj c(top.at("consensus"), "consensus");
    c.allow_only({"manager", "verifiers", "proposal_expiry", "allow_confiscation"});
    ConsensusSpec spec;
    spec.manager = AccountId(c.str("manager"));
    spec.verifiers = c.ids("verifiers");
    if (c.has("proposal_expiry")) spec.proposal_expiry = c.u64("proposal_expiry");
    spec.allow_confiscation = c.boolean("allow_confiscation", false);
    s.consensus = spec;
  }
  if (top.has("hash_params")) s.hash_params = top.str("hash_params");

  const auto& tags = top.array("tag_reports");
  for (std::size_t i = 0; i < tags.size(); ++i) {
    Obj t(tags[i], "tag_reports[" + std::to_string(i) + "]");
    t.allow_only({"tick", "account", "label"});
    s.tag_reports.push_back({t.u64("tick"), AccountId(t.str("account")), t.str("label", "stolen")});
  }
  const auto& actors = top.array("actors");
  for (std::size_t i = 0; i < actors.size(); ++i) {
    Obj a(actors[i], "actors[" + std::to_string(i) + "]");
    a.allow_only({"id", "strategy", "params"});
    s.actors.push_back({AccountId(a.str("id")), a.str("strategy"), a.has("params") ? a.at("params") : json::object()});
  }
  const auto& schedule = top.array("schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    Obj a(schedule[i], "schedule[" + std::to_string(i) + "]");
    a.allow_only({"tick", "actor", "action", "args"});
    s.schedule.push_back({a.u64("tick"), AccountId(a.str("actor")), a.str("action"),
                          a.has("args") ? a.at("args") : json::object()});
  }
  const auto& faults = top.array("fault_injection");
  for (std::size_t i = 0; i < faults.size(); ++i) {
    Obj f(faults[i], "fault_injection[" + std::to_string(i) + "]");
    f.allow_only({"tick", "account", "amount"});
    s.faults.push_back({f.u64("tick"), AccountId(f.str("account")), f.u64("amount")});
  }
  if (top.has("expect")) {
    Obj e(top.at("expect"), "expect");
    e.allow_only({"verdict", "stage"});
    s.expect = ExpectedOutcome{e.str("verdict"), e.str("stage", "")};
  }
  validate_scenario(s);
  return s;
}

void validate_action(const ScheduledAction& a, const std::string& where) {
  ParamReader r(a.args, where + ".args");
  static const std::set<std::string> known{"transfer", "add_verifier", "remove_verifier", "freeze", "unfreeze",
                                           "propose",  "vote",         "tally",           "deposit", "approve",
                                           "withdraw"};
  if (!known.count(a.action)) invalid(where + ".action", "unknown action '" + a.action + "'");
  if (a.action == "transfer") {
    r.allow_only({"to", "amount"});
    r.str("to");
    r.u64("amount");
  } else if (a.action == "add_verifier" || a.action == "remove_verifier") {
    r.allow_only({"verifier"});
    r.str("verifier");
  } else if (a.action == "freeze" || a.action == "unfreeze") {
    r.allow_only({"deposit"});
    r.u64("deposit");
  } else if (a.action == "propose") {
    r.allow_only({"deposit", "action", "target"});
    r.u64("deposit");
    try {
      parse_proposal_action(r.str("action"));
    } catch (const Error&) {
      r.fail("action", "expected refund, confiscate or approve");
    }
  } else if (a.action == "vote") {
    r.allow_only({"proposal", "ballot"});
    r.u64("proposal");
    auto b = r.str("ballot");
    if (b != "yes" && b != "no") r.fail("ballot", "expected yes or no");
  } else if (a.action == "tally") {
    r.allow_only({"proposal"});
    r.u64("proposal");
  } else if (a.action == "deposit") {
    r.allow_only({"mixer"});
    auto m = r.str("mixer", "zk");
    if (m != "zk" && m != "plain") r.fail("mixer", "expected zk or plain");
  } else if (a.action == "approve") {
    r.allow_only({"note"});
    r.u64("note", 0);
  } else if (a.action == "withdraw") {
    r.allow_only({"note", "recipient"});
    r.u64("note", 0);
    r.str("recipient", "");
  }
}

}  // namespace

void validate_scenario(const ScenarioScript& s) {
  if (s.schema_version != kScenarioSchemaVersion) invalid("schema_version", "unsupported version");
  if (s.name.empty()) invalid("name", "must not be empty");
  if (s.tick_limit == 0) invalid("tick_limit", "must be at least 1");
  if (s.tick_limit > 10'000'000) invalid("tick_limit", "must be at most 10000000");
  if (s.chain.ticks_per_hour == 0) invalid("chain.ticks_per_hour", "must be positive");

  std::set<AccountId> accounts;
  for (std::size_t i = 0; i < s.chain.accounts.size(); ++i) {
    const auto& a = s.chain.accounts[i];
    const auto where = "chain.accounts[" + std::to_string(i) + "]";
    if (a.id.empty()) invalid(where + ".id", "must not be empty");
    if (!accounts.insert(a.id).second) invalid(where + ".id", "duplicate account '" + a.id.str() + "'");
    if (a.taint && a.taint->empty()) invalid(where + ".taint", "label must not be empty");
  }

  std::set<AccountId> actor_ids;
  for (std::size_t i = 0; i < s.actors.size(); ++i) {
    const auto& a = s.actors[i];
    const auto where = "actors[" + std::to_string(i) + "]";
    if (a.id.empty()) invalid(where + ".id", "must not be empty");
    if (!actor_ids.insert(a.id).second) invalid(where + ".id", "duplicate actor '" + a.id.str() + "'");
    detail::make_strategy(a.strategy, a.params, where);
  }

  if (s.zk_mixer) {
    try {
      s.zk_mixer->validate();
    } catch (const Error& e) {
      throw Error(Errc::ValidationError, "zk_mixer." + e.detail());
    }
    if (s.zk_mixer->mode == MixerMode::ApprovalNecessary && !s.consensus) {
      invalid("consensus", "approval_necessary mode needs a verifier roster");
    }
  }
  if (s.plain_mixer) {
    if (s.plain_mixer->denomination == 0) invalid("plain_mixer.denomination", "must be positive");
    if (s.plain_mixer->tree_depth < 1 || s.plain_mixer->tree_depth > IncrementalMerkleTree::kMaxDepth) {
      invalid("plain_mixer.tree_depth", "must be in 1..32");
    }
    if (s.plain_mixer->root_history < 1) invalid("plain_mixer.root_history", "must be at least 1");
    if (s.plain_mixer->name.empty()) invalid("plain_mixer.name", "must not be empty");
    if (s.zk_mixer && s.zk_mixer->name == s.plain_mixer->name) invalid("plain_mixer.name", "clashes with zk_mixer.name");
  }
  if (s.consensus) {
    if (!s.zk_mixer) invalid("consensus", "needs a zk_mixer to govern");
    if (s.consensus->manager.empty()) invalid("consensus.manager", "must not be empty");
    std::set<AccountId> roster;
    for (const auto& v : s.consensus->verifiers) {
      if (v.empty()) invalid("consensus.verifiers", "ids must not be empty");
      if (!roster.insert(v).second) invalid("consensus.verifiers", "duplicate verifier '" + v.str() + "'");
    }
  }
  if (s.hash_params) {
    try {
      make_hash_scheme(HashParams::parse(*s.hash_params));
    } catch (const Error& e) {
      invalid("hash_params", e.detail());
    }
  }
  for (std::size_t i = 0; i < s.tag_reports.size(); ++i) {
    const auto where = "tag_reports[" + std::to_string(i) + "]";
    if (s.tag_reports[i].tick > s.tick_limit) invalid(where + ".tick", "beyond tick_limit");
    if (s.tag_reports[i].account.empty()) invalid(where + ".account", "must not be empty");
  }
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    const auto& a = s.schedule[i];
    const auto where = "schedule[" + std::to_string(i) + "]";
    if (a.tick > s.tick_limit) invalid(where + ".tick", "beyond tick_limit");
    if (!actor_ids.count(a.actor)) invalid(where + ".actor", "unknown actor '" + a.actor.str() + "'");
    validate_action(a, where);
  }
  for (std::size_t i = 0; i < s.faults.size(); ++i) {
    const auto where = "fault_injection[" + std::to_string(i) + "]";
    if (s.faults[i].tick > s.tick_limit) invalid(where + ".tick", "beyond tick_limit");
    if (s.faults[i].account.empty()) invalid(where + ".account", "must not be empty");
  }
  if (s.expect) {
    const auto& v = s.expect->verdict;
    if (v != "NotApplicable" && v != "AttackSucceeded" && v != "AttackBlocked") {
      invalid("expect.verdict", "expected NotApplicable, AttackSucceeded or AttackBlocked");
    }
  }
}

ScenarioScript load_scenario(std::string_view source) {
  json root;
  try {
    root = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, "at " + line_col(source, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  return from_json(root);
}

ScenarioScript load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_scenario(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + " " + e.detail());
  }
}

nlohmann::ordered_json scenario_to_json(const ScenarioScript& s) {
  nlohmann::ordered_json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["seed"] = s.seed;
  j["tick_limit"] = s.tick_limit;
  auto& c = j["chain"];
  c["gas_price_wei"] = s.chain.prices.gas_price_wei;
  c["eth_usd_cents"] = s.chain.prices.eth_usd_cents;
  c["ticks_per_hour"] = s.chain.ticks_per_hour;
  c["accounts"] = nlohmann::ordered_json::array();
  for (const auto& a : s.chain.accounts) {
    nlohmann::ordered_json e{{"id", a.id.str()}, {"balance", a.balance}};
    if (a.taint) e["taint"] = *a.taint;
    c["accounts"].push_back(e);
  }
  if (s.zk_mixer) {
    const auto& m = *s.zk_mixer;
    nlohmann::ordered_json z;
    z["name"] = m.name;
    z["mode"] = std::string(to_string(m.mode));
    z["denomination"] = m.denomination;
    z["min_delay"] = m.min_delay;
    z["constant_lock"] = m.constant_lock;
    z["delay_shape"] = std::string(to_string(m.delay_shape));
    z["period_length"] = m.period_length;
    z["window"] = m.window;
    z["max_delay"] = m.max_delay;
    z["auto_predicate"] = m.auto_predicate;
    z["predicate_accounts"] = nlohmann::ordered_json::array();
    for (const auto& a : m.predicate_accounts) z["predicate_accounts"].push_back(a.str());
    z["tree_depth"] = m.tree_depth;
    z["root_history"] = m.root_history;
    j["zk_mixer"] = z;
  }
  if (s.plain_mixer) {
    const auto& p = *s.plain_mixer;
    j["plain_mixer"] = {{"name", p.name},
                        {"denomination", p.denomination},
                        {"tree_depth", p.tree_depth},
                        {"root_history", p.root_history},
                        {"poi_required", p.poi_required}};
  }
  if (s.consensus) {
    nlohmann::ordered_json k;
    k["manager"] = s.consensus->manager.str();
    k["verifiers"] = nlohmann::ordered_json::array();
    for (const auto& v : s.consensus->verifiers) k["verifiers"].push_back(v.str());
    if (s.consensus->proposal_expiry) k["proposal_expiry"] = *s.consensus->proposal_expiry;
    k["allow_confiscation"] = s.consensus->allow_confiscation;
    j["consensus"] = k;
  }
  if (s.hash_params) j["hash_params"] = *s.hash_params;
  j["tag_reports"] = nlohmann::ordered_json::array();
  for (const auto& t : s.tag_reports) {
    j["tag_reports"].push_back({{"tick", t.tick}, {"account", t.account.str()}, {"label", t.label}});
  }
  j["actors"] = nlohmann::ordered_json::array();
  for (const auto& a : s.actors) {
    j["actors"].push_back({{"id", a.id.str()}, {"strategy", a.strategy}, {"params", nlohmann::ordered_json::parse(a.params.dump())}});
  }
  j["schedule"] = nlohmann::ordered_json::array();
  for (const auto& a : s.schedule) {
    j["schedule"].push_back({{"tick", a.tick}, {"actor", a.actor.str()}, {"action", a.action}, {"args", nlohmann::ordered_json::parse(a.args.dump())}});
  }
  if (!s.faults.empty()) {
    j["fault_injection"] = nlohmann::ordered_json::array();
    for (const auto& f : s.faults) {
      j["fault_injection"].push_back({{"tick", f.tick}, {"account", f.account.str()}, {"amount", f.amount}});
    }
  }
  if (s.expect) {
    j["expect"] = {{"verdict", s.expect->verdict}};
    if (!s.expect->stage.empty()) j["expect"]["stage"] = s.expect->stage;
  }
  return j;
}

}  // namespace zkmixer

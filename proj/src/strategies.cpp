#include "scenario_internal.hpp"

#include "zkmixer/error.hpp"

#include <algorithm>
#include <map>

namespace zkmixer::detail {

ParamReader::ParamReader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
  if (!j_.is_object()) throw Error(Errc::ValidationError, where_ + ": expected an object");
}

void ParamReader::fail(const char* key, const std::string& why) const {
  throw Error(Errc::ValidationError, where_ + "." + key + ": " + why);
}

std::uint64_t ParamReader::u64(const char* key, std::uint64_t fallback) const {
  if (!j_.contains(key)) return fallback;
  return u64(key);
}

std::uint64_t ParamReader::u64(const char* key) const {
  if (!j_.contains(key)) fail(key, "required");
  const auto& v = j_.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) fail(key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::optional<std::uint64_t> ParamReader::opt_u64(const char* key) const {
  if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
  return u64(key);
}

bool ParamReader::boolean(const char* key, bool fallback) const {
  if (!j_.contains(key)) return fallback;
  if (!j_.at(key).is_boolean()) fail(key, "expected true or false");
  return j_.at(key).get<bool>();
}

std::string ParamReader::str(const char* key, std::string fallback) const {
  if (!j_.contains(key)) return fallback;
  return str(key);
}

std::string ParamReader::str(const char* key) const {
  if (!j_.contains(key)) fail(key, "required");
  if (!j_.at(key).is_string()) fail(key, "expected a string");
  return j_.at(key).get<std::string>();
}

std::vector<std::string> ParamReader::str_list(const char* key) const {
  std::vector<std::string> out;
  if (!j_.contains(key)) return out;
  const auto& v = j_.at(key);
  if (!v.is_array()) fail(key, "expected a list of strings");
  for (const auto& e : v) {
    if (!e.is_string()) fail(key, "expected a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void ParamReader::allow_only(std::initializer_list<const char*> keys) const {
  for (const auto& [k, _] : j_.items()) {
    bool known = std::any_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; });
    if (!known) throw Error(Errc::ValidationError, where_ + "." + k + ": unknown parameter");
  }
}

std::string stage_name(std::uint64_t hop, std::string_view what) {
  static const char* ordinals[] = {"First", "Second", "Third", "Fourth", "Fifth"};
  std::string prefix = hop < 5 ? ordinals[hop] : "Hop" + std::to_string(hop + 1);
  return prefix + std::string(what);
}

namespace {

std::optional<Venue> parse_venue(const ParamReader& r, const char* key) {
  auto v = r.str(key, "auto");
  if (v == "auto") return std::nullopt;
  if (v == "zk") return Venue::Zk;
  if (v == "plain") return Venue::Plain;
  r.fail(key, "expected auto, zk or plain");
}

bool self_approval_mode(const ZkMixer& zk) {
  auto m = zk.config().mode;
  return m == MixerMode::ConstantTime || m == MixerMode::MovingAverage;
}

/// Tracks one note through deposit -> admission. Shared by honest users and
/// launderers.
struct NoteTracker {
  std::optional<std::size_t> note;
  std::optional<Tick> admitted_at;

  enum class Status { None, Waiting, Admitted, Rejected };

  Status poll(ActorContext& ctx) {
    if (!note) return Status::None;
    auto& n = ctx.notes()[*note];
    if (n.venue == Venue::Plain || !n.pre_deposit) {
      if (!admitted_at) admitted_at = n.deposited;
      return Status::Admitted;
    }
    const auto& d = ctx.zk()->pre_deposit(*n.pre_deposit);
    switch (d.state) {
      case DepositState::Admitted:
        if (!admitted_at) admitted_at = d.history.back().second;
        return Status::Admitted;
      case DepositState::Refunded:
      case DepositState::Confiscated:
        return Status::Rejected;
      case DepositState::Frozen:
        return Status::Waiting;
      case DepositState::Pending:
        if (self_approval_mode(*ctx.zk()) && ctx.now() >= d.unlock_tick && d.depositor == n.depositor) {
          if (ctx.approve(*note)) {
            admitted_at = ctx.now();
            return Status::Admitted;
          }
        }
        return Status::Waiting;
    }
    return Status::Waiting;
  }
};

// ---------------------------------------------------------------------------

class IdleStrategy final : public Strategy {
 public:
  void on_tick(ActorContext&) override {}
  bool idle(const ActorContext&) const override { return true; }
};

class HonestUser final : public Strategy {
 public:
  explicit HonestUser(const ParamReader& r)
      : deposit_tick_(r.u64("deposit_tick", 1)),
        withdraw_delay_(r.u64("withdraw_delay", 1)),
        fresh_recipient_(r.boolean("fresh_recipient", true)),
        venue_(parse_venue(r, "mixer")) {
    r.allow_only({"deposit_tick", "withdraw_delay", "fresh_recipient", "mixer"});
  }

  void on_tick(ActorContext& ctx) override {
    if (done_) return;
    if (!tracker_.note) {
      if (ctx.now() < deposit_tick_) return;
      auto venue = venue_ ? venue_ : ctx.default_venue();
      if (!venue) {
        done_ = true;
        return;
      }
      tracker_.note = ctx.deposit(ctx.self(), *venue);
      if (!tracker_.note) done_ = true;
      return;
    }
    switch (tracker_.poll(ctx)) {
      case NoteTracker::Status::Rejected:
        done_ = true;
        return;
      case NoteTracker::Status::Admitted:
        if (ctx.now() >= *tracker_.admitted_at + withdraw_delay_) {
          AccountId to = fresh_recipient_ ? ctx.fresh_account() : ctx.self();
          if (ctx.withdraw(*tracker_.note, to)) {
            if (ctx.notes()[*tracker_.note].venue == Venue::Plain && ctx.poi_required()) {
              ctx.prove_innocence(*tracker_.note);
            }
          }
          done_ = true;
        }
        return;
      default:
        return;
    }
  }

  bool idle(const ActorContext&) const override { return done_; }

 private:
  Tick deposit_tick_;
  Tick withdraw_delay_;
  bool fresh_recipient_;
  std::optional<Venue> venue_;
  NoteTracker tracker_;
  bool done_ = false;
};

/// Deposit, withdraw to a fresh address, repeat `hops` times, then face the
/// compliance check if the venue imposes one.
class Launderer final : public Strategy {
 public:
  explicit Launderer(const ParamReader& r)
      : hops_(r.u64("hops", 2)),
        patience_(r.u64("patience", 1)),
        start_tick_(r.u64("start_tick", 1)),
        hop_gap_(r.u64("hop_gap", 1)),
        probe_poi_(r.boolean("probe_poi", true)),
        venue_(parse_venue(r, "mixer")) {
    r.allow_only({"hops", "patience", "start_tick", "hop_gap", "probe_poi", "mixer"});
    if (hops_ == 0) r.fail("hops", "must be at least 1");
    progress_.stage = stage_name(0, "Deposit");
  }

  void on_tick(ActorContext& ctx) override {
    if (progress_.finished) return;
    if (address_.empty()) address_ = ctx.self();
    if (!tracker_.note) {
      if (ctx.now() < next_deposit_) return;
      auto venue = venue_ ? venue_ : ctx.default_venue();
      if (!venue) return block();
      venue_ = venue;
      progress_.stage = stage_name(hop_, "Deposit");
      tracker_.note = ctx.deposit(address_, *venue);
      if (!tracker_.note) return block();
      return;
    }
    switch (tracker_.poll(ctx)) {
      case NoteTracker::Status::Rejected:
        return block();
      case NoteTracker::Status::Waiting:
      case NoteTracker::Status::None:
        return;
      case NoteTracker::Status::Admitted:
        break;
    }
    if (ctx.now() < *tracker_.admitted_at + patience_) return;
    progress_.stage = stage_name(hop_, "Withdraw");
    AccountId fresh = ctx.fresh_account();
    const std::size_t note = *tracker_.note;
    if (!ctx.withdraw(note, fresh)) return block();
    address_ = fresh;
    ++hop_;
    progress_.hops_completed = hop_;
    tracker_ = {};
    const bool poi = *venue_ == Venue::Plain && ctx.poi_required();
    if (hop_ < hops_) {
      if (poi && probe_poi_) ctx.prove_innocence(note);  // informational; the result does not stop the plan
      next_deposit_ = ctx.now() + hop_gap_;
      progress_.stage = stage_name(hop_, "Deposit");
      return;
    }
    progress_.terminal = address_;
    progress_.compliance_required = poi;
    if (poi) {
      progress_.stage = "ComplianceCheck";
      progress_.poi_valid = ctx.prove_innocence(note);
      if (!progress_.poi_valid) return block();
    }
    progress_.stage.clear();
    progress_.finished = true;
  }

  bool idle(const ActorContext&) const override { return progress_.finished; }
  const LaunderProgress* launder_progress() const override { return &progress_; }

 private:
  void block() {
    progress_.blocked = true;
    progress_.finished = true;
    progress_.terminal = address_;
  }

  std::uint64_t hops_;
  Tick patience_;
  Tick start_tick_;
  Tick hop_gap_;
  bool probe_poi_;
  std::optional<Venue> venue_;
  Tick next_deposit_ = start_tick_;
  std::uint64_t hop_ = 0;
  AccountId address_;
  NoteTracker tracker_;
  LaunderProgress progress_;
};

/// Public-log watcher shared by the verifier strategies: tagged addresses
/// (from tag reports, extended along direct transfers) seen with a lag.
class Knowledge {
 public:
  explicit Knowledge(Tick latency) : latency_(latency) {}

  void update(const ActorContext& ctx) {
    const auto& records = ctx.log().records();
    while (cursor_ < records.size() && records[cursor_].tick + latency_ <= ctx.now()) {
      const auto& e = records[cursor_++];
      if (!e.ok()) continue;
      if (e.operation == "tag.report") {
        tagged_.insert(AccountId(*e.param("account")));
      } else if (e.operation == "transfer") {
        AccountId from(*e.param("from")), to(*e.param("to"));
        if (tagged_.count(from) && !ctx.is_escrow(to)) tagged_.insert(to);
      } else if (e.operation == "zk.deposit" && e.param("id")) {
        seen_deposits_.insert(std::stoull(*e.param("id")));
      } else if (e.operation == "plain.deposit") {
        plain_deposits_.push_back({AccountId(*e.param("depositor")), *e.param("commitment")});
      }
    }
  }

  bool suspicious(const AccountId& depositor) const { return tagged_.count(depositor) != 0; }
  bool seen(PreDepositId id) const { return seen_deposits_.count(id) != 0; }

  struct PlainDeposit {
    AccountId depositor;
    std::string commitment;
  };
  std::vector<PlainDeposit>& plain_deposits() { return plain_deposits_; }

  bool caught_up(const ActorContext& ctx) const {
    const auto& records = ctx.log().records();
    for (std::size_t i = cursor_; i < records.size(); ++i) {
      const auto& op = records[i].operation;
      if (op == "tag.report" || op == "transfer" || op == "zk.deposit" || op == "plain.deposit") return false;
    }
    return true;
  }

 private:
  Tick latency_;
  std::size_t cursor_ = 0;
  std::set<AccountId> tagged_;
  std::set<PreDepositId> seen_deposits_;
  std::vector<PlainDeposit> plain_deposits_;
};

void vote_and_tally(ActorContext& ctx, const std::function<Ballot(const Proposal&)>& decide) {
  const auto* ms = ctx.multisig();
  if (!ms || !ctx.in_roster()) return;
  std::vector<ProposalId> open;
  for (const auto& p : ms->proposals()) {
    if (p.status == ProposalStatus::Open) open.push_back(p.id);
  }
  for (auto id : open) {
    const auto& p = ms->proposal(id);
    if (p.status != ProposalStatus::Open) continue;
    if (!p.votes.count(ctx.self())) ctx.vote(id, decide(p));
    const auto& q = ms->proposal(id);
    if (q.status != ProposalStatus::Open) continue;
    std::size_t yes = 0, voted = 0;
    for (const auto& v : ms->roster()) {
      auto it = q.votes.find(v);
      if (it == q.votes.end()) continue;
      ++voted;
      if (it->second == Ballot::Yes) ++yes;
    }
    const std::size_t n = ms->roster().size();
    const bool decided = strict_majority(yes, n) || voted == n || !strict_majority(yes + (n - voted), n);
    if (decided) ctx.tally(id);
  }
}

class ScreeningVerifier final : public Strategy {
 public:
  explicit ScreeningVerifier(const ParamReader& r) : knowledge_(r.u64("detection_latency", 1)) {
    r.allow_only({"detection_latency", "action", "victim", "burst_freeze_threshold"});
    auto action = r.str("action", "refund");
    if (action == "refund") {
      motion_ = Motion::refund();
    } else if (action == "confiscate") {
      motion_ = Motion::confiscate(AccountId(r.str("victim")));
    } else {
      r.fail("action", "expected refund or confiscate");
    }
    burst_ = r.opt_u64("burst_freeze_threshold");
  }

  void on_tick(ActorContext& ctx) override {
    knowledge_.update(ctx);
    if (const auto* list = ctx.exclusion_list()) screen_plain(ctx, *list);
    const auto* zk = ctx.zk();
    if (!zk || !ctx.multisig() || !ctx.in_roster()) return;
    const auto* ms = ctx.multisig();
    if (burst_) burst_freeze(ctx, *zk);
    for (const auto& d : zk->pre_deposits()) {
      if (d.terminal() || !knowledge_.seen(d.id)) continue;
      const bool open = ms->open_proposal_for(d.id).has_value();
      if (open) continue;
      if (knowledge_.suspicious(d.depositor)) {
        if (d.state == DepositState::Pending && !ctx.freeze(d.id)) continue;
        ctx.propose(d.id, motion_);
      } else if (d.state == DepositState::Frozen) {
        ctx.unfreeze(d.id);
      } else if (zk->config().mode == MixerMode::ApprovalNecessary) {
        ctx.propose(d.id, Motion::approve());
      }
    }
    vote_and_tally(ctx, [&](const Proposal& p) {
      const bool bad = knowledge_.suspicious(zk->pre_deposit(p.deposit).depositor);
      const bool approve = p.motion.action == ProposalAction::Approve;
      return bad != approve ? Ballot::Yes : Ballot::No;
    });
  }

  bool idle(const ActorContext& ctx) const override { return knowledge_.caught_up(ctx); }

 private:
  void screen_plain(ActorContext& ctx, const ExclusionList&) {
    auto& pending = knowledge_.plain_deposits();
    for (const auto& d : pending) {
      if (knowledge_.suspicious(d.depositor)) ctx.list_add(d.commitment);
    }
    pending.clear();
  }

  void burst_freeze(ActorContext& ctx, const ZkMixer& zk) {
    const Tick period = zk.config().period_length;
    const Tick current = ctx.now() / period;
    std::uint64_t count = 0;
    for (const auto& d : zk.pre_deposits()) {
      if (d.deposit_tick / period == current) ++count;
    }
    if (count <= *burst_) return;
    for (const auto& d : zk.pre_deposits()) {
      if (d.deposit_tick / period != current || d.state != DepositState::Pending) continue;
      if (knowledge_.seen(d.id)) continue;  // already vetted
      ctx.freeze(d.id);
    }
  }

  Knowledge knowledge_;
  Motion motion_;
  std::optional<std::uint64_t> burst_;
};

/// Freezes and votes against chosen depositors regardless of evidence.
class RogueVerifier final : public Strategy {
 public:
  explicit RogueVerifier(const ParamReader& r) {
    r.allow_only({"targets"});
    for (auto& t : r.str_list("targets")) targets_.insert(AccountId(t));
  }

  void on_tick(ActorContext& ctx) override {
    const auto* zk = ctx.zk();
    const auto* ms = ctx.multisig();
    if (!zk || !ms || !ctx.in_roster()) return;
    for (const auto& d : zk->pre_deposits()) {
      if (d.terminal() || !targets_.count(d.depositor) || ms->open_proposal_for(d.id)) continue;
      if (d.state == DepositState::Pending && !ctx.freeze(d.id)) continue;
      ctx.propose(d.id, Motion::refund());
    }
    vote_and_tally(ctx, [&](const Proposal& p) {
      const bool target = targets_.count(zk->pre_deposit(p.deposit).depositor) != 0;
      return target != (p.motion.action == ProposalAction::Approve) ? Ballot::Yes : Ballot::No;
    });
  }

  bool idle(const ActorContext&) const override { return true; }

 private:
  std::set<AccountId> targets_;
};

}  // namespace

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names{"idle", "passive", "honest_user", "launderer", "screening_verifier",
                                              "rogue_verifier"};
  return names;
}

bool is_known_strategy(const std::string& name) {
  const auto& n = strategy_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const nlohmann::json& params,
                                        const std::string& where) {
  ParamReader r(params, where + ".params");
  if (name == "idle" || name == "passive") {
    r.allow_only({});
    return std::make_unique<IdleStrategy>();
  }
  if (name == "honest_user") return std::make_unique<HonestUser>(r);
  if (name == "launderer") return std::make_unique<Launderer>(r);
  if (name == "screening_verifier") return std::make_unique<ScreeningVerifier>(r);
  if (name == "rogue_verifier") return std::make_unique<RogueVerifier>(r);
  throw Error(Errc::ValidationError, where + ".strategy: unknown strategy '" + name + "'");
}

}  // namespace zkmixer::detail

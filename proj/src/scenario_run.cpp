#include "scenario_internal.hpp"

#include "zkmixer/digest.hpp"
#include "zkmixer/error.hpp"

#include <algorithm>
#include <cstdio>

namespace zkmixer::detail {

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Digest32 backend_key(std::uint64_t seed) {
  ByteWriter w;
  w.str("zkmixer/backend-key");
  w.u64(seed);
  return blake2b_256(w.bytes());
}

/// Runs `f`; on a protocol error records a failed event instead of throwing.
template <class F>
bool attempt(SimChain& chain, const std::string& actor, std::string op, Params params, F&& f) {
  try {
    f();
    return true;
  } catch (const Error& e) {
    params.emplace_back("error", e.what());
    chain.log(actor, std::move(op), std::move(params), std::string(to_string(e.code())));
    return false;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ActorContext
// ---------------------------------------------------------------------------

Tick ActorContext::now() const { return world_.now; }
const AccountId& ActorContext::self() const { return world_.actors[index_].id; }
const EventLog& ActorContext::log() const { return world_.chain.events(); }
const ZkMixer* ActorContext::zk() const { return world_.zk.get(); }
const MultiSig* ActorContext::multisig() const { return world_.multisig.get(); }
const PlainMixer* ActorContext::plain() const { return world_.plain.get(); }
const ExclusionList* ActorContext::exclusion_list() const { return world_.exclusion.get(); }
bool ActorContext::poi_required() const { return world_.script.plain_mixer && world_.script.plain_mixer->poi_required; }
bool ActorContext::is_escrow(const AccountId& a) const { return world_.escrows.count(a) != 0; }
Amount ActorContext::balance(const AccountId& a) const {
  return world_.chain.has_account(a) ? world_.chain.balance(a) : 0;
}
bool ActorContext::in_roster() const { return world_.multisig && world_.multisig->is_verifier(self()); }
std::vector<OwnedNote>& ActorContext::notes() { return world_.actors[index_].notes; }
const std::vector<OwnedNote>& ActorContext::notes() const { return world_.actors[index_].notes; }

std::optional<Venue> ActorContext::default_venue() const {
  if (world_.zk) return Venue::Zk;
  if (world_.plain) return Venue::Plain;
  return std::nullopt;
}

AccountId ActorContext::fresh_account() {
  for (;;) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(world_.rng()));
    AccountId id(buf);
    if (!world_.chain.has_account(id)) {
      world_.chain.create_account(id, 0);
      return id;
    }
  }
}

std::optional<std::size_t> ActorContext::deposit(const AccountId& from, Venue venue) {
  auto& actor = world_.actors[index_];
  OwnedNote n;
  n.note = make_note(*world_.scheme, actor.rng);
  n.venue = venue;
  n.depositor = from;
  n.deposited = now();
  const char* op = venue == Venue::Zk ? "zk.deposit" : "plain.deposit";
  if ((venue == Venue::Zk && !world_.zk) || (venue == Venue::Plain && !world_.plain)) {
    world_.chain.log(from.str(), op, {{"error", "no such mixer"}}, "WrongMode");
    return std::nullopt;
  }
  world_.taint.register_note(n.note);
  bool ok = attempt(world_.chain, from.str(), op, {{"commitment", n.note.commitment.value.to_hex()}}, [&] {
    if (venue == Venue::Zk) {
      auto receipt = world_.zk->deposit(from, n.note.commitment, world_.zk->config().denomination, now());
      n.pre_deposit = receipt.pre_deposit;
    } else {
      world_.plain->deposit(from, n.note.commitment, world_.plain->denomination(), now());
    }
  });
  if (!ok) return std::nullopt;
  actor.notes.push_back(std::move(n));
  return actor.notes.size() - 1;
}

bool ActorContext::approve(std::size_t note) {
  const auto& n = notes().at(note);
  if (!world_.zk || !n.pre_deposit) return false;
  return attempt(world_.chain, n.depositor.str(), "zk.admit", {{"id", std::to_string(*n.pre_deposit)}},
                 [&] { world_.zk->approve_own(*n.pre_deposit, n.depositor, now()); });
}

bool ActorContext::withdraw(std::size_t index, const AccountId& recipient) {
  auto& n = notes().at(index);
  const char* op = n.venue == Venue::Zk ? "zk.withdraw" : "plain.withdraw";
  const IncrementalMerkleTree* tree = n.venue == Venue::Zk ? (world_.zk ? &world_.zk->tree() : nullptr)
                                                           : (world_.plain ? &world_.plain->tree() : nullptr);
  return attempt(world_.chain, recipient.str(), op, {{"recipient", recipient.str()}}, [&] {
    if (!tree) throw Error(Errc::WrongMode, "no such mixer");
    auto leaf = tree->find_leaf(n.note.commitment.value);
    if (!leaf) throw Error(Errc::NoSuchLeaf, "note is not in the tree");
    WithdrawWitness w{n.note.secret, n.note.nullifier, *leaf, tree->path_of(*leaf)};
    const Amount denom = n.venue == Venue::Zk ? world_.zk->config().denomination : world_.plain->denomination();
    WithdrawStatement st{tree->root(), n.note.nullifier, recipient, denom};
    auto blob = world_.backend->prove(st, w);
    if (n.venue == Venue::Zk) {
      world_.zk->withdraw(st, blob, now(), recipient.str());
    } else {
      world_.plain->withdraw(st, blob, now(), recipient.str());
    }
    n.spent = true;
    n.withdrawal = st;
    n.witness = w;
  });
}

bool ActorContext::prove_innocence(std::size_t index) {
  const auto& n = notes().at(index);
  if (!world_.exclusion || !n.withdrawal) return false;
  const std::string actor = n.withdrawal->recipient.str();
  PoIStatement st{*n.withdrawal, world_.exclusion->snapshot()};
  Params params{{"recipient", actor}, {"nullifier", n.withdrawal->nullifier.to_hex()},
                {"list", to_hex(st.list.digest)}, {"list_size", std::to_string(st.list.entries.size())}};
  bool valid = false;
  bool ok = attempt(world_.chain, actor, "poi.check", params, [&] {
    auto blob = world_.backend->prove_poi(st, *n.witness);
    if (!check_poi(*world_.exclusion, *world_.backend, st, blob)) throw Error(Errc::InvalidProof, "PoI rejected");
    valid = true;
  });
  if (ok) world_.chain.log(actor, "poi.check", std::move(params));
  return ok && valid;
}

bool ActorContext::transfer(const AccountId& to, Amount amount) {
  return attempt(world_.chain, self().str(), "transfer", {{"to", to.str()}, {"amount", std::to_string(amount)}},
                 [&] { world_.chain.transfer(self(), to, amount, self().str()); });
}

bool ActorContext::freeze(PreDepositId id) {
  return attempt(world_.chain, self().str(), "zk.freeze", {{"id", std::to_string(id)}}, [&] {
    if (!world_.multisig) throw Error(Errc::Unauthorized, "no verifier multisig");
    world_.multisig->freeze_deposit(self(), id, now());
  });
}

bool ActorContext::unfreeze(PreDepositId id) {
  return attempt(world_.chain, self().str(), "zk.unfreeze", {{"id", std::to_string(id)}}, [&] {
    if (!world_.multisig) throw Error(Errc::Unauthorized, "no verifier multisig");
    world_.multisig->unfreeze_deposit(self(), id, now());
  });
}

std::optional<ProposalId> ActorContext::propose(PreDepositId id, const Motion& motion) {
  std::optional<ProposalId> out;
  attempt(world_.chain, self().str(), "ms.propose",
          {{"deposit", std::to_string(id)}, {"action", std::string(to_string(motion.action))}}, [&] {
            if (!world_.multisig) throw Error(Errc::Unauthorized, "no verifier multisig");
            out = world_.multisig->propose(self(), id, motion, now());
          });
  return out;
}

bool ActorContext::vote(ProposalId id, Ballot ballot) {
  return attempt(world_.chain, self().str(), "ms.vote",
                 {{"proposal", std::to_string(id)}, {"ballot", ballot == Ballot::Yes ? "yes" : "no"}}, [&] {
                   if (!world_.multisig) throw Error(Errc::Unauthorized, "no verifier multisig");
                   world_.multisig->vote(self(), id, ballot, now());
                 });
}

bool ActorContext::tally(ProposalId id) {
  return attempt(world_.chain, self().str(), "ms.tally", {{"proposal", std::to_string(id)}}, [&] {
    if (!world_.multisig) throw Error(Errc::Unauthorized, "no verifier multisig");
    world_.multisig->tally(id, now(), self().str());
  });
}

bool ActorContext::add_verifier(const AccountId& v) {
  return attempt(world_.chain, self().str(), "ms.add_verifier", {{"verifier", v.str()}}, [&] {
    if (!world_.multisig) throw Error(Errc::Unauthorized, "no verifier multisig");
    world_.multisig->add_verifier(self(), v, now());
  });
}

bool ActorContext::remove_verifier(const AccountId& v) {
  return attempt(world_.chain, self().str(), "ms.remove_verifier", {{"verifier", v.str()}}, [&] {
    if (!world_.multisig) throw Error(Errc::Unauthorized, "no verifier multisig");
    world_.multisig->remove_verifier(self(), v, now());
  });
}

bool ActorContext::list_add(const std::string& commitment_hex) {
  if (!world_.exclusion) return false;
  Commitment c{world_.scheme->field().from_hex(commitment_hex)};
  if (world_.exclusion->contains(c)) return true;
  world_.exclusion->tag(c, now());
  world_.chain.log(self().str(), "poi.list_add",
                   {{"commitment", commitment_hex}, {"list", to_hex(world_.exclusion->snapshot().digest)}});
  return true;
}

// ---------------------------------------------------------------------------
// World
// ---------------------------------------------------------------------------

World::World(const ScenarioScript& s)
    : script(s),
      scheme(s.hash_params ? make_hash_scheme(HashParams::parse(*s.hash_params)) : default_hash_scheme()),
      backend(std::make_shared<AttestedWitnessBackend>(scheme, backend_key(s.seed))),
      chain(s.chain.prices),
      rng(seeded(s.seed, 0)) {
  chain.subscribe([this](const Transfer& t) { taint.observe(t); });
  for (const auto& a : s.chain.accounts) {
    chain.create_account(a.id, a.balance);
    if (a.taint && a.balance > 0) taint.taint_account(a.id, *a.taint, a.balance);
  }
  for (std::size_t i = 0; i < s.actors.size(); ++i) {
    const auto& spec = s.actors[i];
    if (!chain.has_account(spec.id)) chain.create_account(spec.id, 0);
    actors.push_back(Actor{spec.id, make_strategy(spec.strategy, spec.params, "actors[" + std::to_string(i) + "]"),
                           {}, seeded(s.seed, i + 1)});
  }
  if (s.zk_mixer) {
    MixerConfig cfg = *s.zk_mixer;
    if (s.consensus) cfg.allow_confiscation = s.consensus->allow_confiscation;
    zk = std::make_unique<ZkMixer>(cfg, chain, scheme, backend);
    escrows.insert(zk->staging_account());
    escrows.insert(zk->pool_account());
    taint.track_lots(zk->staging_account());
    taint.track_lots(zk->pool_account());
    if (s.consensus) {
      multisig = std::make_unique<MultiSig>(
          ConsensusConfig{s.consensus->manager, s.consensus->verifiers, s.consensus->proposal_expiry}, *zk, chain);
    }
  }
  if (s.plain_mixer) {
    const auto& p = *s.plain_mixer;
    plain = std::make_unique<PlainMixer>(p.name, p.denomination, chain, scheme, backend, p.tree_depth, p.root_history);
    escrows.insert(plain->pool_account());
    taint.track_lots(plain->pool_account());
    exclusion = std::make_unique<ExclusionList>(scheme);
  }
  for (const auto& c : {"supply_conserved", "balances_bounded", "taint_conserved", "mixer_value_conserved",
                        "withdrawals_bounded", "nullifier_single_use", "fail_open_admission",
                        "no_confiscation_when_disabled", "settled_deposits_outside_tree", "single_open_proposal"}) {
    checks_.push_back({c, true, {}});
  }
}

void World::fail(const std::string& name, const std::string& detail) {
  for (auto& c : checks_) {
    if (c.name == name && c.passed) {
      c.passed = false;
      c.detail = detail;
    }
  }
}

void World::execute(const ScheduledAction& a) {
  auto it = std::find_if(actors.begin(), actors.end(), [&](const Actor& x) { return x.id == a.actor; });
  ActorContext ctx(*this, static_cast<std::size_t>(it - actors.begin()));
  ParamReader r(a.args, "schedule." + a.action);
  if (a.action == "transfer") {
    ctx.transfer(AccountId(r.str("to")), r.u64("amount"));
  } else if (a.action == "add_verifier") {
    ctx.add_verifier(AccountId(r.str("verifier")));
  } else if (a.action == "remove_verifier") {
    ctx.remove_verifier(AccountId(r.str("verifier")));
  } else if (a.action == "freeze") {
    ctx.freeze(r.u64("deposit"));
  } else if (a.action == "unfreeze") {
    ctx.unfreeze(r.u64("deposit"));
  } else if (a.action == "propose") {
    auto action = parse_proposal_action(r.str("action"));
    Motion m{action, AccountId(r.str("target", ""))};
    ctx.propose(r.u64("deposit"), m);
  } else if (a.action == "vote") {
    ctx.vote(r.u64("proposal"), r.str("ballot") == "yes" ? Ballot::Yes : Ballot::No);
  } else if (a.action == "tally") {
    ctx.tally(r.u64("proposal"));
  } else if (a.action == "deposit") {
    auto venue = r.str("mixer", zk ? "zk" : "plain") == "zk" ? Venue::Zk : Venue::Plain;
    ctx.deposit(a.actor, venue);
  } else if (a.action == "approve") {
    ctx.approve(r.u64("note", 0));
  } else if (a.action == "withdraw") {
    auto to = r.has("recipient") ? AccountId(r.str("recipient")) : ctx.fresh_account();
    ctx.withdraw(r.u64("note", 0), to);
  }
}

void World::check_tick_invariants(Tick t) {
  const auto at = " at tick " + std::to_string(t);
  const Amount supply = chain.total_supply();
  if (supply != chain.genesis_supply()) {
    fail("supply_conserved",
         "supply " + std::to_string(supply) + " != genesis " + std::to_string(chain.genesis_supply()) + at);
  }
  for (const auto& [id, bal] : chain.balances()) {
    if (bal > chain.genesis_supply()) fail("balances_bounded", id.str() + " exceeds total supply" + at);
  }
  if (!taint.conserved()) fail("taint_conserved", "tainted value drifted" + at);
  if (zk) {
    const auto& l = zk->ledger();
    const Amount held = chain.balance(zk->staging_account()) + chain.balance(zk->pool_account());
    if (l.deposited != held + l.refunded + l.confiscated + l.withdrawn) {
      fail("mixer_value_conserved", "zk mixer debits do not match escrow + outflows" + at);
    }
    if (l.withdrawals > l.admissions) fail("withdrawals_bounded", "more withdrawals than admissions" + at);
  }
  if (plain) {
    const Amount expect = plain->denomination() * (plain->tree().size() - plain->withdrawals());
    if (chain.balance(plain->pool_account()) != expect) {
      fail("mixer_value_conserved", "plain pool balance does not match deposits - withdrawals" + at);
    }
    if (plain->withdrawals() > plain->tree().size()) {
      fail("withdrawals_bounded", "more withdrawals than deposits" + at);
    }
  }
  if (multisig) {
    std::map<PreDepositId, int> open;
    for (const auto& p : multisig->proposals()) {
      if (p.status == ProposalStatus::Open && ++open[p.deposit] > 1) {
        fail("single_open_proposal", "deposit " + std::to_string(p.deposit) + " has two open proposals" + at);
      }
    }
  }
}

void World::check_final_invariants() {
  std::map<std::string, int> payouts;
  const auto& records = chain.events().records();
  for (const auto& e : records) {
    if (e.ok() && (e.operation == "zk.withdraw" || e.operation == "plain.withdraw")) {
      if (++payouts[*e.param("mixer") + "/" + *e.param("nullifier")] > 1) {
        fail("nullifier_single_use", "nullifier paid twice: " + *e.param("nullifier"));
      }
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& e = records[i];
    if (!e.ok() || e.operation != "ms.tally") continue;
    const auto action = *e.param("action");
    const auto status = *e.param("status");
    if (action == "Confiscate" && status == "Passed" && zk && !zk->config().allow_confiscation) {
      fail("no_confiscation_when_disabled", "confiscation passed for deposit " + *e.param("deposit"));
    }
    if (status != "Failed" || action == "Approve") continue;
    // fail-open: the deposit must be admitted by this tally unless it was already settled
    const auto dep = *e.param("deposit");
    const auto& d = zk->pre_deposit(std::stoull(dep));
    bool settled_before = false;
    for (const auto& [state, tick] : d.history) {
      if (tick < e.tick && (state == DepositState::Admitted || state == DepositState::Refunded ||
                            state == DepositState::Confiscated)) {
        settled_before = true;
      }
    }
    bool admitted = false;
    for (std::size_t j = i + 1; j < records.size() && !admitted; ++j) {
      const auto& f = records[j];
      admitted = f.ok() && f.operation == "zk.admit" && f.param("id") == dep;
    }
    if (!admitted && !settled_before && d.state != DepositState::Admitted) {
      fail("fail_open_admission", "failed " + action + " on deposit " + dep + " was not followed by admission");
    }
  }
  if (zk) {
    for (const auto& d : zk->pre_deposits()) {
      if (d.state == DepositState::Refunded || d.state == DepositState::Confiscated) {
        if (zk->tree().find_leaf(d.commitment.value)) {
          fail("settled_deposits_outside_tree", "deposit " + std::to_string(d.id) + " reached the tree");
        }
      }
    }
  }
  if (zk && !zk->config().allow_confiscation) {
    for (const auto& e : records) {
      if (e.ok() && e.operation == "zk.confiscate") fail("no_confiscation_when_disabled", "zk.confiscate event");
    }
  }
}

bool World::quiescent(Tick t) const {
  for (std::size_t i = 0; i < actors.size(); ++i) {
    ActorContext ctx(const_cast<World&>(*this), i);
    if (!actors[i].strategy->idle(ctx)) return false;
  }
  if (zk) {
    for (const auto& d : zk->pre_deposits()) {
      if (!d.terminal()) return false;
    }
  }
  if (multisig) {
    for (const auto& p : multisig->proposals()) {
      if (p.status == ProposalStatus::Open) return false;
    }
  }
  for (const auto& r : script.tag_reports) if (r.tick > t) return false;
  for (const auto& a : script.schedule) if (a.tick > t) return false;
  for (const auto& f : script.faults) if (f.tick > t) return false;
  return true;
}

Report World::run() {
  Tick last = 0;
  for (Tick t = 0; t <= script.tick_limit; ++t) {
    now = t;
    last = t;
    chain.advance_to(t);
    if (zk) zk->on_tick(t);
    if (multisig) {
      try {
        multisig->on_tick(t);
      } catch (const Error& e) {
        chain.log("multisig", "ms.expire", {{"error", e.what()}}, std::string(to_string(e.code())));
      }
    }
    for (const auto& r : script.tag_reports) {
      if (r.tick == t) chain.log("oracle", "tag.report", {{"account", r.account.str()}, {"label", r.label}});
    }
    for (const auto& a : script.schedule) {
      if (a.tick == t) execute(a);
    }
    for (std::size_t i = 0; i < actors.size(); ++i) {
      ActorContext ctx(*this, i);
      actors[i].strategy->on_tick(ctx);
    }
    for (const auto& f : script.faults) {
      if (f.tick == t) chain.inject_fault_mint(f.account, f.amount);
    }
    check_tick_invariants(t);
    if (quiescent(t)) break;
  }
  now = last;
  check_final_invariants();
  return build_report();
}

Report World::build_report() {
  Report r;
  r.scenario = script.name;
  r.expect = script.expect;
  r.seed = script.seed;
  r.tick_limit = script.tick_limit;
  r.last_tick = now;
  r.ticks_per_hour = script.chain.ticks_per_hour;
  r.events = chain.events();
  r.final_balances = chain.balances();
  r.cost = chain.gas().report();
  for (const auto& c : checks_) r.invariants.push_back({c.name, c.passed, c.detail});
  r.taint_anomalies = taint.anomalies();
  if (zk) {
    for (const auto& d : zk->pre_deposits()) {
      r.lifecycle.push_back({zk->config().name, d.id, d.depositor, d.commitment.value.to_hex(), d.deposit_tick,
                             d.unlock_tick, d.history});
    }
    r.tree_escrow_taint = taint.escrow_taint(zk->pool_account());
  } else if (plain) {
    r.tree_escrow_taint = taint.escrow_taint(plain->pool_account());
  }

  // Verdict: any launderer that got tainted value through every imposed check wins.
  const LaunderProgress* first = nullptr;
  for (const auto& a : actors) {
    const auto* p = a.strategy->launder_progress();
    if (!p) continue;
    AttackOutcome o;
    o.actor = a.id.str();
    o.terminal_account = p->terminal.str();
    o.poi_valid = p->poi_valid;
    o.hops_completed = p->hops_completed;
    const bool completed = p->finished && !p->blocked;
    if (completed) {
      o.terminal_taint = taint.tainted(p->terminal);
      const bool compliant = !p->compliance_required || p->poi_valid;
      if (o.terminal_taint > 0 && compliant) {
        o.verdict = AttackVerdict::AttackSucceeded;
      } else {
        o.verdict = AttackVerdict::AttackBlocked;
        o.stage = compliant ? "Untainted" : "ComplianceCheck";
      }
    } else {
      o.verdict = AttackVerdict::AttackBlocked;
      o.stage = p->stage;
      if (!p->terminal.empty()) o.terminal_taint = taint.tainted(p->terminal);
    }
    if (o.verdict == AttackVerdict::AttackSucceeded) {
      r.attack = o;
      first = p;
      break;
    }
    if (!first) {
      first = p;
      r.attack = o;
    }
  }
  return r;
}

}  // namespace zkmixer::detail

namespace zkmixer {

Report run_scenario(const ScenarioScript& script) {
  validate_scenario(script);
  detail::World world(script);
  return world.run();
}

}  // namespace zkmixer

#pragma once

#include "zkmixer/consensus.hpp"
#include "zkmixer/poi.hpp"
#include "zkmixer/scenario.hpp"
#include "zkmixer/taint.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace zkmixer::detail {

enum class Venue { Zk, Plain };

struct OwnedNote {
  Note note;
  Venue venue = Venue::Zk;
  AccountId depositor;
  Tick deposited = 0;
  std::optional<PreDepositId> pre_deposit;
  bool spent = false;
  std::optional<WithdrawStatement> withdrawal;
  std::optional<WithdrawWitness> witness;
};

/// What a laundering actor reports back for adjudication.
struct LaunderProgress {
  bool finished = false;
  bool blocked = false;
  std::string stage;  // stage reached (blocked at, or pending when the run ended)
  AccountId terminal;
  bool compliance_required = false;
  bool poi_valid = false;
  std::uint64_t hops_completed = 0;
};

class World;

/// An actor's window onto the world: public state plus its own notes.
class ActorContext {
 public:
  ActorContext(World& world, std::size_t index) : world_(world), index_(index) {}

  Tick now() const;
  const AccountId& self() const;
  const EventLog& log() const;
  const ZkMixer* zk() const;
  const MultiSig* multisig() const;
  const PlainMixer* plain() const;
  const ExclusionList* exclusion_list() const;
  bool poi_required() const;
  std::optional<Venue> default_venue() const;
  bool is_escrow(const AccountId& a) const;
  Amount balance(const AccountId& a) const;
  bool in_roster() const;

  std::vector<OwnedNote>& notes();
  const std::vector<OwnedNote>& notes() const;

  AccountId fresh_account();
  std::optional<std::size_t> deposit(const AccountId& from, Venue venue);
  bool approve(std::size_t note);
  bool withdraw(std::size_t note, const AccountId& recipient);
  bool prove_innocence(std::size_t note);
  bool transfer(const AccountId& to, Amount amount);

  bool freeze(PreDepositId id);
  bool unfreeze(PreDepositId id);
  std::optional<ProposalId> propose(PreDepositId id, const Motion& motion);
  bool vote(ProposalId id, Ballot ballot);
  bool tally(ProposalId id);
  bool add_verifier(const AccountId& v);
  bool remove_verifier(const AccountId& v);
  bool list_add(const std::string& commitment_hex);

 private:
  World& world_;
  std::size_t index_;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual void on_tick(ActorContext& ctx) = 0;
  /// No pending intentions.
  virtual bool idle(const ActorContext& ctx) const = 0;
  virtual const LaunderProgress* launder_progress() const { return nullptr; }
};

/// Throws Error(ValidationError) naming `where` + the bad parameter.
std::unique_ptr<Strategy> make_strategy(const std::string& name, const nlohmann::json& params,
                                        const std::string& where);
bool is_known_strategy(const std::string& name);
const std::vector<std::string>& strategy_names();

struct Actor {
  AccountId id;
  std::unique_ptr<Strategy> strategy;
  std::vector<OwnedNote> notes;
  std::mt19937_64 rng;
};

class World {
 public:
  explicit World(const ScenarioScript& script);
  Report run();

  const ScenarioScript& script;
  std::shared_ptr<const HashScheme> scheme;
  std::shared_ptr<const AttestedWitnessBackend> backend;
  SimChain chain;
  TaintTracker taint;
  std::unique_ptr<ZkMixer> zk;
  std::unique_ptr<MultiSig> multisig;
  std::unique_ptr<PlainMixer> plain;
  std::unique_ptr<ExclusionList> exclusion;
  std::vector<Actor> actors;
  std::set<AccountId> escrows;
  std::mt19937_64 rng;
  Tick now = 0;

  void execute(const ScheduledAction& action);

 private:
  bool quiescent(Tick t) const;
  void check_tick_invariants(Tick t);
  void check_final_invariants();
  Report build_report();

  struct Check {
    std::string name;
    bool passed = true;
    std::string detail;
  };
  void fail(const std::string& name, const std::string& detail);
  std::vector<Check> checks_;
};

/// Reads strategy / action parameters with field-named validation errors.
class ParamReader {
 public:
  ParamReader(const nlohmann::json& j, std::string where);

  std::uint64_t u64(const char* key, std::uint64_t fallback) const;
  std::uint64_t u64(const char* key) const;
  bool boolean(const char* key, bool fallback) const;
  std::string str(const char* key, std::string fallback) const;
  std::string str(const char* key) const;
  std::optional<std::uint64_t> opt_u64(const char* key) const;
  std::vector<std::string> str_list(const char* key) const;
  bool has(const char* key) const { return j_.contains(key); }
  void allow_only(std::initializer_list<const char*> keys) const;
  [[noreturn]] void fail(const char* key, const std::string& why) const;

 private:
  const nlohmann::json& j_;
  std::string where_;
};

std::string stage_name(std::uint64_t hop, std::string_view what);

}  // namespace zkmixer::detail

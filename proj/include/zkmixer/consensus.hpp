#pragma once

#include "zkmixer/chain.hpp"
#include "zkmixer/mixer.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace zkmixer {

enum class ProposalAction { Refund, Confiscate, Approve };
enum class Ballot { Yes, No };
enum class ProposalStatus { Open, Passed, Failed };

std::string_view to_string(ProposalAction a);
std::string_view to_string(ProposalStatus s);
ProposalAction parse_proposal_action(std::string_view text);

struct Motion {
  ProposalAction action = ProposalAction::Refund;
  AccountId target;  // Confiscate only

  static Motion refund() { return {ProposalAction::Refund, {}}; }
  static Motion approve() { return {ProposalAction::Approve, {}}; }
  static Motion confiscate(AccountId to) { return {ProposalAction::Confiscate, std::move(to)}; }
};

using ProposalId = std::uint64_t;

struct Proposal {
  ProposalId id = 0;
  PreDepositId deposit = 0;
  Motion motion;
  AccountId proposer;
  std::map<AccountId, Ballot> votes;
  ProposalStatus status = ProposalStatus::Open;
  Tick opened = 0;
  std::optional<Tick> expires;
  std::optional<Tick> closed;
  bool roster_changed = false;
  bool expired = false;

  std::size_t yes_count() const;
};

struct ConsensusConfig {
  AccountId manager;
  std::vector<AccountId> verifiers;
  std::optional<Tick> proposal_expiry;  // ticks after opening
};

/// Strict majority of the full roster: 2 * yes > roster.
constexpr bool strict_majority(std::size_t yes, std::size_t roster) { return 2 * yes > roster; }

/// Verifier multiSig. Holds the mixer's authority exclusively; any single
/// verifier may freeze, decisions go through propose/vote/tally.
class MultiSig {
 public:
  MultiSig(ConsensusConfig config, ZkMixer& mixer, SimChain& chain);

  void add_verifier(const AccountId& caller, const AccountId& v, Tick tick);
  void remove_verifier(const AccountId& caller, const AccountId& v, Tick tick);

  void freeze_deposit(const AccountId& caller, PreDepositId id, Tick tick);
  void unfreeze_deposit(const AccountId& caller, PreDepositId id, Tick tick);

  ProposalId propose(const AccountId& caller, PreDepositId id, const Motion& motion, Tick tick);
  void vote(const AccountId& caller, ProposalId id, Ballot ballot, Tick tick);
  /// Counts Yes votes of current roster members only. Passed motions are
  /// executed; a failed Refund/Confiscate admits the deposit.
  ProposalStatus tally(ProposalId id, Tick tick, const std::string& actor);

  /// Fails (and executes the failure path of) proposals past their expiry.
  void on_tick(Tick tick);

  bool is_verifier(const AccountId& a) const;
  const std::vector<AccountId>& roster() const noexcept { return verifiers_; }
  const AccountId& manager() const noexcept { return config_.manager; }
  const std::vector<Proposal>& proposals() const noexcept { return proposals_; }
  const Proposal& proposal(ProposalId id) const;
  std::optional<ProposalId> open_proposal_for(PreDepositId id) const;
  const ZkMixer& mixer() const noexcept { return mixer_; }

 private:
  void require_manager(const AccountId& caller) const;
  void require_verifier(const AccountId& caller) const;
  Proposal& find(ProposalId id);
  void mark_roster_change();
  ProposalStatus close(Proposal& p, bool passed, Tick tick, const std::string& actor);

  ConsensusConfig config_;
  ZkMixer& mixer_;
  SimChain& chain_;
  std::unique_ptr<MixerAuthority> authority_;
  std::vector<AccountId> verifiers_;
  std::vector<Proposal> proposals_;
  std::map<PreDepositId, ProposalId> open_by_deposit_;
};

}  // namespace zkmixer

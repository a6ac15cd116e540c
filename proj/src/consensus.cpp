#include "zkmixer/consensus.hpp"

#include "zkmixer/error.hpp"

#include <algorithm>

namespace zkmixer {

std::string_view to_string(ProposalAction a) {
  switch (a) {
    case ProposalAction::Refund: return "refund";
    case ProposalAction::Confiscate: return "confiscate";
    case ProposalAction::Approve: return "approve";
  }
  return "?";
}

std::string_view to_string(ProposalStatus s) {
  switch (s) {
    case ProposalStatus::Open: return "Open";
    case ProposalStatus::Passed: return "Passed";
    case ProposalStatus::Failed: return "Failed";
  }
  return "?";
}

ProposalAction parse_proposal_action(std::string_view text) {
  for (auto a : {ProposalAction::Refund, ProposalAction::Confiscate, ProposalAction::Approve}) {
    if (to_string(a) == text) return a;
  }
  throw Error(Errc::ValidationError, "unknown proposal action '" + std::string(text) + "'");
}

std::size_t Proposal::yes_count() const {
  return static_cast<std::size_t>(
      std::count_if(votes.begin(), votes.end(), [](const auto& kv) { return kv.second == Ballot::Yes; }));
}

MultiSig::MultiSig(ConsensusConfig config, ZkMixer& mixer, SimChain& chain)
    : config_(std::move(config)), mixer_(mixer), chain_(chain), authority_(mixer.issue_authority()) {
  if (config_.manager.empty()) throw Error(Errc::ValidationError, "consensus.manager: must be set");
  for (const auto& v : config_.verifiers) {
    if (is_verifier(v)) throw Error(Errc::DuplicateVerifier, "consensus.verifiers: duplicate '" + v.str() + "'");
    verifiers_.push_back(v);
  }
}

bool MultiSig::is_verifier(const AccountId& a) const {
  return std::find(verifiers_.begin(), verifiers_.end(), a) != verifiers_.end();
}

void MultiSig::require_manager(const AccountId& caller) const {
  if (caller != config_.manager) throw Error(Errc::Unauthorized, caller.str() + " is not the manager");
}

void MultiSig::require_verifier(const AccountId& caller) const {
  if (!is_verifier(caller)) throw Error(Errc::Unauthorized, caller.str() + " is not a verifier");
}

Proposal& MultiSig::find(ProposalId id) {
  if (id >= proposals_.size()) throw Error(Errc::NoSuchProposal, "no proposal " + std::to_string(id));
  return proposals_[id];
}

const Proposal& MultiSig::proposal(ProposalId id) const {
  if (id >= proposals_.size()) throw Error(Errc::NoSuchProposal, "no proposal " + std::to_string(id));
  return proposals_[id];
}

std::optional<ProposalId> MultiSig::open_proposal_for(PreDepositId id) const {
  auto it = open_by_deposit_.find(id);
  if (it == open_by_deposit_.end()) return std::nullopt;
  return it->second;
}

void MultiSig::mark_roster_change() {
  for (auto& p : proposals_) {
    if (p.status == ProposalStatus::Open) p.roster_changed = true;
  }
}

void MultiSig::add_verifier(const AccountId& caller, const AccountId& v, Tick tick) {
  chain_.advance_to(tick);
  require_manager(caller);
  if (is_verifier(v)) throw Error(Errc::DuplicateVerifier, v.str());
  verifiers_.push_back(v);
  mark_roster_change();
  chain_.gas().charge(op::kAddVerifier);
  chain_.log(caller.str(), "ms.add_verifier", {{"verifier", v.str()}});
}

void MultiSig::remove_verifier(const AccountId& caller, const AccountId& v, Tick tick) {
  chain_.advance_to(tick);
  require_manager(caller);
  auto it = std::find(verifiers_.begin(), verifiers_.end(), v);
  if (it == verifiers_.end()) throw Error(Errc::NoSuchVerifier, v.str());
  verifiers_.erase(it);
  mark_roster_change();
  chain_.gas().charge(op::kRemoveVerifier);
  chain_.log(caller.str(), "ms.remove_verifier", {{"verifier", v.str()}});
}

void MultiSig::freeze_deposit(const AccountId& caller, PreDepositId id, Tick tick) {
  require_verifier(caller);
  mixer_.freeze(*authority_, id, tick, caller.str());
}

void MultiSig::unfreeze_deposit(const AccountId& caller, PreDepositId id, Tick tick) {
  require_verifier(caller);
  if (open_by_deposit_.count(id)) throw Error(Errc::ProposalExists, "deposit has an open proposal");
  mixer_.unfreeze(*authority_, id, tick, caller.str());
}

ProposalId MultiSig::propose(const AccountId& caller, PreDepositId id, const Motion& motion, Tick tick) {
  chain_.advance_to(tick);
  require_verifier(caller);
  const auto& d = mixer_.pre_deposit(id);
  if (motion.action == ProposalAction::Confiscate) {
    if (!mixer_.config().allow_confiscation) throw Error(Errc::ConfiscationDisabled, "mixer only allows refunds");
    if (motion.target.empty()) throw Error(Errc::ValidationError, "confiscation needs a target");
  }
  if (open_by_deposit_.count(id)) throw Error(Errc::ProposalExists, "deposit " + std::to_string(id));
  if (motion.action == ProposalAction::Approve) {
    if (d.state != DepositState::Pending && d.state != DepositState::Frozen) {
      throw Error(Errc::WrongState, "deposit " + std::to_string(id) + " is not awaiting approval");
    }
  } else if (d.state != DepositState::Frozen) {
    throw Error(Errc::WrongState, "deposit " + std::to_string(id) + " must be frozen first");
  }
  Proposal p;
  p.id = proposals_.size();
  p.deposit = id;
  p.motion = motion;
  p.proposer = caller;
  p.votes[caller] = Ballot::Yes;
  p.opened = tick;
  if (config_.proposal_expiry) p.expires = tick + *config_.proposal_expiry;
  proposals_.push_back(p);
  open_by_deposit_[id] = p.id;
  chain_.gas().charge(op::kPropose);
  std::vector<std::pair<std::string, std::string>> params{{"proposal", std::to_string(p.id)},
                                                          {"deposit", std::to_string(id)},
                                                          {"action", std::string(to_string(motion.action))}};
  if (motion.action == ProposalAction::Confiscate) params.emplace_back("target", motion.target.str());
  chain_.log(caller.str(), "ms.propose", std::move(params));
  return p.id;
}

void MultiSig::vote(const AccountId& caller, ProposalId id, Ballot ballot, Tick tick) {
  chain_.advance_to(tick);
  require_verifier(caller);
  auto& p = find(id);
  if (p.status != ProposalStatus::Open) throw Error(Errc::ProposalClosed, "proposal " + std::to_string(id));
  if (p.votes.count(caller)) throw Error(Errc::AlreadyVoted, caller.str());
  p.votes[caller] = ballot;
  chain_.gas().charge(op::kVote);
  chain_.log(caller.str(), "ms.vote",
             {{"proposal", std::to_string(id)}, {"ballot", ballot == Ballot::Yes ? "yes" : "no"}});
}

ProposalStatus MultiSig::close(Proposal& p, bool passed, Tick tick, const std::string& actor) {
  const auto state = mixer_.pre_deposit(p.deposit).state;
  const bool live = state == DepositState::Pending || state == DepositState::Frozen;
  const bool admits = live && (p.motion.action == ProposalAction::Approve ? passed : !passed);
  if (admits && mixer_.tree().size() >= mixer_.tree().capacity()) {
    throw Error(Errc::TreeFull, "cannot admit deposit " + std::to_string(p.deposit));
  }
  p.status = passed ? ProposalStatus::Passed : ProposalStatus::Failed;
  p.closed = tick;
  open_by_deposit_.erase(p.deposit);
  chain_.log(actor, "ms.tally",
             {{"proposal", std::to_string(p.id)},
              {"deposit", std::to_string(p.deposit)},
              {"action", std::string(to_string(p.motion.action))},
              {"status", std::string(to_string(p.status))},
              {"yes", std::to_string(p.yes_count())},
              {"roster", std::to_string(verifiers_.size())},
              {"roster_changed", p.roster_changed ? "true" : "false"},
              {"expired", p.expired ? "true" : "false"}});

  if (!live) return p.status;  // settled some other way while the vote ran
  if (admits) {
    mixer_.admit_by_consensus(*authority_, p.deposit, tick, actor);
  } else if (passed) {
    mixer_.resolve(*authority_, p.deposit,
                   p.motion.action == ProposalAction::Refund ? Resolution::refund()
                                                             : Resolution::confiscate(p.motion.target),
                   tick, actor);
  }
  return p.status;
}

ProposalStatus MultiSig::tally(ProposalId id, Tick tick, const std::string& actor) {
  chain_.advance_to(tick);
  auto& p = find(id);
  if (p.status != ProposalStatus::Open) throw Error(Errc::ProposalClosed, "proposal " + std::to_string(id));
  if (p.expires && tick > *p.expires) {
    p.expired = true;
    chain_.gas().charge(op::kTally);
    return close(p, false, tick, actor);
  }
  std::size_t yes = 0;
  for (const auto& [who, ballot] : p.votes) {
    if (ballot == Ballot::Yes && is_verifier(who)) ++yes;
  }
  chain_.gas().charge(op::kTally);
  return close(p, strict_majority(yes, verifiers_.size()), tick, actor);
}

void MultiSig::on_tick(Tick tick) {
  for (auto& p : proposals_) {
    if (p.status == ProposalStatus::Open && p.expires && tick > *p.expires) {
      p.expired = true;
      close(p, false, tick, "multisig");
    }
  }
}

}  // namespace zkmixer

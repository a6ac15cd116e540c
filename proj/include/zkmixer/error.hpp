#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zkmixer {

enum class Errc {
  InvalidParameters,
  InvalidEncoding,
  TreeFull,
  NoSuchLeaf,
  MalformedPath,
  InvalidWitness,
  CommitmentExcluded,
  InvalidStatement,
  WrongDenomination,
  DuplicateCommitment,
  InsufficientFunds,
  PredicateRejected,
  NotOwner,
  StillLocked,
  FrozenDeposit,
  WrongMode,
  WrongState,
  Unauthorized,
  ConfiscationDisabled,
  InvalidProof,
  UnknownRoot,
  NullifierSpent,
  NonMonotonicTick,
  DuplicateVerifier,
  NoSuchVerifier,
  ProposalExists,
  AlreadyVoted,
  ProposalClosed,
  UnknownOperation,
  NoSuchDeposit,
  NoSuchProposal,
  NoSuchAccount,
  ParseError,
  ValidationError,
};

std::string_view to_string(Errc code);

/// Protocol and validation failures. The code is stable and is what ends up in
/// event-log outcomes; the message is diagnostic only.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace zkmixer

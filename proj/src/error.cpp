#include "zkmixer/error.hpp"

namespace zkmixer {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidParameters: return "InvalidParameters";
    case Errc::InvalidEncoding: return "InvalidEncoding";
    case Errc::TreeFull: return "TreeFull";
    case Errc::NoSuchLeaf: return "NoSuchLeaf";
    case Errc::MalformedPath: return "MalformedPath";
    case Errc::InvalidWitness: return "InvalidWitness";
    case Errc::CommitmentExcluded: return "CommitmentExcluded";
    case Errc::InvalidStatement: return "InvalidStatement";
    case Errc::WrongDenomination: return "WrongDenomination";
    case Errc::DuplicateCommitment: return "DuplicateCommitment";
    case Errc::InsufficientFunds: return "InsufficientFunds";
    case Errc::PredicateRejected: return "PredicateRejected";
    case Errc::NotOwner: return "NotOwner";
    case Errc::StillLocked: return "StillLocked";
    case Errc::FrozenDeposit: return "FrozenDeposit";
    case Errc::WrongMode: return "WrongMode";
    case Errc::WrongState: return "WrongState";
    case Errc::Unauthorized: return "Unauthorized";
    case Errc::ConfiscationDisabled: return "ConfiscationDisabled";
    case Errc::InvalidProof: return "InvalidProof";
    case Errc::UnknownRoot: return "UnknownRoot";
    case Errc::NullifierSpent: return "NullifierSpent";
    case Errc::NonMonotonicTick: return "NonMonotonicTick";
    case Errc::DuplicateVerifier: return "DuplicateVerifier";
    case Errc::NoSuchVerifier: return "NoSuchVerifier";
    case Errc::ProposalExists: return "ProposalExists";
    case Errc::AlreadyVoted: return "AlreadyVoted";
    case Errc::ProposalClosed: return "ProposalClosed";
    case Errc::UnknownOperation: return "UnknownOperation";
    case Errc::NoSuchDeposit: return "NoSuchDeposit";
    case Errc::NoSuchProposal: return "NoSuchProposal";
    case Errc::NoSuchAccount: return "NoSuchAccount";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

}  // namespace zkmixer

#include "zkmixer/poi.hpp"

#include "zkmixer/error.hpp"

namespace zkmixer {

PlainMixer::PlainMixer(std::string name, Amount denomination, SimChain& chain,
                       std::shared_ptr<const HashScheme> scheme, std::shared_ptr<const ProofBackend> backend,
                       unsigned depth, std::size_t root_history)
    : name_(std::move(name)),
      denomination_(denomination),
      chain_(chain),
      scheme_(std::move(scheme)),
      backend_(std::move(backend)),
      tree_(scheme_, depth, root_history),
      pool_(name_ + ".pool") {
  if (denomination_ == 0) throw Error(Errc::ValidationError, "denomination: must be positive");
  if (!backend_) throw Error(Errc::InvalidParameters, "mixer needs a proof backend");
  chain_.create_account(pool_);
}

std::uint64_t PlainMixer::deposit(const AccountId& from, const Commitment& commitment, Amount amount, Tick tick) {
  chain_.advance_to(tick);
  if (amount != denomination_) {
    throw Error(Errc::WrongDenomination, "expected " + std::to_string(denomination_) + ", got " + std::to_string(amount));
  }
  if (commitments_.count(commitment)) throw Error(Errc::DuplicateCommitment, commitment.value.to_hex());
  if (tree_.size() >= tree_.capacity()) throw Error(Errc::TreeFull, "mixer tree is full");
  chain_.transfer(from, pool_, amount, from.str(), LotRef{LotRef::Kind::Commitment, commitment.value});
  auto leaf = tree_.insert(commitment);
  commitments_.insert(commitment);
  chain_.gas().charge(op::kDeposit);
  chain_.log(from.str(), "plain.deposit",
             {{"mixer", name_},
              {"depositor", from.str()},
              {"commitment", commitment.value.to_hex()},
              {"leaf", std::to_string(leaf)},
              {"root", tree_.root().to_hex()}});
  return leaf;
}

void PlainMixer::withdraw(const WithdrawStatement& statement, const ProofBlob& blob, Tick tick,
                          const std::string& actor) {
  chain_.advance_to(tick);
  if (statement.denomination != denomination_) {
    throw Error(Errc::WrongDenomination, "statement is for a different denomination");
  }
  if (!backend_->verify(statement, blob)) throw Error(Errc::InvalidProof, "proof does not verify");
  if (!tree_.is_known_root(statement.root)) throw Error(Errc::UnknownRoot, statement.root.to_hex());
  if (spent_.count(statement.nullifier)) throw Error(Errc::NullifierSpent, statement.nullifier.to_hex());
  if (statement.recipient.empty()) throw Error(Errc::InvalidStatement, "empty recipient");
  chain_.transfer(pool_, statement.recipient, denomination_, actor,
                  LotRef{LotRef::Kind::Nullifier, statement.nullifier});
  spent_.insert(statement.nullifier);
  ++withdrawals_;
  chain_.gas().charge(op::kWithdraw);
  chain_.log(actor, "plain.withdraw",
             {{"mixer", name_},
              {"nullifier", statement.nullifier.to_hex()},
              {"recipient", statement.recipient.str()},
              {"root", statement.root.to_hex()}});
}

ExclusionList::ExclusionList(std::shared_ptr<const HashScheme> scheme) : scheme_(std::move(scheme)) {
  if (!scheme_) throw Error(Errc::InvalidParameters, "exclusion list needs a hash scheme");
  published_.insert(snapshot().digest);
}

bool ExclusionList::tag(const Commitment& c, Tick tick) {
  if (!entries_.insert(c).second) return false;
  log_.push_back({tick, c});
  published_.insert(snapshot().digest);
  return true;
}

ListSnapshot ExclusionList::snapshot() const {
  return ListSnapshot::of(scheme_->field(), std::vector<Commitment>(entries_.begin(), entries_.end()));
}

bool ExclusionList::is_published(const Digest32& digest) const { return published_.count(digest) != 0; }

bool check_poi(const ExclusionList& list, const ProofBackend& backend, const PoIStatement& statement,
               const ProofBlob& blob) {
  if (!list.is_published(statement.list.digest)) return false;
  return backend.verify_poi(statement, blob);
}

}  // namespace zkmixer

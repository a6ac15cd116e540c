#pragma once

#include "zkmixer/chain.hpp"
#include "zkmixer/merkle.hpp"
#include "zkmixer/proof.hpp"

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace zkmixer {

/// Baseline mixer: deposits go straight into the tree, no staging and no lock.
class PlainMixer {
 public:
  PlainMixer(std::string name, Amount denomination, SimChain& chain, std::shared_ptr<const HashScheme> scheme,
             std::shared_ptr<const ProofBackend> backend, unsigned depth = 20,
             std::size_t root_history = IncrementalMerkleTree::kDefaultRootHistory);

  PlainMixer(const PlainMixer&) = delete;
  PlainMixer& operator=(const PlainMixer&) = delete;

  std::uint64_t deposit(const AccountId& from, const Commitment& commitment, Amount amount, Tick tick);
  void withdraw(const WithdrawStatement& statement, const ProofBlob& blob, Tick tick, const std::string& actor);

  const IncrementalMerkleTree& tree() const noexcept { return tree_; }
  const std::set<FieldElement>& spent_nullifiers() const noexcept { return spent_; }
  Amount denomination() const noexcept { return denomination_; }
  const std::string& name() const noexcept { return name_; }
  const AccountId& pool_account() const noexcept { return pool_; }
  const ProofBackend& backend() const noexcept { return *backend_; }
  std::uint64_t withdrawals() const noexcept { return withdrawals_; }

 private:
  std::string name_;
  Amount denomination_;
  SimChain& chain_;
  std::shared_ptr<const HashScheme> scheme_;
  std::shared_ptr<const ProofBackend> backend_;
  IncrementalMerkleTree tree_;
  std::set<Commitment> commitments_;
  std::set<FieldElement> spent_;
  AccountId pool_;
  std::uint64_t withdrawals_ = 0;
};

/// Append-only list of commitments flagged by screening, with the tick each
/// was added. Every distinct content state is remembered as a published
/// snapshot so PoI statements can reference it by digest.
class ExclusionList {
 public:
  struct Update {
    Tick tick;
    Commitment commitment;
  };

  explicit ExclusionList(std::shared_ptr<const HashScheme> scheme);

  /// Idempotent; returns true when the commitment was new.
  bool tag(const Commitment& c, Tick tick);
  bool contains(const Commitment& c) const { return entries_.count(c) != 0; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Update>& update_log() const noexcept { return log_; }

  ListSnapshot snapshot() const;
  bool is_published(const Digest32& digest) const;

 private:
  std::shared_ptr<const HashScheme> scheme_;
  std::set<Commitment> entries_;
  std::vector<Update> log_;
  std::set<Digest32> published_;
};

/// Verifies a PoI against a snapshot this list has actually published.
bool check_poi(const ExclusionList& list, const ProofBackend& backend, const PoIStatement& statement,
               const ProofBlob& blob);

}  // namespace zkmixer

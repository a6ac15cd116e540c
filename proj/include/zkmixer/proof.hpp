#pragma once

#include "zkmixer/digest.hpp"
#include "zkmixer/hash.hpp"
#include "zkmixer/merkle.hpp"
#include "zkmixer/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace zkmixer {

/// Public withdrawal statement. Deliberately carries no commitment, leaf
/// index or path: only what a verifier and the ledger may see.
struct WithdrawStatement {
  FieldElement root;
  FieldElement nullifier;
  AccountId recipient;
  Amount denomination = 0;

  friend bool operator==(const WithdrawStatement&, const WithdrawStatement&) = default;
};

struct WithdrawWitness {
  FieldElement secret;
  FieldElement nullifier;
  std::uint64_t leaf_index = 0;
  MerklePath path;
};

/// Immutable view of an exclusion list: sorted entries plus their content digest.
struct ListSnapshot {
  std::vector<Commitment> entries;
  Digest32 digest{};

  static ListSnapshot of(const PrimeField& field, std::vector<Commitment> entries);
  bool contains(const Commitment& c) const;
};

/// Proof-of-innocence statement: the withdrawal plus the list it is
/// excluded from.
struct PoIStatement {
  WithdrawStatement withdrawal;
  ListSnapshot list;
};

struct ProofBlob {
  std::string backend_id;
  Bytes bytes;

  friend bool operator==(const ProofBlob&, const ProofBlob&) = default;
};

class ProofBackend {
 public:
  virtual ~ProofBackend() = default;

  virtual std::string_view id() const = 0;

  /// Throws Error(InvalidWitness) when the witness does not satisfy the
  /// withdrawal relation for `statement`.
  virtual ProofBlob prove(const WithdrawStatement& statement, const WithdrawWitness& witness) const = 0;
  virtual bool verify(const WithdrawStatement& statement, const ProofBlob& blob) const = 0;

  /// Additionally throws Error(CommitmentExcluded) when the spent commitment
  /// is on the list.
  virtual ProofBlob prove_poi(const PoIStatement& statement, const WithdrawWitness& witness) const = 0;
  virtual bool verify_poi(const PoIStatement& statement, const ProofBlob& blob) const = 0;
};

/// Reference backend: prove() runs the withdrawal circuit's checks
/// (commitment, path-to-root, nullifier equality) directly on the witness and
/// emits a BLAKE2b MAC over the encoded statement under a key only this
/// instance holds.
///
/// Blob layout (34 bytes): version 0x01 | kind ('W' or 'P') | 32-byte MAC.
class AttestedWitnessBackend final : public ProofBackend {
 public:
  static constexpr std::string_view kId = "attested-witness/v1";
  static constexpr std::size_t kBlobSize = 34;

  AttestedWitnessBackend(std::shared_ptr<const HashScheme> scheme, Digest32 key);

  std::string_view id() const override { return kId; }
  ProofBlob prove(const WithdrawStatement& statement, const WithdrawWitness& witness) const override;
  bool verify(const WithdrawStatement& statement, const ProofBlob& blob) const override;
  ProofBlob prove_poi(const PoIStatement& statement, const WithdrawWitness& witness) const override;
  bool verify_poi(const PoIStatement& statement, const ProofBlob& blob) const override;

 private:
  void check_withdraw_witness(const WithdrawStatement& statement, const WithdrawWitness& witness) const;
  ProofBlob attest(std::uint8_t kind, const Bytes& message) const;
  bool check(std::uint8_t kind, const Bytes& message, const ProofBlob& blob) const;

  std::shared_ptr<const HashScheme> scheme_;
  Digest32 key_;
};

Bytes encode_statement(const PrimeField& field, const WithdrawStatement& statement);
Bytes encode_statement(const PrimeField& field, const PoIStatement& statement);

}  // namespace zkmixer

#include "zkmixer/proof.hpp"

#include "zkmixer/error.hpp"

#include <algorithm>

namespace zkmixer {
namespace {

constexpr std::uint8_t kBlobVersion = 0x01;
constexpr std::uint8_t kWithdrawKind = 'W';
constexpr std::uint8_t kPoIKind = 'P';

}  // namespace

ListSnapshot ListSnapshot::of(const PrimeField& field, std::vector<Commitment> entries) {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  ByteWriter w;
  w.str("zkmixer/exclusion-list/v1").u64(entries.size());
  for (const auto& c : entries) w.raw(field.encode(c.value));
  ListSnapshot out;
  out.entries = std::move(entries);
  out.digest = blake2b_256(w.bytes());
  return out;
}

bool ListSnapshot::contains(const Commitment& c) const {
  return std::binary_search(entries.begin(), entries.end(), c);
}

Bytes encode_statement(const PrimeField& field, const WithdrawStatement& statement) {
  ByteWriter w;
  w.str("zkmixer/withdraw/v1")
      .raw(field.encode(statement.root))
      .raw(field.encode(statement.nullifier))
      .str(statement.recipient.str())
      .u64(statement.denomination);
  return w.bytes();
}

Bytes encode_statement(const PrimeField& field, const PoIStatement& statement) {
  ByteWriter w;
  w.str("zkmixer/poi/v1").raw(encode_statement(field, statement.withdrawal)).raw(statement.list.digest);
  return w.bytes();
}

AttestedWitnessBackend::AttestedWitnessBackend(std::shared_ptr<const HashScheme> scheme, Digest32 key)
    : scheme_(std::move(scheme)), key_(key) {
  if (!scheme_) throw Error(Errc::InvalidParameters, "backend needs a hash scheme");
}

void AttestedWitnessBackend::check_withdraw_witness(const WithdrawStatement& statement,
                                                    const WithdrawWitness& witness) const {
  const auto& path = witness.path;
  if (path.siblings.size() != path.directions.size() || path.siblings.empty()) {
    throw Error(Errc::InvalidWitness, "malformed path");
  }
  if (path.leaf_index != witness.leaf_index) throw Error(Errc::InvalidWitness, "path is for a different leaf");
  for (std::size_t k = 0; k < path.directions.size(); ++k) {
    bool bit = k < 64 && ((witness.leaf_index >> k) & 1) != 0;
    if (path.directions[k] != bit) throw Error(Errc::InvalidWitness, "path directions disagree with leaf index");
  }
  if (path.directions.size() < 64 && (witness.leaf_index >> path.directions.size()) != 0) {
    throw Error(Errc::InvalidWitness, "leaf index exceeds path depth");
  }
  if (!(witness.nullifier == statement.nullifier)) {
    throw Error(Errc::InvalidWitness, "nullifier does not match statement");
  }
  auto commitment = commitment_of(*scheme_, witness.secret, witness.nullifier);
  if (!(fold_path(*scheme_, commitment.value, path) == statement.root)) {
    throw Error(Errc::InvalidWitness, "commitment does not fold to the statement root");
  }
}

ProofBlob AttestedWitnessBackend::attest(std::uint8_t kind, const Bytes& message) const {
  ByteWriter w;
  w.u8(kind).raw(message);
  auto mac = blake2b_256_keyed(w.bytes(), key_);
  ProofBlob blob;
  blob.backend_id = std::string(kId);
  blob.bytes.reserve(kBlobSize);
  blob.bytes.push_back(kBlobVersion);
  blob.bytes.push_back(kind);
  blob.bytes.insert(blob.bytes.end(), mac.begin(), mac.end());
  return blob;
}

bool AttestedWitnessBackend::check(std::uint8_t kind, const Bytes& message, const ProofBlob& blob) const {
  if (blob.backend_id != kId || blob.bytes.size() != kBlobSize) return false;
  if (blob.bytes[0] != kBlobVersion || blob.bytes[1] != kind) return false;
  ByteWriter w;
  w.u8(kind).raw(message);
  auto mac = blake2b_256_keyed(w.bytes(), key_);
  return constant_time_equal(std::span(blob.bytes).subspan(2), mac);
}

ProofBlob AttestedWitnessBackend::prove(const WithdrawStatement& statement, const WithdrawWitness& witness) const {
  check_withdraw_witness(statement, witness);
  return attest(kWithdrawKind, encode_statement(scheme_->field(), statement));
}

bool AttestedWitnessBackend::verify(const WithdrawStatement& statement, const ProofBlob& blob) const {
  return check(kWithdrawKind, encode_statement(scheme_->field(), statement), blob);
}

ProofBlob AttestedWitnessBackend::prove_poi(const PoIStatement& statement, const WithdrawWitness& witness) const {
  auto recomputed = ListSnapshot::of(scheme_->field(), statement.list.entries);
  if (recomputed.digest != statement.list.digest) {
    throw Error(Errc::InvalidStatement, "list digest does not match its entries");
  }
  check_withdraw_witness(statement.withdrawal, witness);
  auto commitment = commitment_of(*scheme_, witness.secret, witness.nullifier);
  if (statement.list.contains(commitment)) {
    throw Error(Errc::CommitmentExcluded, "spent commitment is on the exclusion list");
  }
  return attest(kPoIKind, encode_statement(scheme_->field(), statement));
}

bool AttestedWitnessBackend::verify_poi(const PoIStatement& statement, const ProofBlob& blob) const {
  return check(kPoIKind, encode_statement(scheme_->field(), statement), blob);
}

}  // namespace zkmixer

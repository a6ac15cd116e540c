#pragma once

#include "zkmixer/field.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace zkmixer {

/// Key/value hash parameter block, one `key = value` per line, `#` comments.
/// See docs/params.md for the recognised keys.
class HashParams {
 public:
  static HashParams parse(std::string_view text);
  static HashParams load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  void set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// 2-to-1 compression over a prime field. Everything above this layer talks
/// to the interface only, so schemes can be swapped without touching protocol
/// code.
class HashScheme {
 public:
  virtual ~HashScheme() = default;

  virtual std::string_view name() const = 0;
  virtual const PrimeField& field() const = 0;
  virtual FieldElement hash2(const FieldElement& a, const FieldElement& b) const = 0;
};

/// State-width-t sponge: t rounds of (add constant, x^5, linear mix), with
/// inputs in lanes 1,2 and output from lane 0. Constants come from BLAKE2b of
/// the seed string. Reference-grade only.
class SpongeX5Scheme final : public HashScheme {
 public:
  explicit SpongeX5Scheme(const HashParams& params);

  std::string_view name() const override { return "sponge-x5"; }
  const PrimeField& field() const override { return field_; }
  FieldElement hash2(const FieldElement& a, const FieldElement& b) const override;

 private:
  PrimeField field_;
  std::size_t width_;
  std::size_t rounds_;
  std::vector<FieldElement> constants_;
  std::vector<std::vector<FieldElement>> mds_;
};

/// Poseidon permutation with explicit round constants and MDS matrix from the
/// parameter file (full rounds split around the partial rounds).
class PoseidonScheme final : public HashScheme {
 public:
  explicit PoseidonScheme(const HashParams& params);

  std::string_view name() const override { return "poseidon"; }
  const PrimeField& field() const override { return field_; }
  FieldElement hash2(const FieldElement& a, const FieldElement& b) const override;

 private:
  PrimeField field_;
  std::size_t width_;
  std::size_t full_rounds_;
  std::size_t partial_rounds_;
  std::uint64_t alpha_;
  std::vector<FieldElement> constants_;
  std::vector<std::vector<FieldElement>> mds_;
};

std::shared_ptr<const HashScheme> make_hash_scheme(const HashParams& params);
/// The shipped default (x^5 sponge over the BN254 scalar field).
std::shared_ptr<const HashScheme> default_hash_scheme();
std::string_view default_params_text();

/// Domain-separation constant: BLAKE2b-512("zkmixer/tag/" + name) mod p.
FieldElement domain_tag(const PrimeField& field, std::string_view name);
FieldElement derive_constant(const PrimeField& field, std::string_view seed, std::uint32_t index);

inline constexpr std::string_view kEmptyLeafTag = "empty-leaf";

struct Commitment {
  FieldElement value;

  friend bool operator==(const Commitment&, const Commitment&) = default;
  friend bool operator<(const Commitment& a, const Commitment& b) { return a.value < b.value; }
};

Commitment commitment_of(const HashScheme& scheme, const FieldElement& secret, const FieldElement& nullifier);

/// A user's private note.
struct Note {
  FieldElement secret;
  FieldElement nullifier;
  Commitment commitment;
};

Note make_note(const HashScheme& scheme, std::mt19937_64& rng);

}  // namespace zkmixer

template <>
struct std::hash<zkmixer::Commitment> {
  std::size_t operator()(const zkmixer::Commitment& c) const noexcept {
    return std::hash<zkmixer::FieldElement>{}(c.value);
  }
};

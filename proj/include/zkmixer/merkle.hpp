#pragma once

#include "zkmixer/hash.hpp"

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

namespace zkmixer {

/// Authentication path from a leaf to the root. directions[k] is true when the
/// running node is the right child at level k (bit k of the leaf index).
struct MerklePath {
  std::uint64_t leaf_index = 0;
  std::vector<FieldElement> siblings;
  std::vector<bool> directions;
};

/// Hashes `leaf` up the path. Throws Error(MalformedPath) on length mismatch.
FieldElement fold_path(const HashScheme& scheme, const FieldElement& leaf, const MerklePath& path);

/// Fixed-depth append-only Merkle tree that keeps the last `history` roots.
///
/// Empty leaves are Z0 = hash2(0, tag("empty-leaf")) and
/// Z(k+1) = hash2(Zk, Zk). Insertion follows the usual filled-subtree scheme;
/// interior nodes are cached per level so paths can be produced for any leaf.
class IncrementalMerkleTree {
 public:
  static constexpr std::size_t kDefaultRootHistory = 30;
  static constexpr unsigned kMaxDepth = 32;

  IncrementalMerkleTree(std::shared_ptr<const HashScheme> scheme, unsigned depth,
                        std::size_t root_history = kDefaultRootHistory);

  /// Returns the new leaf's index. Throws Error(TreeFull).
  std::uint64_t insert(const FieldElement& leaf);
  std::uint64_t insert(const Commitment& c) { return insert(c.value); }

  /// Throws Error(NoSuchLeaf) for an index that has not been filled.
  MerklePath path_of(std::uint64_t leaf_index) const;

  bool is_known_root(const FieldElement& root) const;
  std::optional<std::uint64_t> find_leaf(const FieldElement& leaf) const;

  const FieldElement& root() const { return history_.back(); }
  const std::deque<FieldElement>& root_history() const noexcept { return history_; }
  std::size_t root_history_capacity() const noexcept { return history_capacity_; }
  unsigned depth() const noexcept { return depth_; }
  std::uint64_t size() const noexcept { return next_index_; }
  std::uint64_t capacity() const noexcept { return std::uint64_t{1} << depth_; }
  const FieldElement& leaf(std::uint64_t index) const;
  const FieldElement& zero_value(unsigned level) const { return zeros_.at(level); }
  const HashScheme& scheme() const noexcept { return *scheme_; }

 private:
  std::shared_ptr<const HashScheme> scheme_;
  unsigned depth_;
  std::size_t history_capacity_;
  std::uint64_t next_index_ = 0;
  std::vector<FieldElement> zeros_;           // depth + 1 entries
  std::vector<FieldElement> filled_subtrees_;  // depth entries
  std::vector<std::vector<FieldElement>> levels_;
  std::deque<FieldElement> history_;
};

}  // namespace zkmixer

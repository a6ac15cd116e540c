#include "zkmixer/merkle.hpp"

#include "zkmixer/error.hpp"

#include <algorithm>

namespace zkmixer {

FieldElement fold_path(const HashScheme& scheme, const FieldElement& leaf, const MerklePath& path) {
  if (path.siblings.size() != path.directions.size()) {
    throw Error(Errc::MalformedPath, "siblings and directions differ in length");
  }
  FieldElement node = leaf;
  for (std::size_t k = 0; k < path.siblings.size(); ++k) {
    node = path.directions[k] ? scheme.hash2(path.siblings[k], node) : scheme.hash2(node, path.siblings[k]);
  }
  return node;
}

IncrementalMerkleTree::IncrementalMerkleTree(std::shared_ptr<const HashScheme> scheme, unsigned depth,
                                             std::size_t root_history)
    : scheme_(std::move(scheme)), depth_(depth), history_capacity_(root_history) {
  if (!scheme_) throw Error(Errc::InvalidParameters, "tree needs a hash scheme");
  if (depth_ < 1 || depth_ > kMaxDepth) throw Error(Errc::InvalidParameters, "tree depth must be in 1..32");
  if (history_capacity_ < 1) throw Error(Errc::InvalidParameters, "root history must hold at least one root");
  const auto& field = scheme_->field();
  zeros_.push_back(scheme_->hash2(field.zero(), domain_tag(field, kEmptyLeafTag)));
  for (unsigned k = 0; k < depth_; ++k) zeros_.push_back(scheme_->hash2(zeros_[k], zeros_[k]));
  filled_subtrees_.assign(zeros_.begin(), zeros_.begin() + depth_);
  levels_.resize(depth_);
  history_.push_back(zeros_[depth_]);
}

std::uint64_t IncrementalMerkleTree::insert(const FieldElement& leaf) {
  if (next_index_ >= capacity()) {
    throw Error(Errc::TreeFull, "tree of depth " + std::to_string(depth_) + " is full");
  }
  const std::uint64_t index = next_index_;
  std::uint64_t idx = index;
  FieldElement node = leaf;
  for (unsigned k = 0; k < depth_; ++k) {
    auto& level = levels_[k];
    if (level.size() <= idx) level.resize(idx + 1);
    level[idx] = node;
    if ((idx & 1) == 0) {
      filled_subtrees_[k] = node;
      node = scheme_->hash2(node, zeros_[k]);
    } else {
      node = scheme_->hash2(filled_subtrees_[k], node);
    }
    idx >>= 1;
  }
  ++next_index_;
  history_.push_back(node);
  while (history_.size() > history_capacity_) history_.pop_front();
  return index;
}

MerklePath IncrementalMerkleTree::path_of(std::uint64_t leaf_index) const {
  if (leaf_index >= next_index_) {
    throw Error(Errc::NoSuchLeaf, "leaf " + std::to_string(leaf_index) + " has not been inserted");
  }
  MerklePath path;
  path.leaf_index = leaf_index;
  path.siblings.reserve(depth_);
  path.directions.reserve(depth_);
  std::uint64_t idx = leaf_index;
  for (unsigned k = 0; k < depth_; ++k) {
    std::uint64_t sibling = idx ^ 1;
    const auto& level = levels_[k];
    path.siblings.push_back(sibling < level.size() ? level[sibling] : zeros_[k]);
    path.directions.push_back((idx & 1) != 0);
    idx >>= 1;
  }
  return path;
}

bool IncrementalMerkleTree::is_known_root(const FieldElement& root) const {
  return std::find(history_.begin(), history_.end(), root) != history_.end();
}

std::optional<std::uint64_t> IncrementalMerkleTree::find_leaf(const FieldElement& leaf) const {
  const auto& leaves = levels_[0];
  auto it = std::find(leaves.begin(), leaves.end(), leaf);
  if (it == leaves.end()) return std::nullopt;
  return static_cast<std::uint64_t>(it - leaves.begin());
}

const FieldElement& IncrementalMerkleTree::leaf(std::uint64_t index) const {
  if (index >= next_index_) throw Error(Errc::NoSuchLeaf, "leaf " + std::to_string(index) + " has not been inserted");
  return levels_[0][index];
}

}  // namespace zkmixer

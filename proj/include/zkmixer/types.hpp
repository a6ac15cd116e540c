#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

namespace zkmixer {

using Tick = std::uint64_t;
using Amount = std::uint64_t;

/// Ledger account identifier. Opaque string; fresh accounts get random names.
class AccountId {
 public:
  AccountId() = default;
  explicit AccountId(std::string id) : id_(std::move(id)) {}

  const std::string& str() const noexcept { return id_; }
  bool empty() const noexcept { return id_.empty(); }

  friend auto operator<=>(const AccountId&, const AccountId&) = default;

 private:
  std::string id_;
};

inline std::ostream& operator<<(std::ostream& os, const AccountId& a) { return os << a.str(); }

}  // namespace zkmixer

template <>
struct std::hash<zkmixer::AccountId> {
  std::size_t operator()(const zkmixer::AccountId& a) const noexcept {
    return std::hash<std::string>{}(a.str());
  }
};

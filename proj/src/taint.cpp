#include "zkmixer/taint.hpp"

#include "zkmixer/error.hpp"

namespace zkmixer {
namespace {

Rational sum(const TaintTracker::Taint& t) {
  Rational s = 0;
  for (const auto& [label, v] : t) s += v;
  return s;
}

void add_into(TaintTracker::Taint& dst, const TaintTracker::Taint& src) {
  for (const auto& [label, v] : src) {
    if (v != 0) dst[label] += v;
  }
}

TaintTracker::Taint take_fraction(TaintTracker::Taint& src, const Rational& fraction) {
  TaintTracker::Taint moved;
  for (auto& [label, v] : src) {
    Rational part = v * fraction;
    if (part == 0) continue;
    v -= part;
    moved[label] = part;
  }
  return moved;
}

}  // namespace

void TaintTracker::taint_account(const AccountId& account, const Label& label, Amount amount) {
  loose_[account][label] += amount;
  genesis_ += amount;
}

void TaintTracker::register_note(const Note& note) { by_nullifier_[note.nullifier] = note.commitment; }

void TaintTracker::track_lots(const AccountId& escrow) { lot_accounts_.insert(escrow); }

TaintTracker::Taint TaintTracker::take(const Transfer& t) {
  if (t.amount == 0) return {};
  if (lot_accounts_.count(t.from)) {
    auto& lots = lots_[t.from];
    std::optional<Commitment> key;
    if (t.lot && t.lot->kind == LotRef::Kind::Commitment) {
      key = Commitment{t.lot->value};
    } else if (t.lot && t.lot->kind == LotRef::Kind::Nullifier) {
      auto it = by_nullifier_.find(t.lot->value);
      if (it != by_nullifier_.end()) key = it->second;
    }
    if (key) {
      auto it = lots.find(*key);
      if (it == lots.end()) return {};
      Taint moved = std::move(it->second);
      lots.erase(it);
      return moved;
    }
    anomalies_.push_back("unresolved lot leaving " + t.from.str() + " at tick " + std::to_string(t.tick));
    // spread the withdrawal over every lot in the escrow
    Taint moved;
    if (t.from_balance_before == 0) return moved;
    Rational fraction(t.amount, t.from_balance_before);
    for (auto& [c, taint] : lots) add_into(moved, take_fraction(taint, fraction));
    add_into(moved, take_fraction(loose_[t.from], fraction));
    return moved;
  }
  auto it = loose_.find(t.from);
  if (it == loose_.end() || t.from_balance_before == 0) return {};
  return take_fraction(it->second, Rational(t.amount, t.from_balance_before));
}

void TaintTracker::give(const Transfer& t, Taint moved) {
  if (moved.empty()) {
    if (lot_accounts_.count(t.to) && t.lot && t.lot->kind == LotRef::Kind::Commitment) {
      lots_[t.to].try_emplace(Commitment{t.lot->value});
    }
    return;
  }
  if (lot_accounts_.count(t.to) && t.lot && t.lot->kind == LotRef::Kind::Commitment) {
    add_into(lots_[t.to][Commitment{t.lot->value}], moved);
    return;
  }
  add_into(loose_[t.to], moved);
}

void TaintTracker::observe(const Transfer& t) { give(t, take(t)); }

Rational TaintTracker::tainted(const AccountId& account) const {
  Rational s = 0;
  if (auto it = loose_.find(account); it != loose_.end()) s += sum(it->second);
  if (auto it = lots_.find(account); it != lots_.end()) {
    for (const auto& [c, taint] : it->second) s += sum(taint);
  }
  return s;
}

TaintTracker::Taint TaintTracker::taint_of(const AccountId& account) const {
  Taint out;
  if (auto it = loose_.find(account); it != loose_.end()) add_into(out, it->second);
  if (auto it = lots_.find(account); it != lots_.end()) {
    for (const auto& [c, taint] : it->second) add_into(out, taint);
  }
  return out;
}

Rational TaintTracker::lot_taint(const AccountId& escrow, const Commitment& c) const {
  auto it = lots_.find(escrow);
  if (it == lots_.end()) return 0;
  auto jt = it->second.find(c);
  return jt == it->second.end() ? Rational(0) : sum(jt->second);
}

Rational TaintTracker::escrow_taint(const AccountId& escrow) const { return tainted(escrow); }

Rational TaintTracker::total_taint() const {
  Rational s = 0;
  for (const auto& [a, taint] : loose_) s += sum(taint);
  for (const auto& [a, lots] : lots_) {
    for (const auto& [c, taint] : lots) s += sum(taint);
  }
  return s;
}

}  // namespace zkmixer

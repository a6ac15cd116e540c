#pragma once

#include "zkmixer/chain.hpp"
#include "zkmixer/hash.hpp"
#include "zkmixer/mixer.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace zkmixer {

/// God's-eye provenance ledger for adjudicating scenario outcomes. Ordinary
/// accounts carry taint proportionally (a transfer moves taint * amount /
/// balance). Escrow accounts registered with track_lots() keep taint per note
/// instead, so a withdrawal inherits exactly the taint of the note it spends;
/// this needs the nullifier -> commitment mapping no protocol actor has.
class TaintTracker {
 public:
  using Label = std::string;
  using Taint = std::map<Label, Rational>;

  void taint_account(const AccountId& account, const Label& label, Amount amount);
  void register_note(const Note& note);
  void track_lots(const AccountId& escrow);

  void observe(const Transfer& t);

  Rational tainted(const AccountId& account) const;
  Taint taint_of(const AccountId& account) const;
  Rational lot_taint(const AccountId& escrow, const Commitment& c) const;
  Rational escrow_taint(const AccountId& escrow) const;
  Rational total_taint() const;
  const Rational& genesis_taint() const noexcept { return genesis_; }
  bool conserved() const { return total_taint() == genesis_; }
  const std::vector<std::string>& anomalies() const noexcept { return anomalies_; }

 private:
  Taint take(const Transfer& t);
  void give(const Transfer& t, Taint moved);

  std::map<AccountId, Taint> loose_;
  std::map<AccountId, std::map<Commitment, Taint>> lots_;
  std::set<AccountId> lot_accounts_;
  std::map<FieldElement, Commitment> by_nullifier_;
  Rational genesis_{0};
  std::vector<std::string> anomalies_;
};

}  // namespace zkmixer

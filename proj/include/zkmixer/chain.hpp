#pragma once

#include "zkmixer/field.hpp"
#include "zkmixer/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace zkmixer {

// ---------------------------------------------------------------------------
// Gas and cost accounting
// ---------------------------------------------------------------------------

/// Ordered name -> gas table.
struct GasTariff {
  std::vector<std::pair<std::string, std::uint64_t>> entries;

  std::optional<std::uint64_t> find(std::string_view name) const;

  /// Per-operation gas of the prototype contracts.
  static GasTariff operations();
  /// One-off contract deployment gas.
  static GasTariff deployment();
};

namespace op {
inline constexpr std::string_view kDeposit = "Deposit";
inline constexpr std::string_view kWithdraw = "Withdraw";
inline constexpr std::string_view kApprove = "Approve";
inline constexpr std::string_view kRemoveVerifier = "Remove Verifier";
inline constexpr std::string_view kTally = "Tally";
inline constexpr std::string_view kVote = "Vote";
inline constexpr std::string_view kAddVerifier = "Add Verifier";
inline constexpr std::string_view kPropose = "Propose";
}  // namespace op

/// Prices as integers: wei per gas and US cents per ETH.
struct GasPrices {
  std::uint64_t gas_price_wei = 1'000'000'000;  // 1 Gwei
  std::uint64_t eth_usd_cents = 200'000;        // $2000

  static GasPrices from_decimal(double gas_price_gwei, double eth_usd);
};

/// gas * price * 1e-9 (Gwei->ETH) * usd, in cents, rounded half-up.
std::uint64_t usd_cents_for_gas(std::uint64_t gas, const GasPrices& prices);
std::string format_usd(std::uint64_t cents);

struct CostLine {
  std::string item;
  std::uint64_t count = 0;
  std::uint64_t gas = 0;
  std::uint64_t cents = 0;
};

struct CostReport {
  GasPrices prices;
  std::vector<CostLine> lines;
  std::uint64_t total_gas = 0;
  std::uint64_t total_cents = 0;
};

/// Costs every tariff entry once (the static tables).
CostReport static_cost_table(const GasTariff& tariff, const GasPrices& prices);

class GasMeter {
 public:
  explicit GasMeter(GasTariff tariff = GasTariff::operations(), GasPrices prices = {});

  /// Throws Error(UnknownOperation) for names outside the tariff.
  std::uint64_t charge(std::string_view operation);
  CostReport report() const;
  std::uint64_t total_gas() const noexcept { return total_gas_; }
  const GasPrices& prices() const noexcept { return prices_; }

 private:
  struct Entry {
    std::uint64_t count = 0;
    std::uint64_t gas = 0;
  };
  GasTariff tariff_;
  GasPrices prices_;
  std::map<std::string, Entry, std::less<>> ledger_;
  std::uint64_t total_gas_ = 0;
};

// ---------------------------------------------------------------------------
// Event log
// ---------------------------------------------------------------------------

struct Event {
  Tick tick = 0;
  std::string actor;
  std::string operation;
  std::vector<std::pair<std::string, std::string>> params;
  std::string outcome = "ok";

  std::optional<std::string> param(std::string_view key) const;
  bool ok() const { return outcome == "ok"; }
  std::string params_digest() const;
  /// One JSON object, no trailing newline. Field order is fixed.
  std::string to_json_line() const;
};

class EventLog {
 public:
  void append(Event e) { records_.push_back(std::move(e)); }
  const std::vector<Event>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::string to_jsonl() const;
  std::string digest_hex() const;

 private:
  std::vector<Event> records_;
};

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

/// Public identifier attached to value moving in or out of note-holding escrow.
struct LotRef {
  enum class Kind { Commitment, Nullifier };
  Kind kind;
  FieldElement value;
};

struct Transfer {
  Tick tick = 0;
  AccountId from;
  AccountId to;
  Amount amount = 0;
  Amount from_balance_before = 0;
  std::optional<LotRef> lot;
};

class SimChain {
 public:
  using TransferObserver = std::function<void(const Transfer&)>;

  explicit SimChain(GasPrices prices = {});

  Tick tick() const noexcept { return tick_; }
  /// Throws Error(NonMonotonicTick) when moving backwards.
  void advance_to(Tick t);

  /// Genesis allocation. Throws Error(ValidationError) if the account exists.
  void create_account(const AccountId& id, Amount initial = 0);
  bool has_account(const AccountId& id) const { return balances_.count(id) != 0; }
  Amount balance(const AccountId& id) const;
  const std::map<AccountId, Amount>& balances() const noexcept { return balances_; }

  /// Atomic debit/credit. Throws Error(InsufficientFunds) with no state change.
  /// Unknown destination accounts are created on first credit.
  void transfer(const AccountId& from, const AccountId& to, Amount amount, const std::string& actor,
                std::optional<LotRef> lot = std::nullopt);

  void log(std::string actor, std::string operation, std::vector<std::pair<std::string, std::string>> params,
           std::string outcome = "ok");
  const EventLog& events() const noexcept { return events_; }

  GasMeter& gas() noexcept { return gas_; }
  const GasMeter& gas() const noexcept { return gas_; }

  Amount total_supply() const;
  Amount genesis_supply() const noexcept { return genesis_supply_; }

  void subscribe(TransferObserver observer) { observers_.push_back(std::move(observer)); }

  /// Credits value out of thin air. Only fault-injection fixtures use this to
  /// prove the conservation checks fire.
  void inject_fault_mint(const AccountId& id, Amount amount);

 private:
  Tick tick_ = 0;
  std::map<AccountId, Amount> balances_;
  Amount genesis_supply_ = 0;
  EventLog events_;
  GasMeter gas_;
  std::vector<TransferObserver> observers_;
};

}  // namespace zkmixer

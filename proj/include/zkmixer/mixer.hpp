#pragma once

#include "zkmixer/chain.hpp"
#include "zkmixer/hash.hpp"
#include "zkmixer/merkle.hpp"
#include "zkmixer/proof.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace zkmixer {

using Rational = boost::multiprecision::cpp_rational;

enum class MixerMode { ConstantTime, MovingAverage, ApprovalNecessary, Automatic };
enum class DelayShape { Linear, Exponential };

std::string_view to_string(MixerMode mode);
std::string_view to_string(DelayShape shape);
MixerMode parse_mixer_mode(std::string_view text);
DelayShape parse_delay_shape(std::string_view text);

inline constexpr Tick kDefaultMaxDelay = Tick{1} << 20;

struct MixerConfig {
  std::string name = "zkmixer";
  MixerMode mode = MixerMode::ConstantTime;
  Amount denomination = 1;
  Tick min_delay = 0;      // M
  Tick constant_lock = 0;  // ConstantTime lock
  DelayShape delay_shape = DelayShape::Linear;
  Tick period_length = 1;  // P
  std::size_t window = 1;  // W
  Tick max_delay = kDefaultMaxDelay;
  bool allow_confiscation = false;
  std::string auto_predicate = "accept_all";
  std::vector<AccountId> predicate_accounts;
  unsigned tree_depth = 20;
  std::size_t root_history = IncrementalMerkleTree::kDefaultRootHistory;

  /// Throws Error(ValidationError) naming the offending field.
  void validate() const;
};

/// Traffic-dependent lock time:
///   linear:      D = (C - A) * M   if C > A, else M
///   exponential: D = 2^(C - A) * M if C > A, else M
/// C - A may be fractional; the result is the exact real value rounded up,
/// never below M, and saturated at max_delay.
Tick compute_delay(DelayShape shape, std::uint64_t count, const Rational& average, Tick min_delay,
                   Tick max_delay = kDefaultMaxDelay);

/// Per-period deposit counts and their simple moving average over the last W
/// completed periods (0 when none have completed).
class TrafficTracker {
 public:
  TrafficTracker(Tick period_length, std::size_t window);

  /// Rolls over once per boundary (multiple of P) in (last, t].
  void advance_to(Tick t);
  void record_deposit() { ++current_; }

  std::uint64_t current_count() const noexcept { return current_; }
  const std::deque<std::uint64_t>& completed() const noexcept { return completed_; }
  Rational moving_average() const;

 private:
  Tick period_;
  std::size_t window_;
  Tick last_ = 0;
  std::uint64_t current_ = 0;
  std::deque<std::uint64_t> completed_;
};

enum class DepositState { Pending, Frozen, Admitted, Refunded, Confiscated };
std::string_view to_string(DepositState s);

using PreDepositId = std::uint64_t;

struct PreDeposit {
  PreDepositId id = 0;
  AccountId depositor;
  Commitment commitment;
  Tick deposit_tick = 0;
  Tick unlock_tick = 0;
  DepositState state = DepositState::Pending;
  std::vector<std::pair<DepositState, Tick>> history;
  std::optional<std::uint64_t> leaf_index;
  std::optional<AccountId> released_to;

  bool terminal() const {
    return state == DepositState::Admitted || state == DepositState::Refunded || state == DepositState::Confiscated;
  }
};

struct DepositReceipt {
  std::optional<PreDepositId> pre_deposit;  // absent in Automatic mode
  std::optional<std::uint64_t> leaf_index;  // present in Automatic mode
  Tick unlock_tick = 0;
};

struct Resolution {
  enum class Kind { Refund, Confiscate };
  Kind kind = Kind::Refund;
  AccountId target;  // confiscation destination

  static Resolution refund() { return {Kind::Refund, {}}; }
  static Resolution confiscate(AccountId to) { return {Kind::Confiscate, std::move(to)}; }
};

class ZkMixer;

/// Capability for freeze/unfreeze/admit/resolve. A mixer issues exactly one.
class MixerAuthority {
 public:
  MixerAuthority(const MixerAuthority&) = delete;
  MixerAuthority& operator=(const MixerAuthority&) = delete;

 private:
  friend class ZkMixer;
  explicit MixerAuthority(const ZkMixer* owner) : owner_(owner) {}
  const ZkMixer* owner_;
};

/// Flow-of-funds totals used by the value-conservation check.
struct MixerLedger {
  Amount deposited = 0;
  Amount refunded = 0;
  Amount confiscated = 0;
  Amount withdrawn = 0;
  std::uint64_t admissions = 0;
  std::uint64_t withdrawals = 0;
};

/// The pre-validating mixer. Deposits sit in a staging escrow as PreDeposits
/// until admitted (by their owner after the lock, or by consensus); only then
/// does the commitment enter the tree and the value move to the pool escrow.
class ZkMixer {
 public:
  ZkMixer(MixerConfig config, SimChain& chain, std::shared_ptr<const HashScheme> scheme,
          std::shared_ptr<const ProofBackend> backend);

  ZkMixer(const ZkMixer&) = delete;
  ZkMixer& operator=(const ZkMixer&) = delete;

  /// Throws Error(Unauthorized) after the first call.
  std::unique_ptr<MixerAuthority> issue_authority();

  DepositReceipt deposit(const AccountId& from, const Commitment& commitment, Amount amount, Tick tick);
  std::uint64_t approve_own(PreDepositId id, const AccountId& caller, Tick tick);

  void freeze(const MixerAuthority& auth, PreDepositId id, Tick tick, const std::string& actor);
  void unfreeze(const MixerAuthority& auth, PreDepositId id, Tick tick, const std::string& actor);
  std::uint64_t admit_by_consensus(const MixerAuthority& auth, PreDepositId id, Tick tick, const std::string& actor);
  void resolve(const MixerAuthority& auth, PreDepositId id, const Resolution& outcome, Tick tick,
               const std::string& actor);

  void withdraw(const WithdrawStatement& statement, const ProofBlob& blob, Tick tick, const std::string& actor);

  /// Strictly increasing; drives period rollover.
  void on_tick(Tick tick);

  /// Lock a deposit arriving now would receive (it counts towards C itself).
  Tick current_delay() const;

  const PreDeposit& pre_deposit(PreDepositId id) const;
  const std::vector<PreDeposit>& pre_deposits() const noexcept { return pre_deposits_; }
  const IncrementalMerkleTree& tree() const noexcept { return tree_; }
  const MixerConfig& config() const noexcept { return config_; }
  const TrafficTracker& traffic() const noexcept { return traffic_; }
  const std::set<FieldElement>& spent_nullifiers() const noexcept { return spent_; }
  const MixerLedger& ledger() const noexcept { return ledger_; }
  const AccountId& staging_account() const noexcept { return staging_; }
  const AccountId& pool_account() const noexcept { return pool_; }
  const ProofBackend& backend() const noexcept { return *backend_; }

 private:
  void sync(Tick tick);
  void check_authority(const MixerAuthority& auth) const;
  PreDeposit& find(PreDepositId id);
  void set_state(PreDeposit& d, DepositState s, Tick tick);
  std::uint64_t admit(PreDeposit& d, Tick tick, const std::string& actor, std::string_view how);
  bool predicate_accepts(const AccountId& from) const;

  MixerConfig config_;
  SimChain& chain_;
  std::shared_ptr<const HashScheme> scheme_;
  std::shared_ptr<const ProofBackend> backend_;
  IncrementalMerkleTree tree_;
  TrafficTracker traffic_;
  std::optional<Tick> last_tick_;
  std::vector<PreDeposit> pre_deposits_;
  std::set<Commitment> live_commitments_;  // pending, frozen or in the tree
  std::set<FieldElement> spent_;
  MixerLedger ledger_;
  AccountId staging_;
  AccountId pool_;
  const MixerAuthority* authority_ = nullptr;
};

}  // namespace zkmixer

#include "zkmixer/mixer.hpp"

#include "zkmixer/error.hpp"

#include <algorithm>

namespace zkmixer {

namespace mp = boost::multiprecision;

std::string_view to_string(MixerMode mode) {
  switch (mode) {
    case MixerMode::ConstantTime: return "constant_time";
    case MixerMode::MovingAverage: return "moving_average";
    case MixerMode::ApprovalNecessary: return "approval_necessary";
    case MixerMode::Automatic: return "automatic";
  }
  return "?";
}

std::string_view to_string(DelayShape shape) {
  return shape == DelayShape::Linear ? "linear" : "exponential";
}

MixerMode parse_mixer_mode(std::string_view text) {
  for (auto m : {MixerMode::ConstantTime, MixerMode::MovingAverage, MixerMode::ApprovalNecessary,
                 MixerMode::Automatic}) {
    if (to_string(m) == text) return m;
  }
  throw Error(Errc::ValidationError, "unknown mixer mode '" + std::string(text) + "'");
}

DelayShape parse_delay_shape(std::string_view text) {
  if (text == "linear") return DelayShape::Linear;
  if (text == "exponential") return DelayShape::Exponential;
  throw Error(Errc::ValidationError, "unknown delay shape '" + std::string(text) + "'");
}

std::string_view to_string(DepositState s) {
  switch (s) {
    case DepositState::Pending: return "Pending";
    case DepositState::Frozen: return "Frozen";
    case DepositState::Admitted: return "Admitted";
    case DepositState::Refunded: return "Refunded";
    case DepositState::Confiscated: return "Confiscated";
  }
  return "?";
}

void MixerConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(Errc::ValidationError, field + ": " + why);
  };
  if (name.empty()) fail("name", "must not be empty");
  if (denomination == 0) fail("denomination", "must be positive");
  if (period_length < 1) fail("period_length", "must be at least 1");
  if (window < 1) fail("window", "must be at least 1");
  if (tree_depth < 1 || tree_depth > IncrementalMerkleTree::kMaxDepth) fail("tree_depth", "must be in 1..32");
  if (root_history < 1) fail("root_history", "must be at least 1");
  if (mode == MixerMode::Automatic && auto_predicate != "accept_all" && auto_predicate != "reject_all" &&
      auto_predicate != "allowlist") {
    fail("auto_predicate", "unknown predicate '" + auto_predicate + "'");
  }
}

Tick compute_delay(DelayShape shape, std::uint64_t count, const Rational& average, Tick min_delay, Tick max_delay) {
  if (average < 0) throw Error(Errc::InvalidParameters, "moving average must be non-negative");
  const Rational diff = Rational(count) - average;
  if (diff <= 0) return std::min(min_delay, max_delay);
  if (min_delay == 0) return 0;

  const mp::cpp_int a = mp::numerator(diff);
  const mp::cpp_int n = mp::denominator(diff);
  const mp::cpp_int m = min_delay;
  const mp::cpp_int cap = max_delay;

  mp::cpp_int delay;
  if (shape == DelayShape::Linear) {
    delay = (a * m + n - 1) / n;  // ceil((C - A) * M)
  } else {
    // ceil(M * 2^(a/n)) is the least D with D^n >= M^n * 2^a.
    const mp::cpp_int whole = a / n;
    if (whole >= 64) return max_delay;
    const unsigned w = static_cast<unsigned>(whole);
    if (n == 1) {
      delay = m << w;
    } else {
      const unsigned nn = static_cast<unsigned>(n);
      const mp::cpp_int target = mp::pow(m, nn) << static_cast<unsigned>(a);
      mp::cpp_int lo = m << w;          // lo^n <= target
      mp::cpp_int hi = m << (w + 1);    // hi^n >= target
      if (lo >= cap) return max_delay;
      if (hi > cap && mp::pow(cap, nn) < target) return max_delay;
      if (hi > cap) hi = cap;
      while (lo < hi) {
        mp::cpp_int mid = (lo + hi) / 2;
        if (mp::pow(mid, nn) >= target) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      delay = lo;
    }
  }
  if (delay < m) delay = m;
  if (delay > cap) delay = cap;
  return static_cast<Tick>(delay);
}

TrafficTracker::TrafficTracker(Tick period_length, std::size_t window) : period_(period_length), window_(window) {
  if (period_ < 1 || window_ < 1) throw Error(Errc::InvalidParameters, "period length and window must be positive");
}

void TrafficTracker::advance_to(Tick t) {
  if (t < last_) throw Error(Errc::NonMonotonicTick, "traffic tracker cannot move backwards");
  const Tick boundaries = t / period_ - last_ / period_;
  last_ = t;
  if (boundaries == 0) return;
  completed_.push_back(current_);
  current_ = 0;
  // further boundaries close empty periods; W of them already fill the window
  const Tick empty = std::min<Tick>(boundaries - 1, window_);
  for (Tick i = 0; i < empty; ++i) completed_.push_back(0);
  while (completed_.size() > window_) completed_.pop_front();
}

Rational TrafficTracker::moving_average() const {
  if (completed_.empty()) return Rational(0);
  mp::cpp_int sum = 0;
  for (auto c : completed_) sum += c;
  return Rational(sum, completed_.size());
}

ZkMixer::ZkMixer(MixerConfig config, SimChain& chain, std::shared_ptr<const HashScheme> scheme,
                 std::shared_ptr<const ProofBackend> backend)
    : config_(std::move(config)),
      chain_(chain),
      scheme_(std::move(scheme)),
      backend_(std::move(backend)),
      tree_((config_.validate(), scheme_), config_.tree_depth, config_.root_history),
      traffic_(config_.period_length, config_.window),
      staging_(config_.name + ".staging"),
      pool_(config_.name + ".pool") {
  if (!backend_) throw Error(Errc::InvalidParameters, "mixer needs a proof backend");
  chain_.create_account(staging_);
  chain_.create_account(pool_);
}

std::unique_ptr<MixerAuthority> ZkMixer::issue_authority() {
  if (authority_) throw Error(Errc::Unauthorized, "authority already issued");
  std::unique_ptr<MixerAuthority> auth(new MixerAuthority(this));
  authority_ = auth.get();
  return auth;
}

void ZkMixer::check_authority(const MixerAuthority& auth) const {
  if (&auth != authority_ || auth.owner_ != this) throw Error(Errc::Unauthorized, "not this mixer's authority");
}

void ZkMixer::sync(Tick tick) {
  if (last_tick_ && tick < *last_tick_) {
    throw Error(Errc::NonMonotonicTick, "mixer at tick " + std::to_string(*last_tick_));
  }
  traffic_.advance_to(tick);
  last_tick_ = tick;
}

void ZkMixer::on_tick(Tick tick) {
  if (last_tick_ && tick <= *last_tick_) {
    throw Error(Errc::NonMonotonicTick, "tick " + std::to_string(tick) + " after " + std::to_string(*last_tick_));
  }
  sync(tick);
}

Tick ZkMixer::current_delay() const {
  switch (config_.mode) {
    case MixerMode::ConstantTime:
      return config_.constant_lock;
    case MixerMode::MovingAverage:
      return compute_delay(config_.delay_shape, traffic_.current_count() + 1, traffic_.moving_average(),
                           config_.min_delay, config_.max_delay);
    case MixerMode::ApprovalNecessary:
    case MixerMode::Automatic:
      return 0;
  }
  return 0;
}

PreDeposit& ZkMixer::find(PreDepositId id) {
  if (id >= pre_deposits_.size()) throw Error(Errc::NoSuchDeposit, "no pre-deposit " + std::to_string(id));
  return pre_deposits_[id];
}

const PreDeposit& ZkMixer::pre_deposit(PreDepositId id) const {
  if (id >= pre_deposits_.size()) throw Error(Errc::NoSuchDeposit, "no pre-deposit " + std::to_string(id));
  return pre_deposits_[id];
}

void ZkMixer::set_state(PreDeposit& d, DepositState s, Tick tick) {
  d.state = s;
  d.history.emplace_back(s, tick);
}

bool ZkMixer::predicate_accepts(const AccountId& from) const {
  if (config_.auto_predicate == "accept_all") return true;
  if (config_.auto_predicate == "reject_all") return false;
  const auto& allow = config_.predicate_accounts;
  return std::find(allow.begin(), allow.end(), from) != allow.end();
}

DepositReceipt ZkMixer::deposit(const AccountId& from, const Commitment& commitment, Amount amount, Tick tick) {
  sync(tick);
  if (amount != config_.denomination) {
    throw Error(Errc::WrongDenomination,
                "expected " + std::to_string(config_.denomination) + ", got " + std::to_string(amount));
  }
  if (live_commitments_.count(commitment)) throw Error(Errc::DuplicateCommitment, commitment.value.to_hex());
  if (chain_.balance(from) < amount) {
    throw Error(Errc::InsufficientFunds, from.str() + " cannot cover the denomination");
  }

  if (config_.mode == MixerMode::Automatic) {
    if (!predicate_accepts(from)) {
      throw Error(Errc::PredicateRejected, "predicate '" + config_.auto_predicate + "' rejected " + from.str());
    }
    if (tree_.size() >= tree_.capacity()) throw Error(Errc::TreeFull, "mixer tree is full");
    chain_.transfer(from, pool_, amount, from.str(), LotRef{LotRef::Kind::Commitment, commitment.value});
    traffic_.record_deposit();
    auto leaf = tree_.insert(commitment);
    live_commitments_.insert(commitment);
    ledger_.deposited += amount;
    ledger_.admissions += 1;
    chain_.gas().charge(op::kDeposit);
    chain_.gas().charge(op::kApprove);
    chain_.log(from.str(), "zk.deposit",
               {{"mixer", config_.name},
                {"depositor", from.str()},
                {"commitment", commitment.value.to_hex()},
                {"mode", std::string(to_string(config_.mode))},
                {"leaf", std::to_string(leaf)},
                {"root", tree_.root().to_hex()}});
    return DepositReceipt{std::nullopt, leaf, tick};
  }

  traffic_.record_deposit();  // counts towards C before its own delay
  Tick delay = config_.mode == MixerMode::MovingAverage
                   ? compute_delay(config_.delay_shape, traffic_.current_count(), traffic_.moving_average(),
                                   config_.min_delay, config_.max_delay)
                   : current_delay();
  chain_.transfer(from, staging_, amount, from.str(), LotRef{LotRef::Kind::Commitment, commitment.value});

  PreDeposit d;
  d.id = pre_deposits_.size();
  d.depositor = from;
  d.commitment = commitment;
  d.deposit_tick = tick;
  d.unlock_tick = tick + delay;
  d.history.emplace_back(DepositState::Pending, tick);
  pre_deposits_.push_back(d);
  live_commitments_.insert(commitment);
  ledger_.deposited += amount;
  chain_.gas().charge(op::kDeposit);
  chain_.log(from.str(), "zk.deposit",
             {{"mixer", config_.name},
              {"id", std::to_string(d.id)},
              {"depositor", from.str()},
              {"commitment", commitment.value.to_hex()},
              {"mode", std::string(to_string(config_.mode))},
              {"unlock_tick", std::to_string(d.unlock_tick)}});
  return DepositReceipt{d.id, std::nullopt, d.unlock_tick};
}

std::uint64_t ZkMixer::admit(PreDeposit& d, Tick tick, const std::string& actor, std::string_view how) {
  if (tree_.size() >= tree_.capacity()) throw Error(Errc::TreeFull, "mixer tree is full");
  chain_.transfer(staging_, pool_, config_.denomination, actor, LotRef{LotRef::Kind::Commitment, d.commitment.value});
  auto leaf = tree_.insert(d.commitment);
  d.leaf_index = leaf;
  set_state(d, DepositState::Admitted, tick);
  ledger_.admissions += 1;
  chain_.gas().charge(op::kApprove);
  chain_.log(actor, "zk.admit",
             {{"mixer", config_.name},
              {"id", std::to_string(d.id)},
              {"by", std::string(how)},
              {"leaf", std::to_string(leaf)},
              {"root", tree_.root().to_hex()}});
  return leaf;
}

std::uint64_t ZkMixer::approve_own(PreDepositId id, const AccountId& caller, Tick tick) {
  sync(tick);
  auto& d = find(id);
  if (config_.mode != MixerMode::ConstantTime && config_.mode != MixerMode::MovingAverage) {
    throw Error(Errc::WrongMode, "self-approval is not available in " + std::string(to_string(config_.mode)));
  }
  if (caller != d.depositor) throw Error(Errc::NotOwner, caller.str() + " did not make deposit " + std::to_string(id));
  if (d.state == DepositState::Frozen) throw Error(Errc::FrozenDeposit, "deposit " + std::to_string(id) + " is frozen");
  if (d.state != DepositState::Pending) {
    throw Error(Errc::WrongState, "deposit " + std::to_string(id) + " is " + std::string(to_string(d.state)));
  }
  if (tick < d.unlock_tick) {
    throw Error(Errc::StillLocked, "unlocks at " + std::to_string(d.unlock_tick) + ", now " + std::to_string(tick));
  }
  return admit(d, tick, caller.str(), "owner");
}

void ZkMixer::freeze(const MixerAuthority& auth, PreDepositId id, Tick tick, const std::string& actor) {
  check_authority(auth);
  sync(tick);
  auto& d = find(id);
  if (d.state != DepositState::Pending) {
    throw Error(Errc::WrongState, "only pending deposits can be frozen; " + std::to_string(id) + " is " +
                                      std::string(to_string(d.state)));
  }
  set_state(d, DepositState::Frozen, tick);
  chain_.log(actor, "zk.freeze", {{"mixer", config_.name}, {"id", std::to_string(id)}});
}

void ZkMixer::unfreeze(const MixerAuthority& auth, PreDepositId id, Tick tick, const std::string& actor) {
  check_authority(auth);
  sync(tick);
  auto& d = find(id);
  if (d.state != DepositState::Frozen) {
    throw Error(Errc::WrongState, "deposit " + std::to_string(id) + " is not frozen");
  }
  set_state(d, DepositState::Pending, tick);
  chain_.log(actor, "zk.unfreeze", {{"mixer", config_.name}, {"id", std::to_string(id)}});
}

std::uint64_t ZkMixer::admit_by_consensus(const MixerAuthority& auth, PreDepositId id, Tick tick,
                                          const std::string& actor) {
  check_authority(auth);
  sync(tick);
  auto& d = find(id);
  if (d.state != DepositState::Pending && d.state != DepositState::Frozen) {
    throw Error(Errc::WrongState, "deposit " + std::to_string(id) + " is " + std::string(to_string(d.state)));
  }
  return admit(d, tick, actor, "consensus");
}

void ZkMixer::resolve(const MixerAuthority& auth, PreDepositId id, const Resolution& outcome, Tick tick,
                      const std::string& actor) {
  check_authority(auth);
  sync(tick);
  auto& d = find(id);
  if (d.state != DepositState::Frozen) {
    throw Error(Errc::WrongState, "only frozen deposits can be resolved; " + std::to_string(id) + " is " +
                                      std::string(to_string(d.state)));
  }
  const bool confiscate = outcome.kind == Resolution::Kind::Confiscate;
  if (confiscate && !config_.allow_confiscation) throw Error(Errc::ConfiscationDisabled, "mixer only allows refunds");
  if (confiscate && outcome.target.empty()) throw Error(Errc::ValidationError, "confiscation needs a target");
  const AccountId to = confiscate ? outcome.target : d.depositor;
  chain_.transfer(staging_, to, config_.denomination, actor, LotRef{LotRef::Kind::Commitment, d.commitment.value});
  live_commitments_.erase(d.commitment);
  d.released_to = to;
  set_state(d, confiscate ? DepositState::Confiscated : DepositState::Refunded, tick);
  (confiscate ? ledger_.confiscated : ledger_.refunded) += config_.denomination;
  chain_.log(actor, confiscate ? "zk.confiscate" : "zk.refund",
             {{"mixer", config_.name}, {"id", std::to_string(id)}, {"to", to.str()}});
}

void ZkMixer::withdraw(const WithdrawStatement& statement, const ProofBlob& blob, Tick tick,
                       const std::string& actor) {
  sync(tick);
  if (statement.denomination != config_.denomination) {
    throw Error(Errc::WrongDenomination, "statement is for a different denomination");
  }
  if (!backend_->verify(statement, blob)) throw Error(Errc::InvalidProof, "proof does not verify");
  if (!tree_.is_known_root(statement.root)) throw Error(Errc::UnknownRoot, statement.root.to_hex());
  if (spent_.count(statement.nullifier)) throw Error(Errc::NullifierSpent, statement.nullifier.to_hex());
  if (statement.recipient.empty()) throw Error(Errc::InvalidStatement, "empty recipient");
  chain_.transfer(pool_, statement.recipient, config_.denomination, actor,
                  LotRef{LotRef::Kind::Nullifier, statement.nullifier});
  spent_.insert(statement.nullifier);
  ledger_.withdrawn += config_.denomination;
  ledger_.withdrawals += 1;
  chain_.gas().charge(op::kWithdraw);
  chain_.log(actor, "zk.withdraw",
             {{"mixer", config_.name},
              {"nullifier", statement.nullifier.to_hex()},
              {"recipient", statement.recipient.str()},
              {"root", statement.root.to_hex()}});
}

}  // namespace zkmixer

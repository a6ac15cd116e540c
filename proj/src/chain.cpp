#include "zkmixer/chain.hpp"

#include "zkmixer/digest.hpp"
#include "zkmixer/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include <cmath>

namespace zkmixer {

namespace mp = boost::multiprecision;

std::optional<std::uint64_t> GasTariff::find(std::string_view name) const {
  for (const auto& [n, g] : entries) {
    if (n == name) return g;
  }
  return std::nullopt;
}

GasTariff GasTariff::operations() {
  return GasTariff{{
      {std::string(op::kDeposit), 102'299},
      {std::string(op::kWithdraw), 279'198},
      {std::string(op::kApprove), 452'440},
      {std::string(op::kRemoveVerifier), 31'106},
      {std::string(op::kTally), 50'295},
      {std::string(op::kVote), 52'521},
      {std::string(op::kAddVerifier), 53'039},
      {std::string(op::kPropose), 154'033},
  }};
}

GasTariff GasTariff::deployment() {
  return GasTariff{{
      {"Groth16Verifier", 428'190},
      {"multiSig", 1'669'860},
      {"zkMixer", 3'265'751},
      {"PoseidonT3", 5'245'573},
  }};
}

GasPrices GasPrices::from_decimal(double gas_price_gwei, double eth_usd) {
  if (!(gas_price_gwei >= 0) || !(eth_usd >= 0)) throw Error(Errc::ValidationError, "prices must be non-negative");
  return GasPrices{static_cast<std::uint64_t>(std::llround(gas_price_gwei * 1e9)),
                   static_cast<std::uint64_t>(std::llround(eth_usd * 100.0))};
}

std::uint64_t usd_cents_for_gas(std::uint64_t gas, const GasPrices& prices) {
  // cents = gas * wei/gas * cents/ETH / 1e18 wei/ETH
  const mp::uint256_t denom = mp::uint256_t(1'000'000'000'000'000'000ULL);
  mp::uint256_t num = mp::uint256_t(gas) * prices.gas_price_wei * prices.eth_usd_cents;
  return static_cast<std::uint64_t>((num * 2 + denom) / (denom * 2));
}

std::string format_usd(std::uint64_t cents) {
  std::string frac = std::to_string(cents % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return "$" + std::to_string(cents / 100) + "." + frac;
}

CostReport static_cost_table(const GasTariff& tariff, const GasPrices& prices) {
  CostReport r;
  r.prices = prices;
  for (const auto& [name, gas] : tariff.entries) {
    r.lines.push_back({name, 1, gas, usd_cents_for_gas(gas, prices)});
    r.total_gas += gas;
  }
  r.total_cents = usd_cents_for_gas(r.total_gas, prices);
  return r;
}

GasMeter::GasMeter(GasTariff tariff, GasPrices prices) : tariff_(std::move(tariff)), prices_(prices) {}

std::uint64_t GasMeter::charge(std::string_view operation) {
  auto gas = tariff_.find(operation);
  if (!gas) throw Error(Errc::UnknownOperation, "no tariff entry for '" + std::string(operation) + "'");
  auto it = ledger_.find(operation);
  if (it == ledger_.end()) it = ledger_.emplace(std::string(operation), Entry{}).first;
  it->second.count += 1;
  it->second.gas += *gas;
  total_gas_ += *gas;
  return *gas;
}

CostReport GasMeter::report() const {
  CostReport r;
  r.prices = prices_;
  // tariff order, then anything else (none today)
  for (const auto& [name, unit] : tariff_.entries) {
    auto it = ledger_.find(name);
    if (it == ledger_.end()) continue;
    r.lines.push_back({name, it->second.count, it->second.gas, usd_cents_for_gas(it->second.gas, prices_)});
  }
  r.total_gas = total_gas_;
  r.total_cents = usd_cents_for_gas(total_gas_, prices_);
  return r;
}

std::optional<std::string> Event::param(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string Event::params_digest() const {
  ByteWriter w;
  w.u64(params.size());
  for (const auto& [k, v] : params) w.str(k).str(v);
  auto d = blake2b_256(w.bytes());
  return to_hex(std::span(d).first(16));
}

std::string Event::to_json_line() const {
  nlohmann::ordered_json j;
  j["tick"] = tick;
  j["actor"] = actor;
  j["operation"] = operation;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = std::move(p);
  j["params_digest"] = params_digest();
  j["outcome"] = outcome;
  return j.dump();
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& e : records_) {
    out += e.to_json_line();
    out += '\n';
  }
  return out;
}

std::string EventLog::digest_hex() const {
  auto d = blake2b_256(as_bytes(to_jsonl()));
  return to_hex(d);
}

SimChain::SimChain(GasPrices prices) : gas_(GasTariff::operations(), prices) {}

void SimChain::advance_to(Tick t) {
  if (t < tick_) {
    throw Error(Errc::NonMonotonicTick, "chain at tick " + std::to_string(tick_) + ", asked for " + std::to_string(t));
  }
  tick_ = t;
}

void SimChain::create_account(const AccountId& id, Amount initial) {
  if (id.empty()) throw Error(Errc::ValidationError, "empty account id");
  if (!balances_.emplace(id, initial).second) throw Error(Errc::ValidationError, "account '" + id.str() + "' exists");
  genesis_supply_ += initial;
}

Amount SimChain::balance(const AccountId& id) const {
  auto it = balances_.find(id);
  if (it == balances_.end()) throw Error(Errc::NoSuchAccount, "unknown account '" + id.str() + "'");
  return it->second;
}

void SimChain::transfer(const AccountId& from, const AccountId& to, Amount amount, const std::string& actor,
                        std::optional<LotRef> lot) {
  auto src = balances_.find(from);
  if (src == balances_.end()) throw Error(Errc::NoSuchAccount, "unknown account '" + from.str() + "'");
  if (src->second < amount) {
    throw Error(Errc::InsufficientFunds, from.str() + " holds " + std::to_string(src->second) + ", needs " +
                                             std::to_string(amount));
  }
  if (to.empty()) throw Error(Errc::NoSuchAccount, "empty destination account");
  Transfer t{tick_, from, to, amount, src->second, lot};
  src->second -= amount;
  balances_[to] += amount;

  std::vector<std::pair<std::string, std::string>> params{
      {"from", from.str()}, {"to", to.str()}, {"amount", std::to_string(amount)}};
  if (lot) {
    params.emplace_back(lot->kind == LotRef::Kind::Commitment ? "commitment" : "nullifier", lot->value.to_hex());
  }
  log(actor, "transfer", std::move(params));
  for (const auto& obs : observers_) obs(t);
}

void SimChain::log(std::string actor, std::string operation, std::vector<std::pair<std::string, std::string>> params,
                   std::string outcome) {
  events_.append(Event{tick_, std::move(actor), std::move(operation), std::move(params), std::move(outcome)});
}

Amount SimChain::total_supply() const {
  Amount total = 0;
  for (const auto& [id, bal] : balances_) total += bal;
  return total;
}

void SimChain::inject_fault_mint(const AccountId& id, Amount amount) {
  balances_[id] += amount;
  log("fault-injector", "fault.mint", {{"account", id.str()}, {"amount", std::to_string(amount)}});
}

}  // namespace zkmixer

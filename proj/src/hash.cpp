#include "zkmixer/hash.hpp"

#include "zkmixer/digest.hpp"
#include "zkmixer/error.hpp"

#include <fstream>
#include <sstream>

namespace zkmixer {
namespace {

constexpr std::string_view kDefaultParams = R"(scheme = sponge-x5
modulus = 0x30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001
width = 3
rounds = 8
seed = zkmixer/sponge-x5/v1
mds = 2 1 1; 1 2 1; 1 1 2
)";

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(const HashParams& p, const std::string& key) {
  const auto& text = p.get(key);
  try {
    std::size_t used = 0;
    auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(key);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw Error(Errc::InvalidParameters, "'" + key + "' is not a non-negative integer");
  }
}

std::vector<std::vector<FieldElement>> parse_matrix(const PrimeField& field, const std::string& text,
                                                    std::size_t width) {
  std::vector<std::vector<FieldElement>> rows;
  std::stringstream all(text);
  std::string row;
  while (std::getline(all, row, ';')) {
    std::stringstream cells(row);
    std::string cell;
    std::vector<FieldElement> r;
    while (cells >> cell) r.push_back(field.parse(cell));
    rows.push_back(std::move(r));
  }
  if (rows.size() != width) throw Error(Errc::InvalidParameters, "mds must have 'width' rows");
  for (const auto& r : rows) {
    if (r.size() != width) throw Error(Errc::InvalidParameters, "mds rows must have 'width' entries");
  }
  return rows;
}

std::vector<FieldElement> mix(const PrimeField& field, const std::vector<std::vector<FieldElement>>& mds,
                              const std::vector<FieldElement>& state) {
  std::vector<FieldElement> out(state.size(), field.zero());
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (std::size_t j = 0; j < state.size(); ++j) {
      out[i] = field.add(out[i], field.mul(mds[i][j], state[j]));
    }
  }
  return out;
}

std::vector<FieldElement> initial_state(const PrimeField& field, std::size_t width, const FieldElement& a,
                                        const FieldElement& b) {
  std::vector<FieldElement> state(width, field.zero());
  state[1] = a;
  state[2] = b;
  return state;
}

std::size_t checked_width(const HashParams& params) {
  auto width = parse_count(params, "width");
  if (width < 3) throw Error(Errc::InvalidParameters, "width must be at least 3");
  return width;
}

}  // namespace

HashParams HashParams::parse(std::string_view text) {
  HashParams out;
  std::size_t line_no = 0;
  std::stringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": empty key");
    out.entries_[key] = value;
  }
  return out;
}

HashParams HashParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidParameters, "cannot open parameter file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const std::string& HashParams::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw Error(Errc::InvalidParameters, "missing parameter '" + key + "'");
  return it->second;
}

std::string HashParams::get_or(const std::string& key, std::string fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

FieldElement derive_constant(const PrimeField& field, std::string_view seed, std::uint32_t index) {
  ByteWriter w;
  w.raw(as_bytes(seed)).u8(':').u32(index);
  auto wide = blake2b_512(w.bytes());
  U512 v = 0;
  for (std::size_t i = wide.size(); i-- > 0;) {
    v <<= 8;
    v |= wide[i];
  }
  return field.reduce(v);
}

FieldElement domain_tag(const PrimeField& field, std::string_view name) {
  std::string msg = "zkmixer/tag/" + std::string(name);
  auto wide = blake2b_512(as_bytes(msg));
  U512 v = 0;
  for (std::size_t i = wide.size(); i-- > 0;) {
    v <<= 8;
    v |= wide[i];
  }
  return field.reduce(v);
}

SpongeX5Scheme::SpongeX5Scheme(const HashParams& params)
    : field_(parse_u256(params.get("modulus"))),
      width_(checked_width(params)),
      rounds_(parse_count(params, "rounds")) {
  if (rounds_ == 0) throw Error(Errc::InvalidParameters, "rounds must be positive");
  const auto& seed = params.get("seed");
  constants_.reserve(width_ * rounds_);
  for (std::size_t i = 0; i < width_ * rounds_; ++i) {
    constants_.push_back(derive_constant(field_, seed, static_cast<std::uint32_t>(i)));
  }
  mds_ = parse_matrix(field_, params.get("mds"), width_);
}

FieldElement SpongeX5Scheme::hash2(const FieldElement& a, const FieldElement& b) const {
  auto state = initial_state(field_, width_, a, b);
  for (std::size_t r = 0; r < rounds_; ++r) {
    for (std::size_t i = 0; i < width_; ++i) {
      state[i] = field_.pow(field_.add(state[i], constants_[r * width_ + i]), 5);
    }
    state = mix(field_, mds_, state);
  }
  return state[0];
}

PoseidonScheme::PoseidonScheme(const HashParams& params)
    : field_(parse_u256(params.get("modulus"))),
      width_(checked_width(params)),
      full_rounds_(parse_count(params, "full_rounds")),
      partial_rounds_(parse_count(params, "partial_rounds")),
      alpha_(params.has("alpha") ? parse_count(params, "alpha") : 5) {
  if (full_rounds_ % 2 != 0) throw Error(Errc::InvalidParameters, "full_rounds must be even");
  if (alpha_ < 3) throw Error(Errc::InvalidParameters, "alpha must be at least 3");
  std::stringstream in(params.get("round_constants"));
  std::string token;
  while (in >> token) constants_.push_back(field_.parse(token));
  if (constants_.size() != width_ * (full_rounds_ + partial_rounds_)) {
    throw Error(Errc::InvalidParameters, "round_constants must hold width * (full_rounds + partial_rounds) values");
  }
  mds_ = parse_matrix(field_, params.get("mds"), width_);
}

FieldElement PoseidonScheme::hash2(const FieldElement& a, const FieldElement& b) const {
  auto state = initial_state(field_, width_, a, b);
  const std::size_t half = full_rounds_ / 2;
  const std::size_t total = full_rounds_ + partial_rounds_;
  for (std::size_t r = 0; r < total; ++r) {
    for (std::size_t i = 0; i < width_; ++i) state[i] = field_.add(state[i], constants_[r * width_ + i]);
    bool full = r < half || r >= half + partial_rounds_;
    if (full) {
      for (auto& x : state) x = field_.pow(x, alpha_);
    } else {
      state[0] = field_.pow(state[0], alpha_);
    }
    state = mix(field_, mds_, state);
  }
  return state[0];
}

std::shared_ptr<const HashScheme> make_hash_scheme(const HashParams& params) {
  const auto& scheme = params.get("scheme");
  if (scheme == "sponge-x5") return std::make_shared<SpongeX5Scheme>(params);
  if (scheme == "poseidon") return std::make_shared<PoseidonScheme>(params);
  throw Error(Errc::InvalidParameters, "unknown hash scheme '" + scheme + "'");
}

std::string_view default_params_text() { return kDefaultParams; }

std::shared_ptr<const HashScheme> default_hash_scheme() {
  static const auto scheme = make_hash_scheme(HashParams::parse(kDefaultParams));
  return scheme;
}

Commitment commitment_of(const HashScheme& scheme, const FieldElement& secret, const FieldElement& nullifier) {
  return Commitment{scheme.hash2(secret, nullifier)};
}

Note make_note(const HashScheme& scheme, std::mt19937_64& rng) {
  auto secret = scheme.field().sample(rng);
  auto nullifier = scheme.field().sample(rng);
  return Note{secret, nullifier, commitment_of(scheme, secret, nullifier)};
}

}  // namespace zkmixer

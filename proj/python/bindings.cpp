#include "zkmixer/digest.hpp"
#include "zkmixer/error.hpp"
#include "zkmixer/mixer.hpp"
#include "zkmixer/scenario.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

namespace py = pybind11;
using namespace zkmixer;

namespace {

const HashScheme& scheme() {
  static auto s = default_hash_scheme();
  return *s;
}

FieldElement fe(const std::string& hex) { return scheme().field().from_hex(hex); }

ScenarioScript resolve(const std::string& ref) {
  if (auto src = bundled_scenario_source(ref)) return load_scenario(*src);
  if (!ref.empty() && ref.front() == '{') return load_scenario(ref);
  return load_scenario_file(ref);
}

/// One pre-validating mixer on its own chain, driven step by step.
class Session {
 public:
  Session(const std::string& mode, Amount denomination, Tick lock, std::uint64_t seed, unsigned depth)
      : scheme_(default_hash_scheme()), rng_(seed) {
    ByteWriter w;
    w.str("zkmixer/python-session");
    w.u64(seed);
    backend_ = std::make_shared<AttestedWitnessBackend>(scheme_, blake2b_256(w.bytes()));
    MixerConfig cfg;
    cfg.mode = parse_mixer_mode(mode);
    cfg.denomination = denomination;
    cfg.constant_lock = lock;
    cfg.min_delay = lock;
    cfg.tree_depth = depth;
    mixer_ = std::make_unique<ZkMixer>(cfg, chain_, scheme_, backend_);
    auth_ = mixer_->issue_authority();
  }

  void create_account(const std::string& id, Amount balance) { chain_.create_account(AccountId(id), balance); }
  Amount balance(const std::string& id) const {
    return chain_.has_account(AccountId(id)) ? chain_.balance(AccountId(id)) : 0;
  }
  void advance(Tick t) {
    chain_.advance_to(t);
    mixer_->on_tick(t);
  }
  Tick tick() const { return chain_.tick(); }

  py::dict deposit(const std::string& from) {
    Note n = make_note(*scheme_, rng_);
    auto rc = mixer_->deposit(AccountId(from), n.commitment, mixer_->config().denomination, chain_.tick());
    py::dict d;
    d["secret"] = n.secret.to_hex();
    d["nullifier"] = n.nullifier.to_hex();
    d["commitment"] = n.commitment.value.to_hex();
    d["id"] = rc.pre_deposit ? py::cast(*rc.pre_deposit) : py::none();
    d["unlock_tick"] = rc.unlock_tick;
    return d;
  }

  std::uint64_t approve(PreDepositId id, const std::string& caller) {
    return mixer_->approve_own(id, AccountId(caller), chain_.tick());
  }
  void freeze(PreDepositId id) { mixer_->freeze(*auth_, id, chain_.tick(), "python"); }
  void unfreeze(PreDepositId id) { mixer_->unfreeze(*auth_, id, chain_.tick(), "python"); }
  void refund(PreDepositId id) { mixer_->resolve(*auth_, id, Resolution::refund(), chain_.tick(), "python"); }

  void withdraw(const py::dict& note, const std::string& recipient) {
    Note n{fe(note["secret"].cast<std::string>()), fe(note["nullifier"].cast<std::string>()), {}};
    n.commitment = commitment_of(*scheme_, n.secret, n.nullifier);
    auto leaf = mixer_->tree().find_leaf(n.commitment.value);
    if (!leaf) throw Error(Errc::NoSuchLeaf, "note is not in the tree");
    WithdrawWitness w{n.secret, n.nullifier, *leaf, mixer_->tree().path_of(*leaf)};
    WithdrawStatement st{mixer_->tree().root(), n.nullifier, AccountId(recipient), mixer_->config().denomination};
    mixer_->withdraw(st, backend_->prove(st, w), chain_.tick(), recipient);
  }

  std::string state(PreDepositId id) const { return std::string(to_string(mixer_->pre_deposit(id).state)); }
  std::string root() const { return mixer_->tree().root().to_hex(); }
  std::uint64_t tree_size() const { return mixer_->tree().size(); }
  std::uint64_t total_gas() const { return chain_.gas().total_gas(); }
  std::string events_jsonl() const { return chain_.events().to_jsonl(); }

 private:
  SimChain chain_;
  std::shared_ptr<const HashScheme> scheme_;
  std::shared_ptr<const ProofBackend> backend_;
  std::unique_ptr<ZkMixer> mixer_;
  std::unique_ptr<MixerAuthority> auth_;
  std::mt19937_64 rng_;
};

}  // namespace

PYBIND11_MODULE(_zkmixer, m) {
  m.doc() = "Pre-validating mixer simulator";

  static py::exception<Error> error(m, "ZkMixerError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("hash2", [](const std::string& a, const std::string& b) { return scheme().hash2(fe(a), fe(b)).to_hex(); },
        py::arg("a"), py::arg("b"));
  m.def("commitment", [](const std::string& secret, const std::string& nullifier) {
    return commitment_of(scheme(), fe(secret), fe(nullifier)).value.to_hex();
  });

  m.def(
      "compute_delay",
      [](const std::string& shape, std::uint64_t count, long long avg_num, Tick min_delay, long long avg_den,
         Tick max_delay) {
        return compute_delay(parse_delay_shape(shape), count, Rational(avg_num, avg_den), min_delay, max_delay);
      },
      py::arg("shape"), py::arg("count"), py::arg("average"), py::arg("min_delay"), py::arg("average_den") = 1,
      py::arg("max_delay") = kDefaultMaxDelay);

  m.def("merkle_root", [](const std::vector<std::string>& leaves, unsigned depth) {
    IncrementalMerkleTree t(default_hash_scheme(), depth);
    for (const auto& l : leaves) t.insert(fe(l));
    return t.root().to_hex();
  });

  m.def("list_scenarios", [] {
    std::vector<std::string> out;
    for (const auto& b : bundled_scenarios()) out.emplace_back(b.name);
    return out;
  });
  m.def("scenario_source", [](const std::string& name) {
    auto s = bundled_scenario_source(name);
    if (!s) throw Error(Errc::ValidationError, "no bundled scenario '" + name + "'");
    return std::string(*s);
  });
  m.def(
      "run_scenario_json",
      [](const std::string& ref, std::optional<std::uint64_t> seed) {
        auto script = resolve(ref);
        if (seed) script.seed = *seed;
        Report r;
        {
          py::gil_scoped_release release;
          r = run_scenario(script);
        }
        return r.to_json().dump();
      },
      py::arg("scenario"), py::arg("seed") = py::none());
  m.def("random_scenario_json", [](std::uint64_t seed) { return scenario_to_json(make_random_scenario(seed)).dump(); });
  m.def("gas_report_json", [] {
    nlohmann::ordered_json j;
    j["deployment"] = cost_report_to_json(static_cost_table(GasTariff::deployment(), GasPrices{}));
    j["operations"] = cost_report_to_json(static_cost_table(GasTariff::operations(), GasPrices{}));
    return j.dump();
  });

  py::class_<Session>(m, "Session")
      .def(py::init<const std::string&, Amount, Tick, std::uint64_t, unsigned>(), py::arg("mode") = "constant_time",
           py::arg("denomination") = 1, py::arg("lock") = 0, py::arg("seed") = 0, py::arg("depth") = 16)
      .def("create_account", &Session::create_account, py::arg("id"), py::arg("balance") = 0)
      .def("balance", &Session::balance)
      .def("advance", &Session::advance)
      .def_property_readonly("tick", &Session::tick)
      .def("deposit", &Session::deposit)
      .def("approve", &Session::approve)
      .def("freeze", &Session::freeze)
      .def("unfreeze", &Session::unfreeze)
      .def("refund", &Session::refund)
      .def("withdraw", &Session::withdraw)
      .def("state", &Session::state)
      .def_property_readonly("root", &Session::root)
      .def_property_readonly("tree_size", &Session::tree_size)
      .def_property_readonly("total_gas", &Session::total_gas)
      .def("events_jsonl", &Session::events_jsonl);
}

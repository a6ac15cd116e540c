// zkmixer command-line front end.
//
// Exit codes: 0 ok, 1 load/usage error, 2 invariant violation,
// 3 verdict mismatch (attack-compare, or a scenario's own `expect` block).

#include "zkmixer/error.hpp"
#include "zkmixer/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace zkmixer;
using oj = nlohmann::ordered_json;

enum Exit { kOk = 0, kLoadError = 1, kInvariant = 2, kMismatch = 3 };

ScenarioScript load(const std::string& ref) {
  if (auto src = bundled_scenario_source(ref); src && !std::filesystem::exists(ref)) return load_scenario(*src);
  return load_scenario_file(ref);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(Errc::ValidationError, "cannot write " + out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

int run_cmd(const std::string& ref, std::optional<std::uint64_t> seed, const std::string& out,
            const std::string& format, const std::string& events) {
  ScenarioScript script;
  try {
    script = load(ref);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLoadError;
  }
  if (seed) script.seed = *seed;
  Report report = run_scenario(script);
  emit(format == "json" ? report.to_json().dump(2) : report.summary_table(), out);
  if (!events.empty()) emit(report.events.to_jsonl(), events);
  if (!report.invariants_hold()) {
    for (const auto& i : report.invariants) {
      if (!i.passed) std::cerr << "invariant violated: " << i.name << ": " << i.detail << "\n";
    }
    return kInvariant;
  }
  if (!report.expectation_met()) {
    std::cerr << "verdict " << to_string(report.attack.verdict) << " does not match expected " << script.expect->verdict
              << "\n";
    return kMismatch;
  }
  return kOk;
}

int list_cmd(const std::string& format, const std::string& out) {
  if (format == "json") {
    oj j = oj::array();
    for (const auto& b : bundled_scenarios()) {
      auto s = load_scenario(b.source);
      j.push_back({{"name", std::string(b.name)}, {"description", s.description}, {"seed", s.seed}});
    }
    emit(j.dump(2), out);
    return kOk;
  }
  std::ostringstream os;
  for (const auto& b : bundled_scenarios()) {
    auto s = load_scenario(b.source);
    os << std::string(b.name) << std::string(b.name.size() < 28 ? 28 - b.name.size() : 1, ' ') << s.description
       << "\n";
  }
  emit(os.str(), out);
  return kOk;
}

int gas_cmd(const std::optional<std::string>& ref, std::optional<std::uint64_t> seed, const std::string& out,
            const std::string& format) {
  if (!ref) {
    const GasPrices prices;
    auto deploy = static_cost_table(GasTariff::deployment(), prices);
    auto ops = static_cost_table(GasTariff::operations(), prices);
    if (format == "json") {
      oj j;
      j["schema_version"] = kReportSchemaVersion;
      j["seed"] = nullptr;
      j["deployment"] = cost_report_to_json(deploy);
      j["operations"] = cost_report_to_json(ops);
      emit(j.dump(2), out);
    } else {
      emit("seed -\n" + cost_report_table(deploy, "deployment") + "\n" + cost_report_table(ops, "operations"), out);
    }
    return kOk;
  }
  ScenarioScript script;
  try {
    script = load(*ref);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLoadError;
  }
  if (seed) script.seed = *seed;
  auto report = run_scenario(script);
  if (format == "json") {
    oj j;
    j["schema_version"] = kReportSchemaVersion;
    j["scenario"] = script.name;
    j["seed"] = script.seed;
    j["operations"] = cost_report_to_json(report.cost);
    emit(j.dump(2), out);
  } else {
    emit("scenario " + script.name + "\nseed " + std::to_string(script.seed) + "\n" +
             cost_report_table(report.cost, "operations"),
         out);
  }
  return report.invariants_hold() ? kOk : kInvariant;
}

int compare_cmd(const std::string& baseline_ref, const std::string& defended_ref, std::optional<std::uint64_t> seed,
                const std::string& out, const std::string& format) {
  ScenarioScript baseline, defended;
  try {
    baseline = load(baseline_ref);
    defended = load(defended_ref);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLoadError;
  }
  const std::uint64_t s = seed ? *seed : baseline.seed;
  baseline.seed = s;
  defended.seed = s;
  auto fb = std::async(std::launch::async, [&] { return run_scenario(baseline); });
  auto fd = std::async(std::launch::async, [&] { return run_scenario(defended); });
  Report rb = fb.get(), rd = fd.get();

  const bool ok = rb.attack.verdict == AttackVerdict::AttackSucceeded &&
                  rd.attack.verdict == AttackVerdict::AttackBlocked;
  const bool clean = rb.invariants_hold() && rd.invariants_hold();
  if (format == "json") {
    auto side = [](const Report& r) {
      return oj{{"scenario", r.scenario},
                {"verdict", std::string(to_string(r.attack.verdict))},
                {"stage", r.attack.stage.empty() ? oj(nullptr) : oj(r.attack.stage)},
                {"poi_valid", r.attack.poi_valid},
                {"invariants_hold", r.invariants_hold()},
                {"event_log_digest", r.events.digest_hex()}};
    };
    oj j{{"schema_version", kReportSchemaVersion}, {"seed", s}, {"baseline", side(rb)}, {"defended", side(rd)},
         {"pass", ok && clean}};
    emit(j.dump(2), out);
  } else {
    auto stage = [](const Report& r) { return r.attack.stage.empty() ? std::string("-") : r.attack.stage; };
    auto col = [](std::string v, std::size_t w) { return v.size() >= w ? v + " " : v + std::string(w - v.size(), ' '); };
    std::ostringstream os;
    os << "seed " << s << "\n";
    os << col("", 10) << col("scenario", 28) << col("verdict", 18) << col("stage", 18) << "poi\n";
    os << col("baseline", 10) << col(rb.scenario, 28) << col(std::string(to_string(rb.attack.verdict)), 18)
       << col(stage(rb), 18) << (rb.attack.poi_valid ? "valid" : "-") << "\n";
    os << col("defended", 10) << col(rd.scenario, 28) << col(std::string(to_string(rd.attack.verdict)), 18)
       << col(stage(rd), 18) << (rd.attack.poi_valid ? "valid" : "-") << "\n";
    os << (ok ? "result: baseline bypassed, defended blocked\n" : "result: MISMATCH\n");
    emit(os.str(), out);
  }
  if (!clean) return kInvariant;
  return ok ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zkmixer: pre-validating mixer simulator"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "table";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--out", out, "Output file (default stdout)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
  };

  std::string scenario, events;
  auto* run = app.add_subcommand("run", "Run a scenario file or bundled scenario");
  run->add_option("scenario", scenario, "Path or bundled scenario name")->required();
  run->add_option("--events", events, "Also write the event log as JSON lines");
  add_common(run);

  auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");
  list->add_option("--out", out, "Output file (default stdout)");
  list->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));

  std::optional<std::string> gas_scenario;
  auto* gas = app.add_subcommand("gas-report", "Gas and USD cost tables");
  gas->add_option("scenario", gas_scenario, "Scenario to meter (static tables when omitted)");
  add_common(gas);

  std::string baseline = "fig3_poi_bypass", defended = "zk_attack_defended";
  auto* compare = app.add_subcommand("attack-compare", "Run the paired laundering experiment");
  compare->add_option("--baseline", baseline, "Baseline scenario");
  compare->add_option("--defended", defended, "Defended scenario");
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kLoadError;
  }

  try {
    if (*run) return run_cmd(scenario, seed, out, format, events);
    if (*list) return list_cmd(format, out);
    if (*gas) return gas_cmd(gas_scenario, seed, out, format);
    if (*compare) return compare_cmd(baseline, defended, seed, out, format);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLoadError;
  }
  return kLoadError;
}

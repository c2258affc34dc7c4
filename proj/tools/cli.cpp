#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpa/experiment.hpp"
#include "gpa/instrument.hpp"
#include "gpa/netlist.hpp"
#include "gpa/oracle.hpp"
#include "gpa/rules.hpp"
#include "gpa/simulate.hpp"
#include "gpa/stats.hpp"

namespace gpa::cli {

namespace {

// Bad input files and unreadable/unwritable paths map to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> technique_names() {
  std::vector<std::string> names;
  for (Technique t : kAllTechniques) names.emplace_back(technique_name(t));
  return names;
}

Technique technique_arg(const std::string& name) {
  auto t = technique_from_name(name);
  if (!t) throw std::invalid_argument(fmt::format("unknown technique '{}'", name));
  return *t;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw InputError(fmt::format("cannot write '{}'", path));
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ParseResult parse_file(const std::string& path, bool cut_dffs) {
  ParseOptions options;
  options.cut_dffs = cut_dffs;
  return parse_bench_file(path, options);
}

// Prints diagnostics; returns the circuit or throws InputError.
Circuit load(const std::string& path, bool cut_dffs, std::ostream& err) {
  ParseResult r = parse_file(path, cut_dffs);
  for (const auto& d : r.diagnostics) err << path << ":" << to_string(d) << "\n";
  if (!r.ok()) throw InputError(fmt::format("'{}' did not parse", path));
  return std::move(*r.circuit);
}

std::size_t logic_depth(const Circuit& c) {
  std::vector<std::size_t> level(c.net_count(), 0);
  std::size_t depth = 0;
  for (GateId g : c.topo()) {
    const Gate& gate = c.gate(g);
    std::size_t l = 0;
    for (NetId in : gate.fanin) l = std::max(l, level[in]);
    level[gate.fanout] = l + 1;
    depth = std::max(depth, l + 1);
  }
  return depth;
}

nlohmann::ordered_json circuit_stats(const Circuit& c) {
  std::map<std::string, std::size_t> kinds;
  for (const Gate& g : c.gates()) ++kinds[std::string(bench_name(g.kind))];
  nlohmann::ordered_json j;
  j["circuit"] = c.name();
  j["inputs"] = c.inputs().size();
  j["outputs"] = c.outputs().size();
  j["gates"] = c.gate_count();
  j["nets"] = c.net_count();
  j["depth"] = logic_depth(c);
  j["binarized_gates"] = binarize(c).gate_count();
  j["kinds"] = kinds;
  return j;
}

// ---- parse ----------------------------------------------------------------

struct ParseArgs {
  std::string path;
  bool json = false;
  bool stats = false;
  bool cut_dffs = false;
};

int cmd_parse(const ParseArgs& a, std::ostream& out, std::ostream& err) {
  ParseResult r = parse_file(a.path, a.cut_dffs);
  if (a.json) {
    nlohmann::ordered_json j;
    j["file"] = a.path;
    j["ok"] = r.ok();
    auto diags = nlohmann::ordered_json::array();
    for (const auto& d : r.diagnostics) {
      diags.push_back({{"severity", d.is_error() ? "error" : "warning"},
                       {"line", d.line},
                       {"column", d.column},
                       {"message", d.message}});
    }
    j["diagnostics"] = std::move(diags);
    if (a.stats && r.ok()) j["stats"] = circuit_stats(*r.circuit);
    out << j.dump(2) << "\n";
  } else {
    for (const auto& d : r.diagnostics) err << a.path << ":" << to_string(d) << "\n";
    if (a.stats && r.ok()) {
      const auto s = circuit_stats(*r.circuit);
      out << fmt::format("circuit {}\ninputs {}\noutputs {}\ngates {}\nnets {}\ndepth {}\nbinarized_gates {}\n",
                         s["circuit"].get<std::string>(), s["inputs"].get<std::size_t>(),
                         s["outputs"].get<std::size_t>(), s["gates"].get<std::size_t>(),
                         s["nets"].get<std::size_t>(), s["depth"].get<std::size_t>(),
                         s["binarized_gates"].get<std::size_t>());
      for (const auto& [kind, n] : s["kinds"].items()) out << fmt::format("gates.{} {}\n", kind, n.get<std::size_t>());
    }
  }
  return r.ok() ? kOk : kInput;
}

// ---- instrument -----------------------------------------------------------

struct InstrumentArgs {
  std::string path;
  std::string tech = "precise-ift";
  std::string format = "bench";
  std::string out;
  bool shadow_only = false;
  bool cut_dffs = false;
};

int cmd_instrument(const InstrumentArgs& a, std::ostream& out, std::ostream& err) {
  const Circuit c = load(a.path, a.cut_dffs, err);
  const Technique tech = technique_arg(a.tech);
  const auto ic = instrument(c, tech, a.shadow_only ? InstrumentMode::ShadowOnly : InstrumentMode::Combined);
  const std::string text = emit(ic, a.format == "verilog" ? NetlistFormat::Verilog : NetlistFormat::Bench);
  const std::string summary =
      fmt::format("{}: {} shadow gates for {} source gates (precision level {}), {} label inputs, {} label outputs\n",
                  technique_name(tech), ic.shadow_gate_count, ic.source_gate_count, precision_level(tech),
                  ic.label_inputs.size(), ic.label_outputs.size());
  if (a.out.empty()) {
    out << text;
    err << summary;
  } else {
    write_text(a.out, text);
    out << summary;
  }
  return kOk;
}

// ---- experiment -----------------------------------------------------------

struct ExperimentArgs {
  std::vector<std::string> paths;
  std::string pair = "imprecise-ift:precise-ift";
  std::size_t trials = 1000;
  std::vector<double> fractions = {0.1, 0.25, 0.5};
  std::uint64_t seed = 1;
  std::string selection = "exact";
  std::string metric = "any-output";
  double alpha = 0.05;
  double ci_level = 0.95;
  std::size_t resamples = 10000;
  unsigned jobs = 1;
  std::string out;
  std::string json;
  std::string manifest;
  std::string from_manifest;
};

ExperimentPlan plan_from_args(const ExperimentArgs& a) {
  ExperimentPlan plan;
  if (a.paths.empty()) throw std::invalid_argument("no benchmark files given");
  plan.benchmarks = a.paths;
  const auto colon = a.pair.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("--pair expects TECH_A:TECH_B");
  plan.technique_a = technique_arg(a.pair.substr(0, colon));
  plan.technique_b = technique_arg(a.pair.substr(colon + 1));
  plan.trials = a.trials;
  plan.fractions = a.fractions;
  plan.selection =
      a.selection == "bernoulli" ? LabelProtocol::Selection::Bernoulli : LabelProtocol::Selection::ExactCount;
  plan.metric = a.metric == "output-fraction" ? LabelProtocol::Metric::LabeledOutputFraction
                                              : LabelProtocol::Metric::AnyOutputLabeled;
  plan.seed = a.seed;
  plan.alpha = a.alpha;
  plan.ci_level = a.ci_level;
  plan.bootstrap_resamples = a.resamples;
  plan.jobs = a.jobs;
  return plan;
}

ExperimentPlan plan_from_manifest_file(const std::string& path, std::ostream& err) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("'{}' is not a valid manifest: {}", path, e.what()));
  }
  ExperimentPlan plan;
  try {
    plan = plan_from_manifest(m);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("'{}' is not a valid manifest: {}", path, e.what()));
  } catch (const std::invalid_argument& e) {
    throw InputError(fmt::format("'{}' is not a valid manifest: {}", path, e.what()));
  }
  if (m.contains("inputs")) {
    for (const auto& in : m["inputs"]) {
      const auto file = in.value("path", std::string{});
      const auto recorded = in.value("sha256", std::string{});
      std::string now;
      try {
        now = sha256_file(file);
      } catch (const std::exception&) {
      }
      if (now != recorded) err << fmt::format("gpa: warning: '{}' differs from the manifest digest\n", file);
    }
  }
  return plan;
}

int cmd_experiment(const ExperimentArgs& a, bool jobs_given, std::ostream& out, std::ostream& err) {
  ExperimentPlan plan;
  if (!a.from_manifest.empty()) {
    plan = plan_from_manifest_file(a.from_manifest, err);
    if (jobs_given) plan.jobs = a.jobs;
  } else {
    plan = plan_from_args(a);
  }
  const ExperimentReport report = run_experiment(plan);
  for (const auto& [bench, why] : report.failures) err << fmt::format("gpa: skipped '{}': {}\n", bench, why);

  const std::string csv = report_csv(report);
  if (a.out.empty()) out << csv;
  else write_text(a.out, csv);
  if (!a.json.empty()) write_text(a.json, report_json(report));

  std::string manifest_path = a.manifest;
  if (manifest_path.empty() && !a.out.empty()) manifest_path = a.out + ".manifest.json";
  if (!manifest_path.empty()) write_text(manifest_path, make_manifest(plan, "experiment").dump(2) + "\n");
  return report.failures.empty() ? kOk : kInput;
}

// ---- oracle ---------------------------------------------------------------

struct OracleArgs {
  std::string path;
  std::string tech = "precise-ift";
  std::size_t trials = 1000;
  unsigned budget = 20;
  double fraction = 0.25;
  std::string selection = "exact";
  std::uint64_t seed = 1;
  std::string rows;
  bool json = false;
  bool cut_dffs = false;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err) {
  const Circuit c = load(a.path, a.cut_dffs, err);
  const Technique tech = technique_arg(a.tech);
  if (!(a.fraction >= 0.0 && a.fraction <= 1.0)) throw std::invalid_argument("label fraction must be in [0, 1]");
  LabelProtocol protocol;
  protocol.fraction = a.fraction;
  protocol.selection =
      a.selection == "bernoulli" ? LabelProtocol::Selection::Bernoulli : LabelProtocol::Selection::ExactCount;
  OracleBudget budget;
  budget.max_enumeration_bits = a.budget;
  const auto report = false_positive_report(c, tech, protocol, a.trials, a.seed, budget, !a.rows.empty());

  // X-propagation has two plausible oracles; report where they disagree.
  std::size_t toggle_compared = 0;
  std::size_t toggle_disagree = 0;
  if (tech == Technique::XProp) {
    for (std::size_t t = 0; t < a.trials; ++t) {
      const auto s = draw_stimulus(c.inputs().size(), protocol, a.seed, t);
      const auto exist = xprop_oracle(c, s.values, s.labeled, budget, XPropMode::Existential);
      if (!exist) continue;
      const auto single = xprop_oracle(c, s.values, s.labeled, budget, XPropMode::SingleToggle);
      for (std::size_t o = 0; o < exist->size(); ++o) {
        ++toggle_compared;
        if ((*exist)[o] != (*single)[o]) ++toggle_disagree;
      }
    }
  }

  if (!a.rows.empty()) write_text(a.rows, report_rows_csv(report, c));
  if (a.json) {
    auto j = nlohmann::ordered_json::parse(report_json(report, c));
    if (tech == Technique::XProp) {
      j["single_toggle_compared_bits"] = toggle_compared;
      j["single_toggle_disagreements"] = toggle_disagree;
    }
    out << j.dump(2) << "\n";
  } else {
    out << fmt::format("circuit {}\ntechnique {}\ntrials {} (evaluated {}, over budget {})\ncompared_bits {}\n",
                       report.circuit, technique_name(tech), report.trials, report.evaluated_trials,
                       report.skipped_trials, report.compared_bits);
    out << fmt::format("false_positives {} (rate {})\nfalse_negatives {} (rate {})\n", report.false_positives,
                       report.false_positive_rate(), report.false_negatives, report.false_negative_rate());
    if (tech == Technique::XProp) {
      out << fmt::format("single_toggle_disagreements {} of {}\n", toggle_disagree, toggle_compared);
    }
  }
  if (!report.skipped.empty()) {
    err << fmt::format("gpa: {} trial(s) exceeded the oracle budget of {} labeled inputs: {}\n",
                       report.skipped.size(), a.budget, fmt::join(report.skipped, ","));
  }
  if (report.false_negatives > 0) {
    err << fmt::format("gpa: safety violation: {} false negative(s)\n", report.false_negatives);
    return kSafety;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gate-level propagation analysis for information flow, X-propagation and faults", "gpa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::uint64_t default_seed = 1;
  if (const char* env = std::getenv("GPA_SEED"); env != nullptr && *env != '\0') {
    auto v = parse_u64(env);
    if (!v) {
      err << fmt::format("gpa: GPA_SEED='{}' is not an unsigned integer\n", env);
      return kUsage;
    }
    default_seed = *v;
  }

  const auto techs = technique_names();

  ParseArgs pa;
  auto* parse = app.add_subcommand("parse", "Parse and validate a .bench netlist");
  parse->add_option("path", pa.path, ".bench file")->required();
  parse->add_flag("--json", pa.json, "Emit diagnostics (and stats) as JSON on stdout");
  parse->add_flag("--stats", pa.stats, "Print gate, net and I/O counts");
  parse->add_flag("--cut-dffs", pa.cut_dffs, "Treat DFFs as cut points instead of rejecting them");

  InstrumentArgs ia;
  auto* inst = app.add_subcommand("instrument", "Emit a netlist with propagation (shadow) logic");
  inst->add_option("path", ia.path, ".bench file")->required();
  inst->add_option("--tech", ia.tech, "Technique")->check(CLI::IsMember(techs))->capture_default_str();
  inst->add_option("--format", ia.format, "Output format")
      ->check(CLI::IsMember({"bench", "verilog"}))
      ->capture_default_str();
  inst->add_option("--out,-o", ia.out, "Output file (default: stdout)");
  inst->add_flag("--shadow-only", ia.shadow_only, "Emit only the shadow logic, with value nets as inputs");
  inst->add_flag("--cut-dffs", ia.cut_dffs, "Treat DFFs as cut points instead of rejecting them");

  ExperimentArgs ea;
  ea.seed = default_seed;
  auto* exp = app.add_subcommand("experiment", "Compare two techniques over seeded random trials");
  exp->add_option("paths", ea.paths, ".bench files");
  exp->add_option("--pair", ea.pair, "Techniques to compare, as A:B (diff = mean_A - mean_B)")->capture_default_str();
  exp->add_option("--trials", ea.trials, "Trials per technique and fraction")->capture_default_str();
  exp->add_option("--fractions", ea.fractions, "Labeled-input fractions")->delimiter(',')->capture_default_str();
  exp->add_option("--seed", ea.seed, "Seed (default: $GPA_SEED or 1)")->capture_default_str();
  exp->add_option("--selection", ea.selection, "Label selection")
      ->check(CLI::IsMember({"exact", "bernoulli"}))
      ->capture_default_str();
  exp->add_option("--metric", ea.metric, "Per-trial metric")
      ->check(CLI::IsMember({"any-output", "output-fraction"}))
      ->capture_default_str();
  exp->add_option("--alpha", ea.alpha, "Significance level")->capture_default_str();
  exp->add_option("--ci-level", ea.ci_level, "Bootstrap confidence level")->capture_default_str();
  exp->add_option("--resamples", ea.resamples, "Bootstrap resamples")->capture_default_str();
  auto* jobs_opt = exp->add_option("--jobs,-j", ea.jobs, "Benchmarks processed concurrently")
                       ->check(CLI::PositiveNumber)
                       ->capture_default_str();
  exp->add_option("--out,-o", ea.out, "CSV report (default: stdout)");
  exp->add_option("--json", ea.json, "Also write the report as JSON to this file");
  exp->add_option("--manifest", ea.manifest, "Manifest path (default: <out>.manifest.json when --out is given)");
  exp->add_option("--from-manifest", ea.from_manifest, "Re-run the configuration recorded in a manifest")
      ->excludes("paths");

  OracleArgs oa;
  oa.seed = default_seed;
  auto* orc = app.add_subcommand("oracle", "Count false positives/negatives against exact oracles");
  orc->add_option("path", oa.path, ".bench file")->required();
  orc->add_option("--tech", oa.tech, "Technique")->check(CLI::IsMember(techs))->capture_default_str();
  orc->add_option("--trials", oa.trials, "Trials")->check(CLI::PositiveNumber)->capture_default_str();
  orc->add_option("--budget", oa.budget, "Max labeled inputs the enumerating oracles accept")->capture_default_str();
  orc->add_option("--fraction", oa.fraction, "Labeled-input fraction")->capture_default_str();
  orc->add_option("--selection", oa.selection, "Label selection")
      ->check(CLI::IsMember({"exact", "bernoulli"}))
      ->capture_default_str();
  orc->add_option("--seed", oa.seed, "Seed (default: $GPA_SEED or 1)")->capture_default_str();
  orc->add_option("--rows", oa.rows, "Write per-trial, per-output rows as CSV");
  orc->add_flag("--json", oa.json, "Print the report as JSON");
  orc->add_flag("--cut-dffs", oa.cut_dffs, "Treat DFFs as cut points instead of rejecting them");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    if (parse->parsed()) return cmd_parse(pa, out, err);
    if (inst->parsed()) return cmd_instrument(ia, out, err);
    if (exp->parsed()) return cmd_experiment(ea, jobs_opt->count() > 0, out, err);
    if (orc->parsed()) return cmd_oracle(oa, out, err);
  } catch (const InputError& e) {
    err << "gpa: " << e.what() << "\n";
    return kInput;
  } catch (const NetlistError& e) {
    err << "gpa: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    err << "gpa: error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace gpa::cli

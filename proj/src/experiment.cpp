#include "gpa/experiment.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <iterator>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace gpa {

std::string_view selection_name(LabelProtocol::Selection s) {
  return s == LabelProtocol::Selection::ExactCount ? "exact" : "bernoulli";
}

std::string_view metric_name(LabelProtocol::Metric m) {
  return m == LabelProtocol::Metric::AnyOutputLabeled ? "any-output" : "output-fraction";
}

namespace {

struct BenchmarkOutcome {
  std::vector<ReportRow> rows;
  std::string error;
};

BenchmarkOutcome run_benchmark(const ExperimentPlan& plan, const std::string& path) {
  BenchmarkOutcome out;
  ParseResult parsed = parse_bench_file(path);
  if (!parsed.ok()) {
    out.error = "parse failed";
    for (const auto& d : parsed.diagnostics) {
      if (d.is_error()) {
        out.error = to_string(d);
        break;
      }
    }
    return out;
  }
  try {
    const Circuit binary = binarize(*parsed.circuit);
    for (double fraction : plan.fractions) {
      ExperimentConfig config;
      config.circuit_path = path;
      config.technique_a = plan.technique_a;
      config.technique_b = plan.technique_b;
      config.trials = plan.trials;
      config.protocol = {fraction, plan.selection, plan.metric};
      config.seed = plan.seed;
      config.alpha = plan.alpha;
      config.ci_level = plan.ci_level;
      config.bootstrap_resamples = plan.bootstrap_resamples;
      ReportRow row{path, plan.technique_a, plan.technique_b, fraction, plan.trials, binary.gate_count(),
                    compare(binary, config)};
      out.rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    out.error = e.what();
  }
  return out;
}

std::string num(double x) { return fmt::format("{}", x); }

}  // namespace

ExperimentReport run_experiment(const ExperimentPlan& plan) {
  ExperimentConfig probe;
  probe.trials = plan.trials;
  probe.alpha = plan.alpha;
  probe.ci_level = plan.ci_level;
  for (double f : plan.fractions) {
    probe.protocol.fraction = f;
    check_config(probe);
  }
  if (plan.fractions.empty()) throw std::invalid_argument("no label fractions given");

  std::vector<BenchmarkOutcome> outcomes(plan.benchmarks.size());
  const std::size_t jobs = std::max<std::size_t>(1, plan.jobs);
  for (std::size_t start = 0; start < plan.benchmarks.size(); start += jobs) {
    const std::size_t end = std::min(plan.benchmarks.size(), start + jobs);
    std::vector<std::future<BenchmarkOutcome>> pending;
    for (std::size_t i = start; i < end; ++i) {
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_benchmark,
                                   std::cref(plan), std::cref(plan.benchmarks[i])));
    }
    for (std::size_t i = start; i < end; ++i) outcomes[i] = pending[i - start].get();
  }

  ExperimentReport report;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].error.empty()) report.failures.emplace_back(plan.benchmarks[i], outcomes[i].error);
    std::move(outcomes[i].rows.begin(), outcomes[i].rows.end(), std::back_inserter(report.rows));
  }
  return report;
}

std::string report_csv(const ExperimentReport& report) {
  std::string out = "benchmark,technique_a,technique_b,fraction,trials,mean_a,mean_b,diff,t,df,p,ci_lo,ci_hi,significant\n";
  for (const auto& row : report.rows) {
    const auto& r = row.result;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", row.benchmark, technique_name(row.technique_a),
                       technique_name(row.technique_b), num(row.fraction), row.trials, num(r.mean_a), num(r.mean_b),
                       num(r.diff), num(r.t), num(r.df), num(r.p), num(r.ci_lo), num(r.ci_hi), r.significant ? 1 : 0);
  }
  return out;
}

std::string report_json(const ExperimentReport& report) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    const auto& r = row.result;
    nlohmann::ordered_json j;
    j["benchmark"] = row.benchmark;
    j["technique_a"] = technique_name(row.technique_a);
    j["technique_b"] = technique_name(row.technique_b);
    j["fraction"] = row.fraction;
    j["trials"] = row.trials;
    j["gates"] = row.gates;
    j["mean_a"] = r.mean_a;
    j["mean_b"] = r.mean_b;
    j["diff"] = r.diff;
    // JSON has no infinities; the degenerate zero-variance case uses strings.
    if (std::isfinite(r.t)) j["t"] = r.t;
    else j["t"] = num(r.t);
    j["df"] = r.df;
    j["p"] = r.p;
    j["ci_lo"] = r.ci_lo;
    j["ci_hi"] = r.ci_hi;
    j["significant"] = r.significant;
    rows.push_back(std::move(j));
  }
  auto failures = nlohmann::ordered_json::array();
  for (const auto& [bench, why] : report.failures) failures.push_back({{"benchmark", bench}, {"error", why}});
  nlohmann::ordered_json doc;
  doc["rows"] = std::move(rows);
  doc["failures"] = std::move(failures);
  return doc.dump(2) + "\n";
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

nlohmann::ordered_json make_manifest(const ExperimentPlan& plan, std::string_view command) {
  nlohmann::ordered_json config;
  config["benchmarks"] = plan.benchmarks;
  config["technique_a"] = technique_name(plan.technique_a);
  config["technique_b"] = technique_name(plan.technique_b);
  config["trials"] = plan.trials;
  config["fractions"] = plan.fractions;
  config["selection"] = selection_name(plan.selection);
  config["metric"] = metric_name(plan.metric);
  // Seeds are 64-bit; JSON readers commonly lose precision above 2^53.
  config["seed"] = std::to_string(plan.seed);
  config["alpha"] = plan.alpha;
  config["ci_level"] = plan.ci_level;
  config["bootstrap_resamples"] = plan.bootstrap_resamples;
  config["jobs"] = plan.jobs;

  auto inputs = nlohmann::ordered_json::array();
  for (const auto& path : plan.benchmarks) {
    std::string digest;
    try {
      digest = sha256_file(path);
    } catch (const std::exception&) {
      digest = "";
    }
    inputs.push_back({{"path", path}, {"sha256", digest}});
  }

  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

  nlohmann::ordered_json m;
  m["tool"] = "gpa";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = std::move(config);
  m["inputs"] = std::move(inputs);
  m["timestamp"] = stamp;
  return m;
}

ExperimentPlan plan_from_manifest(const nlohmann::json& manifest) {
  const auto& c = manifest.at("config");
  ExperimentPlan plan;
  plan.benchmarks = c.at("benchmarks").get<std::vector<std::string>>();
  auto tech = [](const nlohmann::json& j) {
    auto t = technique_from_name(j.get<std::string>());
    if (!t) throw std::invalid_argument("unknown technique in manifest");
    return *t;
  };
  plan.technique_a = tech(c.at("technique_a"));
  plan.technique_b = tech(c.at("technique_b"));
  plan.trials = c.at("trials").get<std::size_t>();
  plan.fractions = c.at("fractions").get<std::vector<double>>();
  const auto selection = c.at("selection").get<std::string>();
  if (selection == "exact") plan.selection = LabelProtocol::Selection::ExactCount;
  else if (selection == "bernoulli") plan.selection = LabelProtocol::Selection::Bernoulli;
  else throw std::invalid_argument("unknown selection in manifest");
  const auto metric = c.at("metric").get<std::string>();
  if (metric == "any-output") plan.metric = LabelProtocol::Metric::AnyOutputLabeled;
  else if (metric == "output-fraction") plan.metric = LabelProtocol::Metric::LabeledOutputFraction;
  else throw std::invalid_argument("unknown metric in manifest");
  plan.seed = std::stoull(c.at("seed").get<std::string>());
  plan.alpha = c.at("alpha").get<double>();
  plan.ci_level = c.at("ci_level").get<double>();
  plan.bootstrap_resamples = c.at("bootstrap_resamples").get<std::size_t>();
  plan.jobs = c.value("jobs", 1U);
  return plan;
}

}  // namespace gpa

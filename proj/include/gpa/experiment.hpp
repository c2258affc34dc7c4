#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpa/rules.hpp"
#include "gpa/simulate.hpp"
#include "gpa/stats.hpp"

namespace gpa {

inline constexpr const char* kToolVersion = "0.1.0";

/// A batch of technique comparisons: every benchmark at every label fraction.
struct ExperimentPlan {
  std::vector<std::string> benchmarks;
  Technique technique_a = Technique::ImpreciseIFT;
  Technique technique_b = Technique::PreciseIFT;
  std::size_t trials = 1000;
  std::vector<double> fractions = {0.1, 0.25, 0.5};
  LabelProtocol::Selection selection = LabelProtocol::Selection::ExactCount;
  LabelProtocol::Metric metric = LabelProtocol::Metric::AnyOutputLabeled;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  double ci_level = 0.95;
  std::size_t bootstrap_resamples = 10000;
  /// Benchmarks processed concurrently; never changes the report.
  unsigned jobs = 1;
};

struct ReportRow {
  std::string benchmark;
  Technique technique_a;
  Technique technique_b;
  double fraction = 0.0;
  std::size_t trials = 0;
  std::size_t gates = 0;  // after binarization
  ExperimentResult result;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  /// Benchmarks whose rows were dropped, with the reason.
  std::vector<std::pair<std::string, std::string>> failures;
};

/// Throws std::invalid_argument on an invalid plan (checked before any work).
ExperimentReport run_experiment(const ExperimentPlan& plan);

/// Header: benchmark,technique_a,technique_b,fraction,trials,mean_a,mean_b,
/// diff,t,df,p,ci_lo,ci_hi,significant. Doubles use the shortest round-trip
/// decimal form; `significant` is 0/1.
std::string report_csv(const ExperimentReport& report);
std::string report_json(const ExperimentReport& report);

std::string_view selection_name(LabelProtocol::Selection s);
std::string_view metric_name(LabelProtocol::Metric m);

/// Lower-case hex SHA-256 of a file's bytes; throws std::runtime_error if it
/// cannot be read.
std::string sha256_file(const std::string& path);

/// Everything needed to re-run `plan`: tool version, config echo, input
/// digests and an ISO-8601 UTC timestamp.
nlohmann::ordered_json make_manifest(const ExperimentPlan& plan, std::string_view command);
/// Inverse of the config part of make_manifest(). Throws on a malformed manifest.
ExperimentPlan plan_from_manifest(const nlohmann::json& manifest);

}  // namespace gpa

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpa/netlist.hpp"
#include "gpa/rules.hpp"
#include "gpa/simulate.hpp"

namespace gpa {

/// Regularized incomplete beta function I_x(a, b), by Lentz's continued
/// fraction with the usual symmetry switch.
double incomplete_beta(double a, double b, double x);

/// Two-sided survival probability P(|T| >= |t|) for Student's t with `df`
/// degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

/// Welch's unequal-variance t test (sample variances, n - 1 denominators).
///
/// When both variances are zero the statistic is undefined; by convention
/// df = n_a + n_b - 2 and either t = 0, p = 1 (equal means) or t = +-inf,
/// p = 0 (different means). Throws std::invalid_argument if a sample has
/// fewer than 2 elements.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap interval for mean(a) - mean(b).
///
/// Resample r (0-based) draws from Substream(seed, r): n_a indices into `a`
/// via below(n_a), then n_b indices into `b`. The R resampled differences plus
/// the observed difference are sorted and the (1 - level) / 2 and
/// 1 - (1 - level) / 2 quantiles taken with linear interpolation between order
/// statistics (h = (N - 1) q).
Interval bootstrap_ci(std::span<const double> a, std::span<const double> b, double level, std::size_t resamples,
                      std::uint64_t seed);

/// Linear-interpolation quantile of sorted data (h = (N - 1) q).
double quantile_sorted(std::span<const double> sorted, double q);

struct ExperimentConfig {
  std::string circuit_path;
  Technique technique_a = Technique::ImpreciseIFT;
  Technique technique_b = Technique::PreciseIFT;
  std::size_t trials = 1000;
  LabelProtocol protocol;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  double ci_level = 0.95;
  std::size_t bootstrap_resamples = 10000;
  unsigned workers = 1;
};

/// Throws std::invalid_argument when a field is out of range.
void check_config(const ExperimentConfig& config);

/// Bootstrap seed used by compare(): mix64(seed ^ 0xB5AD4ECEDA1CE2A9), so
/// bootstrap streams never coincide with trial streams.
std::uint64_t bootstrap_seed(std::uint64_t seed);

struct ExperimentResult {
  std::vector<double> samples_a;
  std::vector<double> samples_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double diff = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool significant = false;
};

/// Runs both techniques on the same seeded trials (paired label sets) and
/// compares their per-trial metrics.
ExperimentResult compare(const Circuit& c, const ExperimentConfig& config);
/// Loads `config.circuit_path`; throws NetlistError if it does not parse.
ExperimentResult compare(const ExperimentConfig& config);

}  // namespace gpa

#include "gpa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "gpa/rng.hpp"

namespace gpa {

namespace {

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs, double mean) {
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("Welch's t test needs at least 2 samples per group");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = variance_of(a, ma) / na;
  const double sb = variance_of(b, mb) / nb;
  WelchResult r;
  if (sa + sb == 0.0) {
    r.df = na + nb - 2.0;
    if (ma == mb) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_ci(std::span<const double> a, std::span<const double> b, double level, std::size_t resamples,
                      std::uint64_t seed) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("bootstrap needs at least 2 samples per group");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0, 1)");
  std::vector<double> diffs;
  diffs.reserve(resamples + 1);
  for (std::size_t r = 0; r < resamples; ++r) {
    Substream rng(seed, r);
    double sa = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sa += a[rng.below(a.size())];
    double sb = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) sb += b[rng.below(b.size())];
    diffs.push_back(sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size()));
  }
  diffs.push_back(mean_of(a) - mean_of(b));
  std::sort(diffs.begin(), diffs.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile_sorted(diffs, tail), quantile_sorted(diffs, 1.0 - tail)};
}

void check_config(const ExperimentConfig& config) {
  if (config.trials < 2) {
    throw std::invalid_argument(fmt::format("{} trial(s) is below the minimum of 2 for a t test", config.trials));
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0)) throw std::invalid_argument("ci level must be in (0, 1)");
  if (!(config.protocol.fraction >= 0.0 && config.protocol.fraction <= 1.0)) {
    throw std::invalid_argument("label fraction must be in [0, 1]");
  }
}

std::uint64_t bootstrap_seed(std::uint64_t seed) { return mix64(seed ^ 0xB5AD4ECEDA1CE2A9ULL); }

ExperimentResult compare(const Circuit& c, const ExperimentConfig& config) {
  check_config(config);
  const Circuit binary = is_binarized(c) ? c : binarize(c);
  const RunOptions options{64, std::max(1U, config.workers / 2)};
  ExperimentResult r;
  if (config.workers > 1) {
    std::jthread other([&] {
      r.samples_b = run_trials(binary, config.technique_b, config.protocol, config.trials, config.seed, options);
    });
    r.samples_a = run_trials(binary, config.technique_a, config.protocol, config.trials, config.seed, options);
  } else {
    r.samples_a = run_trials(binary, config.technique_a, config.protocol, config.trials, config.seed, options);
    r.samples_b = run_trials(binary, config.technique_b, config.protocol, config.trials, config.seed, options);
  }
  r.mean_a = mean_of(r.samples_a);
  r.mean_b = mean_of(r.samples_b);
  r.diff = r.mean_a - r.mean_b;
  const WelchResult w = welch_t(r.samples_a, r.samples_b);
  r.t = w.t;
  r.df = w.df;
  r.p = w.p;
  const Interval ci =
      bootstrap_ci(r.samples_a, r.samples_b, config.ci_level, config.bootstrap_resamples, bootstrap_seed(config.seed));
  r.ci_lo = ci.lo;
  r.ci_hi = ci.hi;
  r.significant = r.p < config.alpha;
  return r;
}

ExperimentResult compare(const ExperimentConfig& config) {
  ParseResult parsed = parse_bench_file(config.circuit_path);
  if (!parsed.ok()) {
    std::string msg = fmt::format("cannot load '{}'", config.circuit_path);
    for (const auto& d : parsed.diagnostics) {
      if (d.is_error()) msg += "\n  " + to_string(d);
    }
    throw NetlistError(msg);
  }
  return compare(*parsed.circuit, config);
}

}  // namespace gpa

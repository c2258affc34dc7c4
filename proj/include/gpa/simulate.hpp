#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gpa/netlist.hpp"
#include "gpa/rules.hpp"

namespace gpa {

/// Bit-packed value and label planes for a block of independent trials.
///
/// Trial t lives in bit (t % width) of block (t / width) on every net; bits at
/// or above `width` are unused. Planes are stored net-major.
class TrialBatch {
 public:
  TrialBatch(std::size_t net_count, std::size_t trial_count, unsigned width = 64, std::uint64_t seed = 0);

  unsigned width() const { return width_; }
  std::size_t trial_count() const { return trial_count_; }
  std::size_t block_count() const { return blocks_; }
  std::size_t net_count() const { return net_count_; }
  std::uint64_t seed() const { return seed_; }

  /// Mask of the bits of `block` that hold real trials.
  Word lane_mask(std::size_t block) const;

  std::span<const Word> values(NetId net) const { return {&values_[net * blocks_], blocks_}; }
  std::span<const Word> labels(NetId net) const { return {&labels_[net * blocks_], blocks_}; }
  /// Mutable access marks the plane as populated.
  std::span<Word> values(NetId net);
  std::span<Word> labels(NetId net);

  bool value(NetId net, std::size_t trial) const;
  bool label(NetId net, std::size_t trial) const;
  void set_value(NetId net, std::size_t trial, bool v);
  void set_label(NetId net, std::size_t trial, bool l);

  bool values_ready(NetId net) const { return value_ready_[net] != 0; }
  bool labels_ready(NetId net) const { return label_ready_[net] != 0; }

 private:
  std::size_t net_count_;
  std::size_t trial_count_;
  unsigned width_;
  std::size_t blocks_;
  std::uint64_t seed_;
  std::vector<Word> values_;
  std::vector<Word> labels_;
  std::vector<std::uint8_t> value_ready_;
  std::vector<std::uint8_t> label_ready_;
};

/// Fills the value plane of every net. Throws std::logic_error if a primary
/// input plane was never written.
void simulate_values(const Circuit& c, TrialBatch& batch);

/// Fills value and label planes of every net by applying the per-gate rule of
/// `tech` in topological order. Requires a binarized circuit (throws
/// std::invalid_argument otherwise) and populated input planes.
void propagate_labels(const Circuit& c, TrialBatch& batch, Technique tech);

/// One-vector reference evaluation via gate_eval; returns every net value.
std::vector<bool> evaluate_scalar(const Circuit& c, const std::vector<bool>& input_values);

/// One-vector label propagation via label_rule; returns every net label.
/// Works on n-ary gates only for level 0 and 2.
std::vector<bool> propagate_scalar(const Circuit& c, const std::vector<bool>& input_values,
                                   const std::vector<bool>& input_labels, Technique tech);

struct LabelProtocol {
  enum class Selection { ExactCount, Bernoulli };
  enum class Metric { AnyOutputLabeled, LabeledOutputFraction };

  /// Portion of primary inputs labeled per trial, in [0, 1].
  double fraction = 0.25;
  Selection selection = Selection::ExactCount;
  Metric metric = Metric::AnyOutputLabeled;
};

/// Per-trial input values and labeled-input set, in `Circuit::inputs()` order.
struct TrialStimulus {
  std::vector<bool> values;
  std::vector<bool> labeled;
};

/// Draws trial `trial` from Substream(seed, trial): first one `bit()` per input
/// value, then the label set. ExactCount labels round(fraction * n) inputs
/// (half away from zero) chosen by a partial Fisher-Yates shuffle
/// (`j + below(n - j)` for j = 0..k-1); Bernoulli labels input i when
/// `unit() < fraction`.
TrialStimulus draw_stimulus(std::size_t input_count, const LabelProtocol& protocol, std::uint64_t seed,
                            std::uint64_t trial);

/// Batch holding trials [first, first + count) with input planes populated.
TrialBatch load_trials(const Circuit& c, const LabelProtocol& protocol, std::uint64_t seed, std::uint64_t first,
                       std::size_t count, unsigned width = 64);

/// Per-trial metric for trials [0, count) of a propagated batch.
std::vector<double> trial_metrics(const Circuit& c, const TrialBatch& batch, LabelProtocol::Metric metric);

struct RunOptions {
  unsigned width = 64;
  unsigned workers = 1;
};

/// Runs `trials` independent random trials. The result is a pure function of
/// (circuit, tech, protocol, trials, seed); width and workers only change how
/// the work is split. Non-binarized circuits are binarized first.
std::vector<double> run_trials(const Circuit& c, Technique tech, const LabelProtocol& protocol, std::size_t trials,
                               std::uint64_t seed, const RunOptions& options = {});

/// Debug dump: `trial,net,value,label` rows for every trial and net.
void write_trace_csv(const Circuit& c, const TrialBatch& batch, std::ostream& out);

}  // namespace gpa

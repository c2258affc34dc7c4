#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpa/netlist.hpp"
#include "gpa/rules.hpp"
#include "gpa/simulate.hpp"

namespace gpa {

/// Limits for the enumerating oracles. Enumeration over k labeled inputs costs
/// 2^k evaluations; above `max_enumeration_bits` the oracle declines.
struct OracleBudget {
  unsigned max_enumeration_bits = 20;
  /// Cap on vectors per oracle call; 0 means 2^max_enumeration_bits.
  std::uint64_t max_vectors = 0;
};

/// Per-output bits, or nullopt when the enumeration exceeds the budget.
using OracleOutputs = std::optional<std::vector<bool>>;

/// Output is tainted iff some assignment to the labeled inputs (others fixed)
/// changes it relative to `values`.
OracleOutputs ift_oracle(const Circuit& c, const std::vector<bool>& values, const std::vector<bool>& labeled,
                         const OracleBudget& budget = {});

/// Output is faulty iff flipping all faulty inputs at once changes it.
std::vector<bool> fpa_oracle(const Circuit& c, const std::vector<bool>& values, const std::vector<bool>& faulty);

enum class XPropMode {
  /// Some two assignments to the X inputs give different output values.
  Existential,
  /// Toggling a single X input (others at their given value) changes the output.
  SingleToggle,
};

OracleOutputs xprop_oracle(const Circuit& c, const std::vector<bool>& values, const std::vector<bool>& x_inputs,
                           const OracleBudget& budget = {}, XPropMode mode = XPropMode::Existential);

/// Oracle matching the label semantics of `tech`: IFT techniques use
/// ift_oracle, XProp the existential X oracle, FPA techniques fpa_oracle.
OracleOutputs oracle_for(Technique tech, const Circuit& c, const std::vector<bool>& values,
                         const std::vector<bool>& labeled, const OracleBudget& budget = {});

struct OracleRow {
  std::size_t trial = 0;
  std::size_t output = 0;  // index into Circuit::outputs()
  bool constructive = false;
  bool oracle = false;
};

struct FalsePositiveReport {
  std::string circuit;
  Technique technique = Technique::PreciseIFT;
  std::size_t trials = 0;
  std::size_t evaluated_trials = 0;
  std::size_t skipped_trials = 0;  // over budget
  std::size_t compared_bits = 0;   // evaluated trials x outputs
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::vector<std::size_t> false_positives_per_output;
  std::vector<std::size_t> false_negatives_per_output;
  std::vector<std::size_t> skipped;  // trial indices declined by the budget
  std::vector<OracleRow> rows;  // filled when requested

  double false_positive_rate() const {
    return compared_bits ? static_cast<double>(false_positives) / static_cast<double>(compared_bits) : 0.0;
  }
  double false_negative_rate() const {
    return compared_bits ? static_cast<double>(false_negatives) / static_cast<double>(compared_bits) : 0.0;
  }
};

/// Compares constructive output labels with the matching oracle over
/// `trials` seeded trials drawn exactly as run_trials() draws them.
FalsePositiveReport false_positive_report(const Circuit& c, Technique tech, const LabelProtocol& protocol,
                                          std::size_t trials, std::uint64_t seed, const OracleBudget& budget = {},
                                          bool keep_rows = false);

/// `circuit,technique,trial,output,constructive,oracle` rows.
std::string report_rows_csv(const FalsePositiveReport& report, const Circuit& c);
std::string report_json(const FalsePositiveReport& report, const Circuit& c);

}  // namespace gpa

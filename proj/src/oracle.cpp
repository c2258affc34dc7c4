#include "gpa/oracle.hpp"

#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

namespace gpa {

namespace {

// The oracles evaluate values with their own gate semantics so they stay
// independent of the rule library they are used to check.
Word apply(GateKind kind, const std::vector<Word>& nets, const std::vector<NetId>& fanin) {
  Word acc = nets[fanin[0]];
  for (std::size_t i = 1; i < fanin.size(); ++i) {
    const Word x = nets[fanin[i]];
    switch (kind) {
      case GateKind::And:
      case GateKind::Nand: acc &= x; break;
      case GateKind::Or:
      case GateKind::Nor: acc |= x; break;
      case GateKind::Xor:
      case GateKind::Xnor: acc ^= x; break;
      default: throw std::invalid_argument("unary gate with several inputs");
    }
  }
  switch (kind) {
    case GateKind::Nand:
    case GateKind::Nor:
    case GateKind::Xnor:
    case GateKind::Not: return ~acc;
    default: return acc;
  }
}

class WordEvaluator {
 public:
  explicit WordEvaluator(const Circuit& c)
      : c_(c),
        order_(c.has_topo() ? std::vector<GateId>(c.topo().begin(), c.topo().end()) : topo_order(c)),
        nets_(c.net_count(), 0) {}

  // input_words in Circuit::inputs() order; returns one word per output.
  std::vector<Word> run(const std::vector<Word>& input_words) {
    const auto inputs = c_.inputs();
    for (std::size_t i = 0; i < inputs.size(); ++i) nets_[inputs[i]] = input_words[i];
    for (GateId g : order_) {
      const Gate& gate = c_.gate(g);
      nets_[gate.fanout] = apply(gate.kind, nets_, gate.fanin);
    }
    std::vector<Word> out;
    out.reserve(c_.outputs().size());
    for (NetId o : c_.outputs()) out.push_back(nets_[o]);
    return out;
  }

 private:
  const Circuit& c_;
  std::vector<GateId> order_;
  std::vector<Word> nets_;
};

constexpr Word kAll = ~Word{0};
constexpr Word kLanePattern[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                  0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};

void check_sizes(const Circuit& c, const std::vector<bool>& values, const std::vector<bool>& subset) {
  if (values.size() != c.inputs().size() || subset.size() != c.inputs().size()) {
    throw std::invalid_argument("oracle vectors must have one entry per primary input");
  }
}

std::vector<std::size_t> members(const std::vector<bool>& subset) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i]) out.push_back(i);
  }
  return out;
}

bool within_budget(std::size_t k, const OracleBudget& budget) {
  if (k > budget.max_enumeration_bits || k >= 63) return false;
  return budget.max_vectors == 0 || (std::uint64_t{1} << k) <= budget.max_vectors;
}

// Marks outputs whose value differs from the reference for any assignment of
// the inputs in `vary`.
std::vector<bool> enumerate_changes(const Circuit& c, const std::vector<bool>& values,
                                    const std::vector<std::size_t>& vary) {
  WordEvaluator eval(c);
  std::vector<Word> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) words[i] = values[i] ? kAll : 0;
  const std::vector<Word> reference = eval.run(words);

  const std::size_t k = vary.size();
  const std::uint64_t total = std::uint64_t{1} << k;
  const std::uint64_t blocks = total <= 64 ? 1 : total / 64;
  const Word mask = total >= 64 ? kAll : ((Word{1} << total) - 1);

  std::vector<bool> changed(c.outputs().size(), false);
  std::size_t remaining = changed.size();
  for (std::uint64_t block = 0; block < blocks && remaining > 0; ++block) {
    for (std::size_t j = 0; j < k; ++j) {
      words[vary[j]] = j < 6 ? kLanePattern[j] : (((block >> (j - 6)) & 1U) ? kAll : 0);
    }
    const auto out = eval.run(words);
    for (std::size_t o = 0; o < out.size(); ++o) {
      if (!changed[o] && ((out[o] ^ reference[o]) & mask) != 0) {
        changed[o] = true;
        --remaining;
      }
    }
  }
  return changed;
}

}  // namespace

OracleOutputs ift_oracle(const Circuit& c, const std::vector<bool>& values, const std::vector<bool>& labeled,
                         const OracleBudget& budget) {
  check_sizes(c, values, labeled);
  auto vary = members(labeled);
  if (!within_budget(vary.size(), budget)) return std::nullopt;
  return enumerate_changes(c, values, vary);
}

std::vector<bool> fpa_oracle(const Circuit& c, const std::vector<bool>& values, const std::vector<bool>& faulty) {
  check_sizes(c, values, faulty);
  // Lane 0: fault-free, lane 1: every faulty input flipped.
  std::vector<Word> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Word v = values[i] ? 0b11 : 0b00;
    words[i] = faulty[i] ? (v ^ 0b10) : v;
  }
  WordEvaluator eval(c);
  const auto out = eval.run(words);
  std::vector<bool> result(out.size());
  for (std::size_t o = 0; o < out.size(); ++o) result[o] = ((out[o] ^ (out[o] >> 1)) & 1U) != 0;
  return result;
}

OracleOutputs xprop_oracle(const Circuit& c, const std::vector<bool>& values, const std::vector<bool>& x_inputs,
                           const OracleBudget& budget, XPropMode mode) {
  check_sizes(c, values, x_inputs);
  auto vary = members(x_inputs);
  if (mode == XPropMode::Existential) {
    // The given values are one of the enumerated assignments, so "two
    // assignments differ" is the same as "some assignment differs from it".
    if (!within_budget(vary.size(), budget)) return std::nullopt;
    return enumerate_changes(c, values, vary);
  }
  WordEvaluator eval(c);
  std::vector<Word> base(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) base[i] = values[i] ? kAll : 0;
  const auto reference = eval.run(base);
  std::vector<bool> changed(c.outputs().size(), false);
  // Lane j toggles X input vary[start + j].
  for (std::size_t start = 0; start < vary.size(); start += 64) {
    const std::size_t lanes = std::min<std::size_t>(64, vary.size() - start);
    auto words = base;
    for (std::size_t j = 0; j < lanes; ++j) words[vary[start + j]] ^= Word{1} << j;
    const Word mask = lanes >= 64 ? kAll : ((Word{1} << lanes) - 1);
    const auto out = eval.run(words);
    for (std::size_t o = 0; o < out.size(); ++o) {
      if (((out[o] ^ reference[o]) & mask) != 0) changed[o] = true;
    }
  }
  return changed;
}

OracleOutputs oracle_for(Technique tech, const Circuit& c, const std::vector<bool>& values,
                         const std::vector<bool>& labeled, const OracleBudget& budget) {
  switch (tech) {
    case Technique::ImpreciseIFT:
    case Technique::PreciseIFT: return ift_oracle(c, values, labeled, budget);
    case Technique::XProp: return xprop_oracle(c, values, labeled, budget);
    case Technique::ImpreciseFPA:
    case Technique::PreciseFPA: return fpa_oracle(c, values, labeled);
  }
  throw std::invalid_argument("unknown technique");
}

FalsePositiveReport false_positive_report(const Circuit& c, Technique tech, const LabelProtocol& protocol,
                                          std::size_t trials, std::uint64_t seed, const OracleBudget& budget,
                                          bool keep_rows) {
  FalsePositiveReport r;
  r.circuit = c.name();
  r.technique = tech;
  r.trials = trials;
  const std::size_t outputs = c.outputs().size();
  r.false_positives_per_output.assign(outputs, 0);
  r.false_negatives_per_output.assign(outputs, 0);
  if (trials == 0) return r;

  const Circuit binary = is_binarized(c) ? c : binarize(c);
  TrialBatch batch = load_trials(binary, protocol, seed, 0, trials);
  propagate_labels(binary, batch, tech);

  for (std::size_t t = 0; t < trials; ++t) {
    const TrialStimulus s = draw_stimulus(c.inputs().size(), protocol, seed, t);
    auto expected = oracle_for(tech, c, s.values, s.labeled, budget);
    if (!expected) {
      ++r.skipped_trials;
      r.skipped.push_back(t);
      continue;
    }
    ++r.evaluated_trials;
    for (std::size_t o = 0; o < outputs; ++o) {
      const bool constructive = batch.label(binary.outputs()[o], t);
      const bool oracle = (*expected)[o];
      ++r.compared_bits;
      if (constructive && !oracle) {
        ++r.false_positives;
        ++r.false_positives_per_output[o];
      } else if (!constructive && oracle) {
        ++r.false_negatives;
        ++r.false_negatives_per_output[o];
      }
      if (keep_rows) r.rows.push_back({t, o, constructive, oracle});
    }
  }
  return r;
}

std::string report_rows_csv(const FalsePositiveReport& report, const Circuit& c) {
  std::string out = "circuit,technique,trial,output,constructive,oracle\n";
  for (const auto& row : report.rows) {
    out += fmt::format("{},{},{},{},{},{}\n", report.circuit, technique_name(report.technique), row.trial,
                       c.net_name(c.outputs()[row.output]), row.constructive ? 1 : 0, row.oracle ? 1 : 0);
  }
  return out;
}

std::string report_json(const FalsePositiveReport& report, const Circuit& c) {
  nlohmann::ordered_json j;
  j["circuit"] = report.circuit;
  j["technique"] = technique_name(report.technique);
  j["trials"] = report.trials;
  j["evaluated_trials"] = report.evaluated_trials;
  j["skipped_trials"] = report.skipped_trials;
  j["compared_bits"] = report.compared_bits;
  j["false_positives"] = report.false_positives;
  j["false_negatives"] = report.false_negatives;
  j["false_positive_rate"] = report.false_positive_rate();
  j["false_negative_rate"] = report.false_negative_rate();
  j["skipped"] = report.skipped;
  auto per_output = nlohmann::ordered_json::array();
  for (std::size_t o = 0; o < c.outputs().size(); ++o) {
    per_output.push_back({{"output", c.net_name(c.outputs()[o])},
                          {"false_positives", report.false_positives_per_output[o]},
                          {"false_negatives", report.false_negatives_per_output[o]}});
  }
  j["outputs"] = std::move(per_output);
  if (!report.rows.empty()) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
      rows.push_back({{"trial", row.trial},
                      {"output", c.net_name(c.outputs()[row.output])},
                      {"constructive", row.constructive ? 1 : 0},
                      {"oracle", row.oracle ? 1 : 0}});
    }
    j["rows"] = std::move(rows);
  }
  return j.dump(2) + "\n";
}

}  // namespace gpa

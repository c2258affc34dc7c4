#include "gpa/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "gpa/rng.hpp"

namespace gpa {

TrialBatch::TrialBatch(std::size_t net_count, std::size_t trial_count, unsigned width, std::uint64_t seed)
    : net_count_(net_count),
      trial_count_(trial_count),
      width_(width),
      blocks_(0),
      seed_(seed) {
  if (width == 0 || width > 64) throw std::invalid_argument("batch width must be in [1, 64]");
  blocks_ = (trial_count + width - 1) / width;
  values_.assign(net_count * blocks_, 0);
  labels_.assign(net_count * blocks_, 0);
  value_ready_.assign(net_count, 0);
  label_ready_.assign(net_count, 0);
}

Word TrialBatch::lane_mask(std::size_t block) const {
  std::size_t lanes = std::min<std::size_t>(width_, trial_count_ - block * width_);
  return lanes >= 64 ? ~Word{0} : ((Word{1} << lanes) - 1);
}

std::span<Word> TrialBatch::values(NetId net) {
  value_ready_.at(net) = 1;
  return {&values_[net * blocks_], blocks_};
}

std::span<Word> TrialBatch::labels(NetId net) {
  label_ready_.at(net) = 1;
  return {&labels_[net * blocks_], blocks_};
}

bool TrialBatch::value(NetId net, std::size_t trial) const {
  return (values_[net * blocks_ + trial / width_] >> (trial % width_)) & 1U;
}

bool TrialBatch::label(NetId net, std::size_t trial) const {
  return (labels_[net * blocks_ + trial / width_] >> (trial % width_)) & 1U;
}

void TrialBatch::set_value(NetId net, std::size_t trial, bool v) {
  Word& w = values(net)[trial / width_];
  const Word bit = Word{1} << (trial % width_);
  w = v ? (w | bit) : (w & ~bit);
}

void TrialBatch::set_label(NetId net, std::size_t trial, bool l) {
  Word& w = labels(net)[trial / width_];
  const Word bit = Word{1} << (trial % width_);
  w = l ? (w | bit) : (w & ~bit);
}

namespace {

void require_inputs(const Circuit& c, const TrialBatch& batch, bool labels) {
  if (batch.net_count() != c.net_count()) throw std::invalid_argument("batch does not match circuit net count");
  for (NetId in : c.inputs()) {
    bool ready = labels ? batch.labels_ready(in) : batch.values_ready(in);
    if (!ready) {
      throw std::logic_error(
          fmt::format("{} plane of input '{}' is not initialized", labels ? "label" : "value", c.net_name(in)));
    }
  }
}

const std::vector<GateId>& order_of(const Circuit& c, std::vector<GateId>& storage) {
  if (!c.has_topo()) storage = topo_order(c);
  else storage.assign(c.topo().begin(), c.topo().end());
  return storage;
}

}  // namespace

void simulate_values(const Circuit& c, TrialBatch& batch) {
  require_inputs(c, batch, false);
  std::vector<GateId> storage;
  const auto& order = order_of(c, storage);
  const std::size_t blocks = batch.block_count();
  for (GateId g : order) {
    const Gate& gate = c.gate(g);
    auto out = batch.values(gate.fanout);
    auto first = batch.values(gate.fanin[0]);
    if (is_unary(gate.kind)) {
      for (std::size_t k = 0; k < blocks; ++k) out[k] = eval_word(gate.kind, first[k], 0);
      continue;
    }
    // n-ary: fold the base kind then complement once.
    const GateKind base = base_kind(gate.kind);
    for (std::size_t k = 0; k < blocks; ++k) out[k] = first[k];
    for (std::size_t i = 1; i < gate.fanin.size(); ++i) {
      auto in = batch.values(gate.fanin[i]);
      for (std::size_t k = 0; k < blocks; ++k) out[k] = eval_word(base, out[k], in[k]);
    }
    if (is_complemented(gate.kind)) {
      for (std::size_t k = 0; k < blocks; ++k) out[k] = ~out[k];
    }
  }
}

void propagate_labels(const Circuit& c, TrialBatch& batch, Technique tech) {
  if (!is_binarized(c)) {
    throw std::invalid_argument("label propagation requires a binarized circuit");
  }
  require_inputs(c, batch, true);
  simulate_values(c, batch);
  const int level = precision_level(tech);
  std::vector<GateId> storage;
  const auto& order = order_of(c, storage);
  const std::size_t blocks = batch.block_count();
  for (GateId g : order) {
    const Gate& gate = c.gate(g);
    auto out = batch.labels(gate.fanout);
    const NetId a = gate.fanin[0];
    const NetId b = is_unary(gate.kind) ? a : gate.fanin[1];
    auto av = batch.values(a);
    auto bv = batch.values(b);
    auto al = batch.labels(a);
    auto bl = batch.labels(b);
    for (std::size_t k = 0; k < blocks; ++k) out[k] = label_word(gate.kind, level, av[k], bv[k], al[k], bl[k]);
  }
}

namespace {

template <typename BitOf>
bool eval_gate(const Gate& gate, BitOf&& bit_of) {
  auto in = std::make_unique<bool[]>(gate.fanin.size());
  for (std::size_t i = 0; i < gate.fanin.size(); ++i) in[i] = bit_of(gate.fanin[i]);
  return gate_eval(gate.kind, std::span<const bool>(in.get(), gate.fanin.size()));
}

}  // namespace

std::vector<bool> evaluate_scalar(const Circuit& c, const std::vector<bool>& input_values) {
  if (input_values.size() != c.inputs().size()) throw std::invalid_argument("input vector size mismatch");
  std::vector<bool> v(c.net_count(), false);
  for (std::size_t i = 0; i < input_values.size(); ++i) v[c.inputs()[i]] = input_values[i];
  for (GateId g : topo_order(c)) {
    const Gate& gate = c.gate(g);
    v[gate.fanout] = eval_gate(gate, [&](NetId n) { return v[n]; });
  }
  return v;
}

std::vector<bool> propagate_scalar(const Circuit& c, const std::vector<bool>& input_values,
                                   const std::vector<bool>& input_labels, Technique tech) {
  if (input_labels.size() != c.inputs().size()) throw std::invalid_argument("label vector size mismatch");
  const auto v = evaluate_scalar(c, input_values);
  std::vector<bool> l(c.net_count(), false);
  for (std::size_t i = 0; i < input_labels.size(); ++i) l[c.inputs()[i]] = input_labels[i];
  const int level = precision_level(tech);
  for (GateId g : topo_order(c)) {
    const Gate& gate = c.gate(g);
    const NetId a = gate.fanin[0];
    if (is_unary(gate.kind)) {
      l[gate.fanout] = label_rule(gate.kind, tech, {v[a], l[a]});
    } else if (gate.fanin.size() == 2) {
      const NetId b = gate.fanin[1];
      l[gate.fanout] = label_rule(gate.kind, tech, {v[a], l[a]}, {v[b], l[b]});
    } else if (level == 0) {
      bool any = false;
      for (NetId in : gate.fanin) any = any || l[in];
      l[gate.fanout] = any;
    } else if (level == 2) {
      l[gate.fanout] = eval_gate(gate, [&](NetId n) { return bool(v[n]); }) !=
                       eval_gate(gate, [&](NetId n) { return v[n] != l[n]; });
    } else {
      throw std::invalid_argument("level-1 rules are defined for 2-input gates only");
    }
  }
  return l;
}

TrialStimulus draw_stimulus(std::size_t input_count, const LabelProtocol& protocol, std::uint64_t seed,
                            std::uint64_t trial) {
  if (!(protocol.fraction >= 0.0 && protocol.fraction <= 1.0)) {
    throw std::invalid_argument(fmt::format("label fraction {} outside [0, 1]", protocol.fraction));
  }
  Substream rng(seed, trial);
  TrialStimulus s;
  s.values.resize(input_count);
  s.labeled.assign(input_count, false);
  for (std::size_t i = 0; i < input_count; ++i) s.values[i] = rng.bit();
  if (protocol.selection == LabelProtocol::Selection::ExactCount) {
    const auto k = static_cast<std::size_t>(std::lround(protocol.fraction * static_cast<double>(input_count)));
    std::vector<std::size_t> idx(input_count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t r = j + rng.below(input_count - j);
      std::swap(idx[j], idx[r]);
      s.labeled[idx[j]] = true;
    }
  } else {
    for (std::size_t i = 0; i < input_count; ++i) s.labeled[i] = rng.unit() < protocol.fraction;
  }
  return s;
}

TrialBatch load_trials(const Circuit& c, const LabelProtocol& protocol, std::uint64_t seed, std::uint64_t first,
                       std::size_t count, unsigned width) {
  TrialBatch batch(c.net_count(), count, width, seed);
  const auto inputs = c.inputs();
  for (NetId in : inputs) {
    batch.values(in);
    batch.labels(in);
  }
  for (std::size_t t = 0; t < count; ++t) {
    TrialStimulus s = draw_stimulus(inputs.size(), protocol, seed, first + t);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (s.values[i]) batch.set_value(inputs[i], t, true);
      if (s.labeled[i]) batch.set_label(inputs[i], t, true);
    }
  }
  return batch;
}

std::vector<double> trial_metrics(const Circuit& c, const TrialBatch& batch, LabelProtocol::Metric metric) {
  const std::size_t trials = batch.trial_count();
  std::vector<std::uint32_t> hits(trials, 0);
  for (NetId o : c.outputs()) {
    for (std::size_t t = 0; t < trials; ++t) hits[t] += batch.label(o, t) ? 1U : 0U;
  }
  std::vector<double> out(trials);
  const auto outputs = static_cast<double>(c.outputs().size());
  for (std::size_t t = 0; t < trials; ++t) {
    if (metric == LabelProtocol::Metric::AnyOutputLabeled) {
      out[t] = hits[t] > 0 ? 1.0 : 0.0;
    } else {
      out[t] = outputs > 0 ? hits[t] / outputs : 0.0;
    }
  }
  return out;
}

std::vector<double> run_trials(const Circuit& c, Technique tech, const LabelProtocol& protocol, std::size_t trials,
                               std::uint64_t seed, const RunOptions& options) {
  if (trials == 0) throw std::invalid_argument("at least one trial is required");
  if (c.inputs().empty()) throw std::invalid_argument("circuit has no primary inputs");
  if (!(protocol.fraction >= 0.0 && protocol.fraction <= 1.0)) {
    throw std::invalid_argument(fmt::format("label fraction {} outside [0, 1]", protocol.fraction));
  }
  const Circuit* circuit = &c;
  std::optional<Circuit> binary;
  if (!is_binarized(c)) {
    binary = binarize(c);
    circuit = &*binary;
  }

  std::vector<double> result(trials);
  const std::size_t chunk = std::size_t{options.width} * 64;
  const std::size_t chunks = (trials + chunk - 1) / chunk;
  auto work = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t k = worker; k < chunks; k += stride) {
      const std::size_t first = k * chunk;
      const std::size_t count = std::min(chunk, trials - first);
      TrialBatch batch = load_trials(*circuit, protocol, seed, first, count, options.width);
      propagate_labels(*circuit, batch, tech);
      auto metrics = trial_metrics(*circuit, batch, protocol.metric);
      std::copy(metrics.begin(), metrics.end(), result.begin() + static_cast<std::ptrdiff_t>(first));
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, chunks);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  return result;
}

void write_trace_csv(const Circuit& c, const TrialBatch& batch, std::ostream& out) {
  out << "trial,net,value,label\n";
  for (std::size_t t = 0; t < batch.trial_count(); ++t) {
    for (NetId n = 0; n < c.net_count(); ++n) {
      out << t << ',' << c.net_name(n) << ',' << batch.value(n, t) << ',' << batch.label(n, t) << '\n';
    }
  }
}

}  // namespace gpa

#include "gpa/instrument.hpp"

#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

namespace gpa {

namespace {

class Instrumenter {
 public:
  Instrumenter(const Circuit& source, Technique tech, InstrumentMode mode)
      : src_(source), level_(precision_level(tech)), mode_(mode), builder_(source.name()) {
    for (const auto& name : src_.net_names()) taken_.insert(name);
    const std::size_t n = src_.net_count();
    label_.assign(n, kNoNet);
    label_names_.resize(n);
    value_.assign(n, kNoNet);
    complement_.assign(n, kNoNet);
    flipped_.assign(n, kNoNet);
  }

  InstrumentedCircuit run(Technique tech) {
    InstrumentedCircuit ic{Circuit::Builder(src_.name()).build(), tech, mode_, {}, {}, {}, {}, 0, 0};

    // Ports: value inputs, label inputs, then value outputs and label outputs.
    if (mode_ == InstrumentMode::Combined) {
      for (NetId in : src_.inputs()) {
        value_[in] = builder_.add_input(src_.net_name(in));
        ic.value_inputs.push_back(value_[in]);
      }
    } else {
      for (NetId id : shadow_reads()) ic.value_inputs.push_back(value_net(id));
    }
    for (NetId in : src_.inputs()) {
      allocate_label(in);
      ic.label_inputs.push_back(builder_.add_input(label_names_[in]));
    }
    for (NetId o : src_.outputs()) allocate_label(o);
    for (GateId g : src_.topo()) allocate_label(src_.gate(g).fanout);

    if (mode_ == InstrumentMode::Combined) {
      for (GateId g : src_.topo()) {
        const Gate& gate = src_.gate(g);
        std::vector<NetId> fanin;
        fanin.reserve(gate.fanin.size());
        for (NetId in : gate.fanin) fanin.push_back(value_net(in));
        builder_.add_gate(gate.kind, fanin, value_net(gate.fanout));
      }
    }

    if (level_ == 2) {
      for (NetId in : src_.inputs()) {
        flipped_[in] = fresh(src_.net_name(in) + "__f");
        shadow(GateKind::Xor, {value_net(in), label_[in]}, flipped_[in]);
      }
    }
    for (GateId g : src_.topo()) emit_gate(src_.gate(g));

    if (mode_ == InstrumentMode::Combined) {
      for (NetId o : src_.outputs()) builder_.add_output(value_net(o));
    }
    for (NetId o : src_.outputs()) {
      builder_.add_output(label_[o]);
      ic.label_outputs.push_back(label_[o]);
    }

    ic.circuit = std::move(builder_).build();
    ic.origin_map = std::move(label_);
    ic.source_gate_count = src_.gate_count();
    ic.shadow_gate_count = shadow_gates_;
    return ic;
  }

 private:
  std::string allocate(const std::string& desired) {
    if (taken_.insert(desired).second) return desired;
    for (unsigned k = 1;; ++k) {
      std::string candidate = fmt::format("{}_{}", desired, k);
      if (taken_.insert(candidate).second) return candidate;
    }
  }

  void allocate_label(NetId src) {
    if (!label_names_[src].empty()) return;
    label_names_[src] = allocate(src_.net_name(src) + "__l");
    if (label_[src] == kNoNet) label_[src] = builder_.net(label_names_[src]);
  }

  NetId fresh(const std::string& desired) { return builder_.net(allocate(desired)); }

  // Value nets keep their source names; in shadow-only mode they are inputs.
  NetId value_net(NetId src) {
    if (value_[src] == kNoNet) {
      value_[src] = mode_ == InstrumentMode::ShadowOnly ? builder_.add_input(src_.net_name(src))
                                                        : builder_.net(src_.net_name(src));
    }
    return value_[src];
  }

  NetId complement(NetId src) {
    if (complement_[src] == kNoNet) {
      complement_[src] = fresh(src_.net_name(src) + "__n");
      shadow(GateKind::Not, {value_net(src)}, complement_[src]);
    }
    return complement_[src];
  }

  void shadow(GateKind kind, std::initializer_list<NetId> fanin, NetId out) {
    builder_.add_gate(kind, fanin, out);
    ++shadow_gates_;
  }

  // Value nets the shadow logic reads, primary inputs first.
  std::vector<NetId> shadow_reads() const {
    std::vector<bool> read(src_.net_count(), false);
    for (const Gate& g : src_.gates()) {
      if (level_ == 1 && !is_unary(g.kind) && base_kind(g.kind) != GateKind::Xor) {
        for (NetId in : g.fanin) read[in] = true;
      }
      if (level_ == 2) read[g.fanout] = true;
    }
    if (level_ == 2) {
      for (NetId in : src_.inputs()) read[in] = true;
    }
    std::vector<NetId> out;
    for (NetId in : src_.inputs()) {
      if (read[in]) {
        out.push_back(in);
        read[in] = false;
      }
    }
    for (NetId id = 0; id < src_.net_count(); ++id) {
      if (read[id]) out.push_back(id);
    }
    return out;
  }

  void emit_gate(const Gate& gate) {
    const NetId out = label_[gate.fanout];
    const NetId a = gate.fanin[0];
    if (level_ == 2) {
      // Flipped copy of the gate; the label is the difference to the value.
      std::vector<NetId> fanin;
      fanin.reserve(gate.fanin.size());
      for (NetId in : gate.fanin) fanin.push_back(flipped_[in]);
      flipped_[gate.fanout] = fresh(src_.net_name(gate.fanout) + "__f");
      builder_.add_gate(gate.kind, fanin, flipped_[gate.fanout]);
      ++shadow_gates_;
      shadow(GateKind::Xor, {value_net(gate.fanout), flipped_[gate.fanout]}, out);
      return;
    }
    if (is_unary(gate.kind)) {
      shadow(GateKind::Buf, {label_[a]}, out);
      return;
    }
    const NetId b = gate.fanin[1];
    const GateKind family = base_kind(gate.kind);
    if (level_ == 0 || family == GateKind::Xor) {
      shadow(GateKind::Or, {label_[a], label_[b]}, out);
      return;
    }
    const std::string& name = label_names_[gate.fanout];
    unsigned k = 0;
    auto temp = [&] { return fresh(fmt::format("{}_t{}", name, k++)); };
    const bool and_family = family == GateKind::And;
    const NetId va = and_family ? value_net(a) : complement(a);
    const NetId vb = and_family ? value_net(b) : complement(b);
    const NetId t0 = temp();
    const NetId t1 = temp();
    const NetId t2 = temp();
    const NetId t3 = temp();
    shadow(GateKind::And, {va, label_[b]}, t0);
    shadow(GateKind::And, {vb, label_[a]}, t1);
    shadow(GateKind::And, {label_[a], label_[b]}, t2);
    shadow(GateKind::Or, {t0, t1}, t3);
    shadow(GateKind::Or, {t3, t2}, out);
  }

  const Circuit& src_;
  int level_;
  InstrumentMode mode_;
  Circuit::Builder builder_;
  std::unordered_set<std::string> taken_;
  std::vector<NetId> label_;
  std::vector<std::string> label_names_;
  std::vector<NetId> value_;
  std::vector<NetId> complement_;
  std::vector<NetId> flipped_;
  std::size_t shadow_gates_ = 0;
};

}  // namespace

InstrumentedCircuit instrument(const Circuit& c, Technique tech, InstrumentMode mode) {
  if (has_errors(validate(c))) throw NetlistError("cannot instrument an invalid circuit");
  if (!is_binarized(c)) {
    const Circuit binary = binarize(c);
    return Instrumenter(binary, tech, mode).run(tech);
  }
  return Instrumenter(c, tech, mode).run(tech);
}

std::string emit(const InstrumentedCircuit& ic, NetlistFormat format) {
  const std::string header =
      fmt::format("propagation logic: {} (precision level {}), {} shadow gates for {} source gates",
                  technique_name(ic.technique), precision_level(ic.technique), ic.shadow_gate_count,
                  ic.source_gate_count);
  return format == NetlistFormat::Bench ? write_bench(ic.circuit, header) : write_verilog(ic.circuit, header);
}

}  // namespace gpa

#pragma once

#include <string>
#include <vector>

#include "gpa/netlist.hpp"
#include "gpa/rules.hpp"

namespace gpa {

enum class InstrumentMode {
  /// Value logic plus shadow logic in one netlist; the shadow reads the
  /// original value nets.
  Combined,
  /// Shadow logic only; every value net it reads becomes an extra input named
  /// after the original net, for attaching to an existing design.
  ShadowOnly,
};

/// Synthesizable propagation logic for a circuit.
///
/// Port naming (part of the file format contract):
///   value inputs   `<pi>`            (shadow-only: every value net read)
///   label inputs   `<pi>__l`         one per original primary input
///   value outputs  `<po>`            combined mode only
///   label outputs  `<po>__l`         one per original primary output
/// If `<net>__l` already names another net, `_1`, `_2`, ... is appended until
/// unique. Internal shadow nets: `<net>__l_t<k>` (rule temporaries), `<net>__n`
/// (value complements), `<net>__f` (flipped copy for precision level 2).
///
/// Shadow gates per 2-input source gate: level 0 one OR; level 1 five for the
/// AND family, five plus at most two shared NOTs for the OR family, one OR for
/// the XOR family; level 2 two (flipped copy plus XOR) and one XOR per primary
/// input. NOT/BUF contribute one BUF at levels 0 and 1.
struct InstrumentedCircuit {
  Circuit circuit;
  Technique technique = Technique::PreciseIFT;
  InstrumentMode mode = InstrumentMode::Combined;
  std::vector<NetId> value_inputs;
  std::vector<NetId> label_inputs;
  std::vector<NetId> label_outputs;
  /// Label net in `circuit` for every net of the binarized source circuit
  /// (original net ids are preserved by binarize()).
  std::vector<NetId> origin_map;
  std::size_t source_gate_count = 0;  // after binarization
  std::size_t shadow_gate_count = 0;
};

/// Builds the propagation logic for `c`; binarizes first when needed.
InstrumentedCircuit instrument(const Circuit& c, Technique tech, InstrumentMode mode = InstrumentMode::Combined);

enum class NetlistFormat { Bench, Verilog };

std::string emit(const InstrumentedCircuit& ic, NetlistFormat format);

}  // namespace gpa

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "gpa/netlist.hpp"

namespace gpa {

/// Propagation technique. The interpretation of a label bit is technique
/// specific (taint, non-determinism, fault) but the rules only depend on the
/// precision level.
enum class Technique : std::uint8_t { ImpreciseIFT, PreciseIFT, XProp, ImpreciseFPA, PreciseFPA };

inline constexpr Technique kAllTechniques[] = {Technique::ImpreciseIFT, Technique::PreciseIFT, Technique::XProp,
                                               Technique::ImpreciseFPA, Technique::PreciseFPA};

/// 0: value-blind, 1: value-aware per gate, 2: exact per gate (fault masking).
constexpr int precision_level(Technique t) {
  switch (t) {
    case Technique::ImpreciseIFT: return 0;
    case Technique::PreciseIFT:
    case Technique::XProp:
    case Technique::ImpreciseFPA: return 1;
    case Technique::PreciseFPA: return 2;
  }
  return 0;
}

/// CLI spelling: imprecise-ift, precise-ift, xprop, imprecise-fpa, precise-fpa.
std::string_view technique_name(Technique t);
std::optional<Technique> technique_from_name(std::string_view name);

struct LabeledBit {
  bool value = false;
  bool label = false;
};

/// Boolean semantics of `kind`. Throws std::invalid_argument on arity mismatch.
bool gate_eval(GateKind kind, std::span<const bool> values);
bool gate_eval(GateKind kind, bool a, bool b);

/// Output label of a single gate. For NOT/BUF only the first slot is read.
///
///   level 0  O = a_l | b_l
///   level 1  AND family  O = a.b_l | b.a_l | a_l.b_l
///            OR family   O = !a.b_l | !b.a_l | a_l.b_l
///            XOR family  O = a_l | b_l
///   level 2  O = g(a, b) ^ g(a ^ a_l, b ^ b_l)
///
/// NAND/NOR/XNOR share the rule of their base kind at every level.
bool label_rule(GateKind kind, Technique tech, LabeledBit a, LabeledBit b = {});

// Word-parallel forms used by the simulator: bit i of every word is trial i.
using Word = std::uint64_t;

Word eval_word(GateKind kind, Word a, Word b);
Word label_word(GateKind kind, int level, Word a, Word b, Word al, Word bl);

struct TruthRow {
  bool a = false;
  bool b = false;
  bool a_label = false;
  bool b_label = false;
  bool out_label = false;
};

/// All 16 (a, b, a_l, b_l) rows, a as the most significant bit of the row
/// index and b_l as the least significant.
std::array<TruthRow, 16> rule_truth_table(GateKind kind, Technique tech);

}  // namespace gpa

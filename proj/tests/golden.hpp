#pragma once

#include "gpa/netlist.hpp"

// Reference truth-table rows and per-gate oracles shared by the unit tests and
// the acceptance suite. The oracles use their own gate semantics.
namespace gpa::golden {

inline bool eval2(GateKind kind, bool a, bool b) {
  switch (kind) {
    case GateKind::And: return a && b;
    case GateKind::Nand: return !(a && b);
    case GateKind::Or: return a || b;
    case GateKind::Nor: return !(a || b);
    case GateKind::Xor: return a != b;
    case GateKind::Xnor: return a == b;
    case GateKind::Not: return !a;
    case GateKind::Buf: return a;
  }
  return false;
}

/// Labeled iff some assignment to the labeled inputs (the others held at
/// their values) changes the output.
inline bool flow_oracle(GateKind kind, bool a, bool b, bool al, bool bl) {
  const bool ref = eval2(kind, a, b);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const bool aa = al ? x != 0 : a;
      const bool bb = bl ? y != 0 : b;
      if (eval2(kind, aa, bb) != ref) return true;
    }
  }
  return false;
}

/// Faulty iff flipping every faulty input changes the output.
inline bool fault_oracle(GateKind kind, bool a, bool b, bool af, bool bf) {
  return eval2(kind, a, b) != eval2(kind, a != af, b != bf);
}

/// Label-propagation rows for 2-input AND, OR and XOR at value-aware
/// precision. `a`/`b` of -1 means the row holds for either value.
struct LabelRow {
  int line;
  int a;
  int b;
  bool al;
  bool bl;
  bool and_l;
  bool or_l;
  bool xor_l;
};

inline constexpr LabelRow kLabelRows[] = {
    {1, -1, -1, true, true, true, true, true},
    {2, -1, -1, false, false, false, false, false},
    {3, 0, 0, false, true, false, true, true},
    {4, 0, 1, true, false, true, false, true},
};

/// Fault rows: gate outputs evaluated with the faulty inputs flipped. The
/// fault label is the XOR with the fault-free output.
struct FaultRow {
  int line;
  bool a;
  bool b;
  bool af;
  bool bf;
  bool and_o;
  bool or_o;
  bool xor_o;
};

inline constexpr FaultRow kFaultRows[] = {
    {1, false, false, false, false, false, false, false}, {2, false, false, false, true, false, true, true},
    {3, false, false, true, true, true, true, false},      {4, false, true, false, false, false, true, true},
    {5, false, true, true, false, true, true, false},      {6, false, true, true, true, false, true, true},
    {7, true, true, false, false, true, true, false},      {8, true, true, false, true, false, true, true},
    {9, true, true, true, true, false, false, false},
};

}  // namespace gpa::golden

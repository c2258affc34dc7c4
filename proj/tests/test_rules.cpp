#include <doctest.h>

#include "golden.hpp"
#include "gpa/rules.hpp"

using namespace gpa;
using golden::eval2;

namespace {

constexpr Technique kLevel1[] = {Technique::PreciseIFT, Technique::XProp, Technique::ImpreciseFPA};

struct Combo {
  bool a, b, al, bl;
};

std::vector<Combo> all_combos() {
  std::vector<Combo> out;
  for (int i = 0; i < 16; ++i) out.push_back({(i & 8) != 0, (i & 4) != 0, (i & 2) != 0, (i & 1) != 0});
  return out;
}

bool rule(GateKind k, Technique t, const Combo& c) { return label_rule(k, t, {c.a, c.al}, {c.b, c.bl}); }

}  // namespace

TEST_CASE("gate_eval") {
  CHECK(gate_eval(GateKind::And, true, true));
  CHECK_FALSE(gate_eval(GateKind::Nand, true, true));
  CHECK(gate_eval(GateKind::Xor, true, false));
  for (GateKind k : kBinaryGateKinds) {
    for (int i = 0; i < 4; ++i) CHECK(gate_eval(k, (i & 2) != 0, (i & 1) != 0) == eval2(k, (i & 2) != 0, (i & 1) != 0));
  }
  const bool three[] = {true, true, false};
  CHECK_FALSE(gate_eval(GateKind::And, three));
  CHECK(gate_eval(GateKind::Xnor, three));
  CHECK(gate_eval(GateKind::Xor, std::span<const bool>(three, 2)) == false);
  const bool one[] = {true};
  CHECK_FALSE(gate_eval(GateKind::Not, one));
  CHECK_THROWS_AS(gate_eval(GateKind::Not, std::span<const bool>(three, 2)), std::invalid_argument);
  CHECK_THROWS_AS(gate_eval(GateKind::And, one), std::invalid_argument);
}

TEST_CASE("techniques and precision levels") {
  CHECK(precision_level(Technique::ImpreciseIFT) == 0);
  CHECK(precision_level(Technique::PreciseIFT) == 1);
  CHECK(precision_level(Technique::XProp) == 1);
  CHECK(precision_level(Technique::ImpreciseFPA) == 1);
  CHECK(precision_level(Technique::PreciseFPA) == 2);
  for (Technique t : kAllTechniques) CHECK(technique_from_name(technique_name(t)) == t);
  CHECK_FALSE(technique_from_name("glift").has_value());
}

TEST_CASE("level 1 matches the per-gate flow oracle on all 16 rows") {
  for (GateKind k : kBinaryGateKinds) {
    for (Technique t : kLevel1) {
      for (const Combo& c : all_combos()) {
        CAPTURE(bench_name(k));
        CAPTURE(c.a);
        CAPTURE(c.b);
        CAPTURE(c.al);
        CAPTURE(c.bl);
        CHECK(rule(k, t, c) == golden::flow_oracle(k, c.a, c.b, c.al, c.bl));
      }
    }
  }
}

TEST_CASE("level 2 matches the differential identity on all 16 rows") {
  for (GateKind k : kBinaryGateKinds) {
    for (const Combo& c : all_combos()) {
      CHECK(rule(k, Technique::PreciseFPA, c) == golden::fault_oracle(k, c.a, c.b, c.al, c.bl));
    }
  }
}

TEST_CASE("reference label-propagation rows") {
  for (const auto& row : golden::kLabelRows) {
    CAPTURE(row.line);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if ((row.a >= 0 && row.a != a) || (row.b >= 0 && row.b != b)) continue;
        const Combo c{a != 0, b != 0, row.al, row.bl};
        for (Technique t : kLevel1) {
          CHECK(rule(GateKind::And, t, c) == row.and_l);
          CHECK(rule(GateKind::Or, t, c) == row.or_l);
          CHECK(rule(GateKind::Xor, t, c) == row.xor_l);
        }
      }
    }
  }
}

TEST_CASE("reference fault rows") {
  for (const auto& row : golden::kFaultRows) {
    CAPTURE(row.line);
    const Combo c{row.a, row.b, row.af, row.bf};
    CHECK(rule(GateKind::And, Technique::PreciseFPA, c) == (row.and_o != eval2(GateKind::And, row.a, row.b)));
    CHECK(rule(GateKind::Or, Technique::PreciseFPA, c) == (row.or_o != eval2(GateKind::Or, row.a, row.b)));
    CHECK(rule(GateKind::Xor, Technique::PreciseFPA, c) == (row.xor_o != eval2(GateKind::Xor, row.a, row.b)));
  }
}

TEST_CASE("documented single-gate examples") {
  CHECK(rule(GateKind::And, Technique::PreciseIFT, {false, false, true, true}));
  CHECK(rule(GateKind::And, Technique::PreciseIFT, {true, true, true, true}));
  CHECK_FALSE(rule(GateKind::And, Technique::PreciseIFT, {false, false, false, true}));
  CHECK_FALSE(rule(GateKind::Or, Technique::PreciseIFT, {false, true, true, false}));
  CHECK_FALSE(rule(GateKind::And, Technique::PreciseFPA, {false, true, true, true}));  // masked
  for (int v = 0; v < 4; ++v) {
    CHECK_FALSE(rule(GateKind::Xor, Technique::PreciseFPA, {(v & 2) != 0, (v & 1) != 0, true, true}));
  }
  for (GateKind k : kBinaryGateKinds) {
    for (int v = 0; v < 4; ++v) CHECK_FALSE(rule(k, Technique::ImpreciseIFT, {(v & 2) != 0, (v & 1) != 0, false, false}));
  }
}

TEST_CASE("OR rule propagates a single labeled input when the other is 0") {
  // a=1, b=0, only a labeled: flipping a changes OR(a, b), so the label must
  // propagate. The form with !b.b_l in place of !b.a_l would miss it.
  const Combo c{true, false, true, false};
  CHECK(golden::flow_oracle(GateKind::Or, c.a, c.b, c.al, c.bl));
  CHECK(rule(GateKind::Or, Technique::PreciseIFT, c));
  const bool misprinted = (!c.a && c.bl) || (!c.b && c.bl) || (c.al && c.bl);
  CHECK_FALSE(misprinted);
}

TEST_CASE("level-2 closed form for AND agrees with the differential rule") {
  for (const Combo& c : all_combos()) {
    const bool closed = (c.a && c.bl && !c.al) || (c.b && c.al && !c.bl) || (c.a == c.b && c.al && c.bl);
    CHECK(rule(GateKind::And, Technique::PreciseFPA, c) == closed);
  }
  // Gating the whole level-1 sum by !(a ^ b) loses the single-fault row
  // a=0, b=1, a_f=1, b_f=0, whose output does change.
  const Combo single{false, true, true, false};
  const bool gated = ((single.a && single.bl) || (single.b && single.al) || (single.al && single.bl)) &&
                     single.a == single.b;
  CHECK_FALSE(gated);
  CHECK(rule(GateKind::And, Technique::PreciseFPA, single));
}

TEST_CASE("rule_truth_table") {
  const auto and1 = rule_truth_table(GateKind::And, Technique::PreciseIFT);
  for (int i = 0; i < 16; ++i) {
    CHECK(and1[i].a == ((i & 8) != 0));
    CHECK(and1[i].b == ((i & 4) != 0));
    CHECK(and1[i].a_label == ((i & 2) != 0));
    CHECK(and1[i].b_label == ((i & 1) != 0));
    if (!and1[i].a_label && !and1[i].b_label) CHECK_FALSE(and1[i].out_label);
  }
  const auto and2 = rule_truth_table(GateKind::And, Technique::PreciseFPA);
  CHECK(std::count_if(and2.begin(), and2.end(), [](const TruthRow& r) { return r.out_label; }) == 6);
  const auto xor1 = rule_truth_table(GateKind::Xor, Technique::PreciseIFT);
  for (const auto& r : xor1) CHECK(r.out_label == (r.a_label || r.b_label));
  CHECK_THROWS_AS(rule_truth_table(GateKind::Not, Technique::PreciseIFT), std::invalid_argument);
}

TEST_CASE("complemented kinds share the base rule") {
  for (Technique t : kAllTechniques) {
    for (GateKind k : {GateKind::Nand, GateKind::Nor, GateKind::Xnor}) {
      for (const Combo& c : all_combos()) CHECK(rule(k, t, c) == rule(base_kind(k), t, c));
    }
  }
}

TEST_CASE("techniques of equal level share rules") {
  for (GateKind k : kAllGateKinds) {
    for (const Combo& c : all_combos()) {
      CHECK(rule(k, Technique::PreciseIFT, c) == rule(k, Technique::XProp, c));
      CHECK(rule(k, Technique::PreciseIFT, c) == rule(k, Technique::ImpreciseFPA, c));
    }
  }
}

TEST_CASE("dominance and level-0 value independence") {
  for (GateKind k : kAllGateKinds) {
    for (const Combo& c : all_combos()) {
      const bool l0 = rule(k, Technique::ImpreciseIFT, c);
      const bool l1 = rule(k, Technique::PreciseIFT, c);
      const bool l2 = rule(k, Technique::PreciseFPA, c);
      CHECK(l0 >= l1);
      CHECK(l1 >= l2);
      const bool expect0 = is_unary(k) ? c.al : (c.al || c.bl);
      CHECK(l0 == expect0);
    }
  }
}

TEST_CASE("NOT and BUF pass the label through at every level") {
  for (GateKind k : {GateKind::Not, GateKind::Buf}) {
    for (Technique t : kAllTechniques) {
      for (int i = 0; i < 4; ++i) {
        const bool v = (i & 2) != 0;
        const bool l = (i & 1) != 0;
        CHECK(label_rule(k, t, {v, l}) == l);
        CHECK(label_rule(k, t, {v, l}, {true, true}) == l);
      }
    }
  }
}

TEST_CASE("word-parallel forms agree with the scalar rules") {
  // Lane i holds combo i.
  Word a = 0, b = 0, al = 0, bl = 0;
  for (int i = 0; i < 16; ++i) {
    if (i & 8) a |= Word{1} << i;
    if (i & 4) b |= Word{1} << i;
    if (i & 2) al |= Word{1} << i;
    if (i & 1) bl |= Word{1} << i;
  }
  for (GateKind k : kAllGateKinds) {
    const Word v = eval_word(k, a, b);
    for (int i = 0; i < 16; ++i) {
      const bool ai = (i & 8) != 0, bi = (i & 4) != 0;
      CHECK(((v >> i) & 1U) == static_cast<Word>(is_unary(k) ? eval2(k, ai, false) : eval2(k, ai, bi)));
    }
    for (Technique t : kAllTechniques) {
      const Word l = label_word(k, precision_level(t), a, b, al, bl);
      for (int i = 0; i < 16; ++i) {
        const Combo c{(i & 8) != 0, (i & 4) != 0, (i & 2) != 0, (i & 1) != 0};
        CHECK(((l >> i) & 1U) == static_cast<Word>(rule(k, t, c)));
      }
    }
  }
}

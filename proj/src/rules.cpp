#include "gpa/rules.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace gpa {

std::string_view technique_name(Technique t) {
  switch (t) {
    case Technique::ImpreciseIFT: return "imprecise-ift";
    case Technique::PreciseIFT: return "precise-ift";
    case Technique::XProp: return "xprop";
    case Technique::ImpreciseFPA: return "imprecise-fpa";
    case Technique::PreciseFPA: return "precise-fpa";
  }
  return "?";
}

std::optional<Technique> technique_from_name(std::string_view name) {
  for (Technique t : kAllTechniques) {
    if (technique_name(t) == name) return t;
  }
  return std::nullopt;
}

Word eval_word(GateKind kind, Word a, Word b) {
  switch (kind) {
    case GateKind::And: return a & b;
    case GateKind::Nand: return ~(a & b);
    case GateKind::Or: return a | b;
    case GateKind::Nor: return ~(a | b);
    case GateKind::Xor: return a ^ b;
    case GateKind::Xnor: return ~(a ^ b);
    case GateKind::Not: return ~a;
    case GateKind::Buf: return a;
  }
  return 0;
}

Word label_word(GateKind kind, int level, Word a, Word b, Word al, Word bl) {
  if (is_unary(kind)) return al;
  switch (level) {
    case 0: return al | bl;
    case 1:
      switch (base_kind(kind)) {
        case GateKind::And: return (a & bl) | (b & al) | (al & bl);
        case GateKind::Or: return (~a & bl) | (~b & al) | (al & bl);
        case GateKind::Xor: return al | bl;
        default: break;
      }
      break;
    case 2: return eval_word(kind, a, b) ^ eval_word(kind, a ^ al, b ^ bl);
    default: break;
  }
  throw std::invalid_argument(fmt::format("no label rule for {} at level {}", bench_name(kind), level));
}

bool gate_eval(GateKind kind, std::span<const bool> values) {
  const std::size_t n = values.size();
  if (is_unary(kind) ? n != 1 : n < 2) {
    throw std::invalid_argument(fmt::format("{} cannot take {} inputs", bench_name(kind), n));
  }
  bool acc = values[0];
  switch (base_kind(kind)) {
    case GateKind::And:
      for (std::size_t i = 1; i < n; ++i) acc = acc && values[i];
      break;
    case GateKind::Or:
      for (std::size_t i = 1; i < n; ++i) acc = acc || values[i];
      break;
    case GateKind::Xor:
      for (std::size_t i = 1; i < n; ++i) acc = acc != values[i];
      break;
    default: break;
  }
  return is_complemented(kind) ? !acc : acc;
}

bool gate_eval(GateKind kind, bool a, bool b) {
  if (is_unary(kind)) {
    const bool v[] = {a};
    return gate_eval(kind, v);
  }
  const bool v[] = {a, b};
  return gate_eval(kind, v);
}

bool label_rule(GateKind kind, Technique tech, LabeledBit a, LabeledBit b) {
  auto bit = [](bool x) -> Word { return x ? ~Word{0} : Word{0}; };
  return (label_word(kind, precision_level(tech), bit(a.value), bit(b.value), bit(a.label), bit(b.label)) & 1U) != 0;
}

std::array<TruthRow, 16> rule_truth_table(GateKind kind, Technique tech) {
  if (is_unary(kind)) {
    throw std::invalid_argument(fmt::format("{} is not a 2-input kind", bench_name(kind)));
  }
  std::array<TruthRow, 16> rows{};
  for (unsigned i = 0; i < 16; ++i) {
    TruthRow& r = rows[i];
    r.a = (i >> 3) & 1U;
    r.b = (i >> 2) & 1U;
    r.a_label = (i >> 1) & 1U;
    r.b_label = i & 1U;
    r.out_label = label_rule(kind, tech, {r.a, r.a_label}, {r.b, r.b_label});
  }
  return rows;
}

}  // namespace gpa

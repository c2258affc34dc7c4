#include "gpa/netlist.hpp"

#include <fmt/format.h>

namespace gpa {

bool is_binarized(const Circuit& c) {
  for (const Gate& g : c.gates()) {
    if (g.fanin.size() != (is_unary(g.kind) ? 1U : 2U)) return false;
  }
  return true;
}

Circuit binarize(const Circuit& c) {
  Circuit::Builder b(c.name());
  // Recreate nets first so existing ids are preserved.
  for (NetId n = 0; n < c.net_count(); ++n) b.net(c.net_name(n));
  for (NetId in : c.inputs()) b.add_input(c.net_name(in));
  for (NetId out : c.outputs()) b.add_output(out);

  auto fresh = [&](NetId base, unsigned& counter) {
    while (true) {
      std::string name = fmt::format("{}__b{}", c.net_name(base), counter++);
      if (!b.has_net(name)) return b.net(name);
    }
  };

  for (const Gate& g : c.gates()) {
    const std::size_t n = g.fanin.size();
    if (is_unary(g.kind) || n == 2) {
      b.add_gate(g.kind, g.fanin, g.fanout);
      continue;
    }
    if (n == 1) {
      b.add_gate(is_complemented(g.kind) ? GateKind::Not : GateKind::Buf, g.fanin, g.fanout);
      continue;
    }
    const GateKind base = base_kind(g.kind);
    const bool complement = is_complemented(g.kind);
    unsigned counter = 0;
    NetId acc = g.fanin[0];
    for (std::size_t i = 1; i < n; ++i) {
      const bool last = i + 1 == n;
      NetId out = (last && !complement) ? g.fanout : fresh(g.fanout, counter);
      b.add_gate(base, {acc, g.fanin[i]}, out);
      acc = out;
    }
    if (complement) b.add_gate(GateKind::Not, {acc}, g.fanout);
  }
  return std::move(b).build();
}

}  // namespace gpa

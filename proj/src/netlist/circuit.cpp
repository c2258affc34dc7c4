#include "gpa/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <queue>

#include <fmt/format.h>

namespace gpa {

std::string_view bench_name(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buf: return "BUFF";
  }
  return "?";
}

std::string_view verilog_primitive(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "and";
    case GateKind::Nand: return "nand";
    case GateKind::Or: return "or";
    case GateKind::Nor: return "nor";
    case GateKind::Xor: return "xor";
    case GateKind::Xnor: return "xnor";
    case GateKind::Not: return "not";
    case GateKind::Buf: return "buf";
  }
  return "?";
}

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (upper == "BUF") return GateKind::Buf;
  for (GateKind kind : kAllGateKinds) {
    if (bench_name(kind) == upper) return kind;
  }
  return std::nullopt;
}

std::string to_string(const Diagnostic& d) {
  const char* severity = d.is_error() ? "error" : "warning";
  if (d.line == 0) return fmt::format("{}: {}", severity, d.message);
  return fmt::format("{}:{}: {}: {}", d.line, d.column, severity, d.message);
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) { return d.is_error(); });
}

std::optional<NetId> Circuit::find_net(std::string_view name) const {
  auto it = net_index_.find(std::string(name));
  if (it == net_index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Builder

Circuit::Builder::Builder(std::string name) { c_.name_ = std::move(name); }

NetId Circuit::Builder::net(std::string_view name) {
  auto [it, inserted] = c_.net_index_.try_emplace(std::string(name), static_cast<NetId>(c_.net_names_.size()));
  if (inserted) {
    c_.net_names_.emplace_back(name);
    c_.drivers_.push_back(kUndriven);
  }
  return it->second;
}

bool Circuit::Builder::has_net(std::string_view name) const {
  return c_.net_index_.find(std::string(name)) != c_.net_index_.end();
}

NetId Circuit::Builder::add_input(std::string_view name) {
  NetId id = net(name);
  if (c_.drivers_[id] == kUndriven) {
    c_.drivers_[id] = kPrimaryInput;
  } else {
    c_.conflicts_.emplace_back(id, kPrimaryInput);
  }
  c_.inputs_.push_back(id);
  return id;
}

void Circuit::Builder::add_output(std::string_view name) { add_output(net(name)); }

void Circuit::Builder::add_output(NetId id) {
  if (std::find(c_.outputs_.begin(), c_.outputs_.end(), id) == c_.outputs_.end()) c_.outputs_.push_back(id);
}

GateId Circuit::Builder::add_gate(GateKind kind, std::span<const NetId> fanin, NetId fanout) {
  auto id = static_cast<GateId>(c_.gates_.size());
  c_.gates_.push_back(Gate{kind, std::vector<NetId>(fanin.begin(), fanin.end()), fanout});
  if (c_.drivers_.at(fanout) == kUndriven) {
    c_.drivers_[fanout] = id;
  } else {
    c_.conflicts_.emplace_back(fanout, id);
  }
  return id;
}

namespace {

// Kahn's algorithm, smallest ready gate id first. Returns a partial order when
// the graph is cyclic.
std::vector<GateId> kahn(const Circuit& c) {
  const auto gates = c.gates();
  std::vector<std::uint32_t> pending(gates.size(), 0);
  std::vector<std::vector<GateId>> readers(c.net_count());
  for (GateId g = 0; g < gates.size(); ++g) {
    for (NetId in : gates[g].fanin) {
      GateId d = c.driver(in);
      if (d != Circuit::kUndriven && d != Circuit::kPrimaryInput) ++pending[g];
      readers[in].push_back(g);
    }
  }
  std::priority_queue<GateId, std::vector<GateId>, std::greater<>> ready;
  for (GateId g = 0; g < gates.size(); ++g) {
    if (pending[g] == 0) ready.push(g);
  }
  std::vector<GateId> order;
  order.reserve(gates.size());
  std::vector<bool> emitted(gates.size(), false);
  while (!ready.empty()) {
    GateId g = ready.top();
    ready.pop();
    order.push_back(g);
    emitted[g] = true;
    // Only the registered driver releases readers; a duplicate driver never does.
    if (c.driver(gates[g].fanout) != g) continue;
    for (GateId r : readers[gates[g].fanout]) {
      if (--pending[r] == 0) ready.push(r);
    }
  }
  return order;
}

// Walks unfinished drivers from some unemitted gate until a net repeats.
NetId find_cycle_net(const Circuit& c, const std::vector<GateId>& partial) {
  std::vector<bool> done(c.gate_count(), false);
  for (GateId g : partial) done[g] = true;
  for (GateId start = 0; start < c.gate_count(); ++start) {
    if (done[start]) continue;
    std::vector<int> seen(c.net_count(), 0);
    GateId g = start;
    for (std::size_t steps = 0; steps <= c.gate_count(); ++steps) {
      NetId next = kNoNet;
      for (NetId in : c.gate(g).fanin) {
        GateId d = c.driver(in);
        if (d != Circuit::kUndriven && d != Circuit::kPrimaryInput && !done[d]) {
          next = in;
          break;
        }
      }
      if (next == kNoNet) break;
      if (seen[next]++) return next;
      g = c.driver(next);
    }
  }
  return kNoNet;
}

}  // namespace

Circuit Circuit::Builder::build() && {
  if (c_.conflicts_.empty()) {
    auto order = kahn(c_);
    if (order.size() == c_.gates_.size()) c_.topo_ = std::move(order);
  }
  return std::move(c_);
}

std::vector<GateId> topo_order(const Circuit& c) {
  auto order = kahn(c);
  if (order.size() != c.gate_count()) {
    NetId net = find_cycle_net(c, order);
    if (net == kNoNet) throw NetlistError("combinational cycle detected");
    throw NetlistError(fmt::format("combinational cycle through net '{}'", c.net_name(net)));
  }
  return order;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Diagnostic> validate(const Circuit& c) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) { out.push_back({Diagnostic::Severity::Error, std::move(msg), 0, 0}); };
  auto warning = [&](std::string msg) { out.push_back({Diagnostic::Severity::Warning, std::move(msg), 0, 0}); };

  for (auto [net, second] : c.conflicts_) {
    error(fmt::format("net '{}' has more than one driver", c.net_name(net)));
  }

  std::vector<std::uint32_t> readers(c.net_count(), 0);
  for (GateId g = 0; g < c.gate_count(); ++g) {
    const Gate& gate = c.gate(g);
    const std::size_t arity = gate.fanin.size();
    if (is_unary(gate.kind) && arity != 1) {
      error(fmt::format("{} gate driving '{}' has {} inputs, expected 1", bench_name(gate.kind),
                        c.net_name(gate.fanout), arity));
    } else if (!is_unary(gate.kind) && arity < 2) {
      error(fmt::format("{} gate driving '{}' has {} inputs, expected at least 2", bench_name(gate.kind),
                        c.net_name(gate.fanout), arity));
    }
    for (NetId in : gate.fanin) {
      ++readers[in];
      if (c.driver(in) == Circuit::kUndriven) {
        error(fmt::format("net '{}' is read by the gate driving '{}' but never driven", c.net_name(in),
                          c.net_name(gate.fanout)));
      }
    }
  }
  for (NetId o : c.outputs()) {
    ++readers[o];
    if (c.driver(o) == Circuit::kUndriven) error(fmt::format("output '{}' is never driven", c.net_name(o)));
  }

  if (c.conflicts_.empty() && !c.has_topo()) {
    auto partial = kahn(c);
    NetId net = find_cycle_net(c, partial);
    error(net == kNoNet ? std::string("combinational cycle detected")
                        : fmt::format("combinational cycle through net '{}'", c.net_name(net)));
  }

  for (NetId n = 0; n < c.net_count(); ++n) {
    if (readers[n] != 0) continue;
    GateId d = c.driver(n);
    if (d == Circuit::kPrimaryInput) {
      warning(fmt::format("input '{}' is never read", c.net_name(n)));
    } else if (d != Circuit::kUndriven) {
      warning(fmt::format("net '{}' is driven but never read", c.net_name(n)));
    }
  }
  return out;
}

bool same_structure(const Circuit& a, const Circuit& b) {
  if (a.net_count() != b.net_count() || a.gate_count() != b.gate_count()) return false;
  if (a.inputs().size() != b.inputs().size() || a.outputs().size() != b.outputs().size()) return false;

  auto port_names_equal = [&](std::span<const NetId> pa, std::span<const NetId> pb) {
    for (std::size_t i = 0; i < pa.size(); ++i) {
      if (a.net_name(pa[i]) != b.net_name(pb[i])) return false;
    }
    return true;
  };
  if (!port_names_equal(a.inputs(), b.inputs()) || !port_names_equal(a.outputs(), b.outputs())) return false;

  for (NetId na = 0; na < a.net_count(); ++na) {
    auto nb = b.find_net(a.net_name(na));
    if (!nb) return false;
    GateId da = a.driver(na);
    GateId db = b.driver(*nb);
    const bool gate_a = da != Circuit::kUndriven && da != Circuit::kPrimaryInput;
    const bool gate_b = db != Circuit::kUndriven && db != Circuit::kPrimaryInput;
    if (gate_a != gate_b || (!gate_a && da != db)) return false;
    if (!gate_a) continue;
    const Gate& ga = a.gate(da);
    const Gate& gb = b.gate(db);
    if (ga.kind != gb.kind || ga.fanin.size() != gb.fanin.size()) return false;
    for (std::size_t i = 0; i < ga.fanin.size(); ++i) {
      if (a.net_name(ga.fanin[i]) != b.net_name(gb.fanin[i])) return false;
    }
  }
  return true;
}

}  // namespace gpa

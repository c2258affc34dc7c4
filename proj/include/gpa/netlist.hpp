#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gpa {

using NetId = std::uint32_t;
using GateId = std::uint32_t;

inline constexpr NetId kNoNet = std::numeric_limits<NetId>::max();

enum class GateKind : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf };

inline constexpr GateKind kAllGateKinds[] = {GateKind::And, GateKind::Nand, GateKind::Or,  GateKind::Nor,
                                             GateKind::Xor, GateKind::Xnor, GateKind::Not, GateKind::Buf};
inline constexpr GateKind kBinaryGateKinds[] = {GateKind::And, GateKind::Nand, GateKind::Or,
                                                GateKind::Nor, GateKind::Xor,  GateKind::Xnor};

/// Upper-case `.bench` function name (`AND`, `BUFF`, ...).
std::string_view bench_name(GateKind kind);
/// Lower-case Verilog primitive name (`and`, `buf`, ...).
std::string_view verilog_primitive(GateKind kind);
/// Case-insensitive lookup; accepts `BUF` and `BUFF`.
std::optional<GateKind> gate_kind_from_name(std::string_view name);

constexpr bool is_unary(GateKind kind) { return kind == GateKind::Not || kind == GateKind::Buf; }
constexpr bool is_complemented(GateKind kind) {
  return kind == GateKind::Nand || kind == GateKind::Nor || kind == GateKind::Xnor || kind == GateKind::Not;
}
/// AND for NAND, OR for NOR, XOR for XNOR, BUF for NOT; identity otherwise.
constexpr GateKind base_kind(GateKind kind) {
  switch (kind) {
    case GateKind::Nand: return GateKind::And;
    case GateKind::Nor: return GateKind::Or;
    case GateKind::Xnor: return GateKind::Xor;
    case GateKind::Not: return GateKind::Buf;
    default: return kind;
  }
}

struct Gate {
  GateKind kind;
  std::vector<NetId> fanin;
  NetId fanout = kNoNet;
};

struct Diagnostic {
  enum class Severity { Error, Warning };

  Severity severity = Severity::Error;
  std::string message;
  std::size_t line = 0;    // 1-based, 0 when not tied to source text
  std::size_t column = 0;  // 1-based, 0 when not tied to source text

  bool is_error() const { return severity == Severity::Error; }
};

std::string to_string(const Diagnostic& d);
bool has_errors(std::span<const Diagnostic> diagnostics);

class NetlistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combinational gate-level netlist. Immutable once built; use Circuit::Builder.
///
/// Net ids are dense and assigned in creation order. A circuit produced by the
/// builder is not guaranteed to be well formed; `validate()` reports problems
/// and `parse_bench()` never returns a circuit that fails validation.
class Circuit {
 public:
  class Builder;

  /// Sentinels stored in the per-net driver table.
  static constexpr GateId kUndriven = std::numeric_limits<GateId>::max();
  static constexpr GateId kPrimaryInput = std::numeric_limits<GateId>::max() - 1;

  const std::string& name() const { return name_; }

  std::size_t net_count() const { return net_names_.size(); }
  std::size_t gate_count() const { return gates_.size(); }

  const std::string& net_name(NetId id) const { return net_names_.at(id); }
  std::span<const std::string> net_names() const { return net_names_; }
  std::optional<NetId> find_net(std::string_view name) const;

  std::span<const NetId> inputs() const { return inputs_; }
  std::span<const NetId> outputs() const { return outputs_; }
  std::span<const Gate> gates() const { return gates_; }
  const Gate& gate(GateId id) const { return gates_.at(id); }

  /// Gate index driving `net`, or kPrimaryInput / kUndriven.
  GateId driver(NetId net) const { return drivers_.at(net); }
  bool is_input(NetId net) const { return drivers_.at(net) == kPrimaryInput; }

  /// Cached topological order of gate ids. Empty (with gates present) when the
  /// circuit is cyclic or otherwise malformed.
  std::span<const GateId> topo() const { return topo_; }
  bool has_topo() const { return topo_.size() == gates_.size(); }

 private:
  std::string name_;
  std::vector<std::string> net_names_;
  std::unordered_map<std::string, NetId> net_index_;
  std::vector<NetId> inputs_;
  std::vector<NetId> outputs_;
  std::vector<Gate> gates_;
  std::vector<GateId> drivers_;
  std::vector<GateId> topo_;
  // Drive conflicts noticed while building (net, second driver) for validate().
  std::vector<std::pair<NetId, GateId>> conflicts_;

  friend std::vector<Diagnostic> validate(const Circuit& c);
};

class Circuit::Builder {
 public:
  explicit Builder(std::string name = "top");

  /// Returns the id of `name`, creating the net on first use.
  NetId net(std::string_view name);
  bool has_net(std::string_view name) const;

  NetId add_input(std::string_view name);
  void add_output(std::string_view name);
  void add_output(NetId id);
  GateId add_gate(GateKind kind, std::span<const NetId> fanin, NetId fanout);
  GateId add_gate(GateKind kind, std::initializer_list<NetId> fanin, NetId fanout) {
    return add_gate(kind, std::span<const NetId>(fanin.begin(), fanin.size()), fanout);
  }

  /// Finalizes the circuit and computes the cached topological order when the
  /// graph allows one. Does not reject malformed input.
  Circuit build() &&;

 private:
  Circuit c_;
};

struct ParseOptions {
  /// Treat `q = DFF(d)` as a cut register: q becomes a pseudo primary input and
  /// d a pseudo primary output. When false, DFFs are rejected.
  bool cut_dffs = false;
  std::string name = "top";
};

struct ParseResult {
  std::optional<Circuit> circuit;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return circuit.has_value(); }
};

/// Parses ISCAS `.bench` text. Never throws on malformed input.
ParseResult parse_bench(std::string_view text, const ParseOptions& options = {});
ParseResult parse_bench_file(const std::string& path, ParseOptions options = {});

/// Empty iff every structural invariant holds; dangling internal nets are
/// reported as warnings.
std::vector<Diagnostic> validate(const Circuit& c);

/// Deterministic topological order (Kahn, ties by declaration index).
/// Throws NetlistError naming a net on a cycle.
std::vector<GateId> topo_order(const Circuit& c);

/// Rewrites every n-ary gate into a left fold of 2-input gates of its base
/// kind, with a single trailing NOT for complemented kinds. Existing nets keep
/// their ids; fresh nets use the `__b<k>` suffix and are appended.
Circuit binarize(const Circuit& c);
bool is_binarized(const Circuit& c);

std::string write_bench(const Circuit& c, std::string_view header_comment = {});

/// Injective mapping from net names to plain Verilog identifiers.
///
/// `[A-Za-z0-9_]` pass through unchanged, `$` and every other byte become `$`
/// followed by two lower-case hex digits. Names that would start with a digit
/// or `$`, or collide with a Verilog keyword, get the prefix `n$_` (never
/// produced by the byte escape since `_` is not a hex digit).
/// Examples: `N22` -> `N22`, `1GAT(0)` -> `n$_1GAT$280$29`, `wire` -> `n$_wire`.
std::string mangle_verilog_identifier(std::string_view name);

/// Single structural module; ports are inputs then outputs. Throws NetlistError
/// if mangling ever produces a collision.
std::string write_verilog(const Circuit& c, std::string_view header_comment = {});

/// True when both circuits have the same named nets, ports (in order) and the
/// same gate (kind, ordered fanin names) driving each net. Gate order and net
/// ids may differ.
bool same_structure(const Circuit& a, const Circuit& b);

}  // namespace gpa

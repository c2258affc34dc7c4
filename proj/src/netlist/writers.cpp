#include "gpa/netlist.hpp"

#include <array>
#include <unordered_set>

#include <fmt/format.h>

namespace gpa {

namespace {

void append_comment(std::string& out, std::string_view prefix, std::string_view comment) {
  std::size_t pos = 0;
  while (pos <= comment.size() && !comment.empty()) {
    std::size_t eol = comment.find('\n', pos);
    if (eol == std::string_view::npos) eol = comment.size();
    out += prefix;
    out += comment.substr(pos, eol - pos);
    out += '\n';
    pos = eol + 1;
  }
}

// IEEE 1364-2005 reserved words.
constexpr std::string_view kVerilogKeywords[] = {
    "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1", "case", "casex", "casez",
    "cell", "cmos", "config", "deassign", "default", "defparam", "design", "disable", "edge", "else", "end",
    "endcase", "endconfig", "endfunction", "endgenerate", "endmodule", "endprimitive", "endspecify",
    "endtable", "endtask", "event", "for", "force", "forever", "fork", "function", "generate", "genvar",
    "highz0", "highz1", "if", "ifnone", "incdir", "include", "initial", "inout", "input", "instance",
    "integer", "join", "large", "liblist", "library", "localparam", "macromodule", "medium", "module",
    "nand", "negedge", "nmos", "nor", "noshowcancelled", "not", "notif0", "notif1", "or", "output",
    "parameter", "pmos", "posedge", "primitive", "pull0", "pull1", "pulldown", "pullup",
    "pulsestyle_onevent", "pulsestyle_ondetect", "rcmos", "real", "realtime", "reg", "release", "repeat",
    "rnmos", "rpmos", "rtran", "rtranif0", "rtranif1", "scalared", "showcancelled", "signed", "small",
    "specify", "specparam", "strong0", "strong1", "supply0", "supply1", "table", "task", "time", "tran",
    "tranif0", "tranif1", "tri", "tri0", "tri1", "triand", "trior", "trireg", "unsigned", "use", "uwire",
    "vectored", "wait", "wand", "weak0", "weak1", "while", "wire", "wor", "xnor", "xor"};

bool is_keyword(std::string_view s) {
  for (auto kw : kVerilogKeywords) {
    if (kw == s) return true;
  }
  return false;
}

bool plain_char(char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_';
}

}  // namespace

std::string write_bench(const Circuit& c, std::string_view header_comment) {
  std::string out;
  append_comment(out, "# ", header_comment);
  for (NetId in : c.inputs()) out += fmt::format("INPUT({})\n", c.net_name(in));
  for (NetId o : c.outputs()) out += fmt::format("OUTPUT({})\n", c.net_name(o));
  for (const Gate& g : c.gates()) {
    out += fmt::format("{} = {}(", c.net_name(g.fanout), bench_name(g.kind));
    for (std::size_t i = 0; i < g.fanin.size(); ++i) {
      if (i) out += ", ";
      out += c.net_name(g.fanin[i]);
    }
    out += ")\n";
  }
  return out;
}

std::string mangle_verilog_identifier(std::string_view name) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string escaped;
  escaped.reserve(name.size());
  for (char ch : name) {
    if (plain_char(ch)) {
      escaped += ch;
    } else {
      auto byte = static_cast<unsigned char>(ch);
      escaped += '$';
      escaped += kHex[byte >> 4];
      escaped += kHex[byte & 0xF];
    }
  }
  const bool bad_start = escaped.empty() || (escaped[0] >= '0' && escaped[0] <= '9') || escaped[0] == '$';
  if (bad_start || is_keyword(escaped)) return "n$_" + escaped;
  return escaped;
}

std::string write_verilog(const Circuit& c, std::string_view header_comment) {
  std::vector<std::string> ids(c.net_count());
  std::unordered_set<std::string> used;
  for (NetId n = 0; n < c.net_count(); ++n) {
    ids[n] = mangle_verilog_identifier(c.net_name(n));
    if (!used.insert(ids[n]).second) {
      throw NetlistError(fmt::format("identifier collision after mangling net '{}'", c.net_name(n)));
    }
  }

  // A net that is both a primary input and a primary output gets a separate
  // output port `<id>$_po` driven through a buffer.
  std::vector<std::string> output_ports;
  std::vector<std::pair<std::string, NetId>> feedthroughs;
  for (NetId o : c.outputs()) {
    if (c.is_input(o)) {
      output_ports.push_back(ids[o] + "$_po");
      feedthroughs.emplace_back(output_ports.back(), o);
    } else {
      output_ports.push_back(ids[o]);
    }
  }

  std::string out;
  append_comment(out, "// ", header_comment);
  out += fmt::format("module {}(", mangle_verilog_identifier(c.name()));
  bool first = true;
  for (NetId in : c.inputs()) {
    out += fmt::format("{}{}", first ? "" : ", ", ids[in]);
    first = false;
  }
  for (const auto& port : output_ports) {
    out += fmt::format("{}{}", first ? "" : ", ", port);
    first = false;
  }
  out += ");\n";

  std::vector<bool> is_port(c.net_count(), false);
  for (NetId in : c.inputs()) {
    out += fmt::format("  input wire {};\n", ids[in]);
    is_port[in] = true;
  }
  for (std::size_t i = 0; i < output_ports.size(); ++i) {
    out += fmt::format("  output wire {};\n", output_ports[i]);
    is_port[c.outputs()[i]] = true;
  }
  for (NetId n = 0; n < c.net_count(); ++n) {
    if (!is_port[n]) out += fmt::format("  wire {};\n", ids[n]);
  }

  // Instance names use the `$_` pair, which mangled net names only contain
  // in their `n$_` prefix.
  std::size_t instance = 0;
  for (const auto& [port, net] : feedthroughs) {
    out += fmt::format("  buf g$_{} ({}, {});\n", instance++, port, ids[net]);
  }
  for (const Gate& g : c.gates()) {
    out += fmt::format("  {} g$_{} ({}", verilog_primitive(g.kind), instance++, ids[g.fanout]);
    for (NetId in : g.fanin) out += fmt::format(", {}", ids[in]);
    out += ");\n";
  }
  out += "endmodule\n";
  return out;
}

}  // namespace gpa

#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gpa/netlist.hpp"

namespace gpa::test {

inline std::string data_path(const std::string& name) { return std::string(GPA_TEST_DATA_DIR) + "/" + name; }

inline Circuit load(const std::string& name) {
  ParseResult r = parse_bench_file(data_path(name));
  if (!r.ok()) {
    std::string msg = "cannot load " + name;
    for (const auto& d : r.diagnostics) msg += "\n" + to_string(d);
    throw std::runtime_error(msg);
  }
  return std::move(*r.circuit);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// The bundled corpus every circuit-level property is checked on.
inline const std::vector<std::string>& bundled_corpus() {
  static const std::vector<std::string> names = {"c17.bench", "and2.bench", "mux2.bench", "reconverge.bench",
                                                 "decoder2to4.bench"};
  return names;
}

/// `.bench` files in $GPA_BENCH_DIR, sorted by name; empty when unset.
inline std::vector<std::string> external_benchmarks() {
  std::vector<std::string> out;
  const char* dir = std::getenv("GPA_BENCH_DIR");
  if (dir == nullptr || *dir == '\0' || !std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".bench") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Minimal structural Verilog reader for the subset the writer emits: one
/// module, `input`/`output`/`wire` declarations (optionally `wire`-typed
/// ports) and gate primitive instances with the output first. Also lints:
/// every identifier must be legal, every net declared before use, every
/// header port declared with a direction, and instance names unique.
/// Throws std::runtime_error describing the first problem.
inline Circuit read_structural_verilog(const std::string& text) {
  std::string clean;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 2, "//") == 0) {
      while (i < text.size() && text[i] != '\n') ++i;
    }
    if (i < text.size()) clean += text[i];
  }
  static const std::regex ident(R"([A-Za-z_][A-Za-z0-9_$]*)");
  auto check_ident = [](const std::string& s) {
    if (!std::regex_match(s, ident)) throw std::runtime_error("illegal identifier '" + s + "'");
  };
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
  auto split_commas = [&](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
  };

  std::vector<std::string> statements;
  {
    std::stringstream ss(clean);
    std::string st;
    while (std::getline(ss, st, ';')) statements.push_back(trim(st));
  }
  if (statements.empty() || statements.front().rfind("module ", 0) != 0) throw std::runtime_error("missing module");
  if (statements.back() != "endmodule") throw std::runtime_error("missing endmodule");

  const std::string& head = statements.front();
  const auto lp = head.find('(');
  const auto rp = head.rfind(')');
  const std::string module_name = trim(head.substr(7, lp == std::string::npos ? std::string::npos : lp - 7));
  check_ident(module_name);
  std::vector<std::string> header_ports;
  if (lp != std::string::npos) header_ports = split_commas(head.substr(lp + 1, rp - lp - 1));

  Circuit::Builder b(module_name);
  std::unordered_set<std::string> declared;
  std::unordered_set<std::string> instances;
  std::unordered_set<std::string> directed;
  for (std::size_t i = 1; i + 1 < statements.size(); ++i) {
    std::string st = statements[i];
    std::stringstream ss(st);
    std::string kw;
    ss >> kw;
    if (kw == "input" || kw == "output" || kw == "wire") {
      std::string rest;
      std::getline(ss, rest);
      rest = trim(rest);
      if (kw != "wire" && rest.rfind("wire ", 0) == 0) rest = trim(rest.substr(5));
      for (const auto& name : split_commas(rest)) {
        check_ident(name);
        if (!declared.insert(name).second) throw std::runtime_error("'" + name + "' declared twice");
        if (kw == "input") b.add_input(name);
        if (kw == "output") b.add_output(name);
        if (kw != "wire") directed.insert(name);
        b.net(name);
      }
      continue;
    }
    auto kind = gate_kind_from_name(kw);
    if (!kind || kw != verilog_primitive(*kind)) {
      throw std::runtime_error("unknown statement '" + st + "'");
    }
    const auto open = st.find('(');
    const auto close = st.rfind(')');
    if (open == std::string::npos || close == std::string::npos) throw std::runtime_error("bad instance '" + st + "'");
    const std::string inst = trim(st.substr(kw.size(), open - kw.size()));
    check_ident(inst);
    if (!instances.insert(inst).second) throw std::runtime_error("instance '" + inst + "' defined twice");
    auto pins = split_commas(st.substr(open + 1, close - open - 1));
    for (const auto& p : pins) {
      if (!declared.count(p)) throw std::runtime_error("undeclared net '" + p + "'");
    }
    std::vector<NetId> fanin;
    for (std::size_t k = 1; k < pins.size(); ++k) fanin.push_back(b.net(pins[k]));
    b.add_gate(*kind, fanin, b.net(pins[0]));
  }
  for (const auto& p : header_ports) {
    if (!directed.count(p)) throw std::runtime_error("port '" + p + "' has no direction");
  }
  Circuit c = std::move(b).build();
  auto diags = validate(c);
  for (const auto& d : diags) {
    if (d.is_error()) throw std::runtime_error(to_string(d));
  }
  return c;
}

}  // namespace gpa::test

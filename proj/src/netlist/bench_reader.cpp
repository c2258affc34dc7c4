#include "gpa/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

namespace gpa {

namespace {

struct Token {
  std::string text;
  std::size_t column = 0;  // 1-based
};

enum class StmtKind { Input, Output, Assign };

struct Statement {
  StmtKind kind;
  std::size_t line = 0;
  Token target;  // net name for INPUT/OUTPUT, driven net for assignments
  Token function;
  std::vector<Token> args;
};

bool is_space(char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
         });
}

// Trims [begin, end) within `line` and returns the token with its column.
Token make_token(std::string_view line, std::size_t begin, std::size_t end) {
  while (begin < end && is_space(line[begin])) ++begin;
  while (end > begin && is_space(line[end - 1])) --end;
  return Token{std::string(line.substr(begin, end - begin)), begin + 1};
}

bool valid_net_name(std::string_view name) {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(),
                      [](char ch) { return is_space(ch) || ch == ',' || ch == '=' || ch == '#'; });
}

class Reader {
 public:
  explicit Reader(const ParseOptions& options) : options_(options) {}

  ParseResult run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      ++line_no;
      scan_line(text.substr(pos, eol - pos), line_no);
      pos = eol + 1;
    }
    ParseResult result;
    if (!has_errors(diags_)) {
      Circuit c = assemble();
      if (!has_errors(diags_)) {
        // The checks above cover every invariant; anything validate() still
        // flags is reported rather than returned as a circuit. Its warnings
        // were already emitted with locations by assemble().
        auto extra = validate(c);
        for (auto& d : extra) {
          if (d.is_error()) diags_.push_back(std::move(d));
        }
        if (!has_errors(diags_)) result.circuit = std::move(c);
      }
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  void error(std::size_t line, std::size_t column, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Error, std::move(msg), line, column});
  }
  void warning(std::size_t line, std::size_t column, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Warning, std::move(msg), line, column});
  }

  void scan_line(std::string_view raw, std::size_t line_no) {
    std::string_view line = raw.substr(0, raw.find('#'));
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = 0;
    while (first < line.size() && is_space(line[first])) ++first;
    if (first == line.size()) return;

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      scan_declaration(line, first, line_no);
    } else {
      scan_assignment(line, eq, line_no);
    }
  }

  // Returns the text between the first '(' after `from` and the last ')'.
  bool parenthesized(std::string_view line, std::size_t from, std::size_t line_no, std::size_t& open,
                     std::size_t& close) {
    open = line.find('(', from);
    close = line.rfind(')');
    if (open == std::string_view::npos) {
      error(line_no, from + 1, "expected '('");
      return false;
    }
    if (close == std::string_view::npos || close < open) {
      error(line_no, open + 1, "unbalanced parentheses");
      return false;
    }
    for (std::size_t i = close + 1; i < line.size(); ++i) {
      if (!is_space(line[i])) {
        error(line_no, i + 1, "unexpected text after ')'");
        return false;
      }
    }
    return true;
  }

  void scan_declaration(std::string_view line, std::size_t first, std::size_t line_no) {
    std::size_t open = 0;
    std::size_t close = 0;
    std::size_t keyword_end = first;
    while (keyword_end < line.size() && (std::isalpha(static_cast<unsigned char>(line[keyword_end])) != 0)) {
      ++keyword_end;
    }
    std::string_view keyword = line.substr(first, keyword_end - first);
    StmtKind kind;
    if (iequals(keyword, "INPUT")) {
      kind = StmtKind::Input;
    } else if (iequals(keyword, "OUTPUT")) {
      kind = StmtKind::Output;
    } else {
      error(line_no, first + 1, "expected INPUT(...), OUTPUT(...) or an assignment");
      return;
    }
    for (std::size_t i = keyword_end; i < line.size() && line[i] != '('; ++i) {
      if (!is_space(line[i])) {
        error(line_no, i + 1, "expected '(' after " + std::string(keyword));
        return;
      }
    }
    if (!parenthesized(line, keyword_end, line_no, open, close)) return;
    Token name = make_token(line, open + 1, close);
    if (!valid_net_name(name.text)) {
      error(line_no, name.text.empty() ? open + 2 : name.column, "invalid net name");
      return;
    }
    statements_.push_back(Statement{kind, line_no, std::move(name), {}, {}});
  }

  void scan_assignment(std::string_view line, std::size_t eq, std::size_t line_no) {
    Token target = make_token(line, 0, eq);
    if (!valid_net_name(target.text)) {
      error(line_no, target.text.empty() ? 1 : target.column, "invalid net name on left-hand side");
      return;
    }
    std::size_t open = 0;
    std::size_t close = 0;
    if (!parenthesized(line, eq + 1, line_no, open, close)) return;
    Token function = make_token(line, eq + 1, open);
    if (function.text.empty() ||
        !std::all_of(function.text.begin(), function.text.end(),
                     [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_'; })) {
      error(line_no, function.text.empty() ? eq + 2 : function.column, "expected a gate function name");
      return;
    }
    std::vector<Token> args;
    std::size_t begin = open + 1;
    std::string_view inner = line.substr(0, close);
    if (make_token(line, begin, close).text.empty()) {
      error(line_no, open + 1, fmt::format("{} has no inputs", function.text));
      return;
    }
    while (true) {
      std::size_t comma = inner.find(',', begin);
      std::size_t end = comma == std::string_view::npos ? close : comma;
      Token arg = make_token(line, begin, end);
      if (!valid_net_name(arg.text)) {
        error(line_no, arg.text.empty() ? begin + 1 : arg.column, "invalid or missing argument");
        return;
      }
      args.push_back(std::move(arg));
      if (comma == std::string_view::npos) break;
      begin = comma + 1;
    }
    statements_.push_back(Statement{StmtKind::Assign, line_no, std::move(target), std::move(function), std::move(args)});
  }

  Circuit assemble() {
    struct Definition {
      std::size_t line;
      std::size_t column;
    };
    std::unordered_map<std::string, Definition> defined;
    auto define = [&](const Token& t, std::size_t line) {
      auto [it, inserted] = defined.try_emplace(t.text, Definition{line, t.column});
      if (!inserted) {
        error(line, t.column,
              fmt::format("net '{}' already driven (first defined on line {})", t.text, it->second.line));
      }
      return inserted;
    };

    // Pass 1: every driver, so forward references resolve.
    std::vector<const Statement*> gates;
    std::vector<const Statement*> dffs;
    for (const auto& s : statements_) {
      if (s.kind == StmtKind::Input) {
        define(s.target, s.line);
      } else if (s.kind == StmtKind::Assign) {
        if (iequals(s.function.text, "DFF")) {
          if (!options_.cut_dffs) {
            error(s.line, s.function.column,
                  "sequential element DFF is not supported (enable register cutting to treat it as a "
                  "pseudo input/output pair)");
            continue;
          }
          if (s.args.size() != 1) {
            error(s.line, s.function.column, fmt::format("DFF expects 1 input, got {}", s.args.size()));
            continue;
          }
          if (define(s.target, s.line)) dffs.push_back(&s);
          continue;
        }
        auto kind = gate_kind_from_name(s.function.text);
        if (!kind) {
          error(s.line, s.function.column, fmt::format("unsupported gate function '{}'", s.function.text));
          continue;
        }
        if (is_unary(*kind) && s.args.size() != 1) {
          error(s.line, s.function.column,
                fmt::format("{} expects exactly 1 input, got {}", s.function.text, s.args.size()));
          continue;
        }
        if (define(s.target, s.line)) gates.push_back(&s);
      }
    }

    for (const auto& s : statements_) {
      if (s.kind == StmtKind::Output && !defined.count(s.target.text)) {
        error(s.line, s.target.column, fmt::format("output '{}' is never driven", s.target.text));
      }
      if (s.kind != StmtKind::Assign) continue;
      for (const auto& arg : s.args) {
        if (!defined.count(arg.text)) {
          error(s.line, arg.column, fmt::format("net '{}' is used but never driven", arg.text));
        }
      }
    }

    Circuit::Builder builder(options_.name);
    for (const auto& s : statements_) {
      if (s.kind == StmtKind::Input) builder.add_input(s.target.text);
    }
    for (const Statement* s : dffs) builder.add_input(s->target.text);
    std::unordered_set<std::string> outputs_seen;
    for (const auto& s : statements_) {
      if (s.kind != StmtKind::Output) continue;
      if (!outputs_seen.insert(s.target.text).second) {
        warning(s.line, s.target.column, fmt::format("output '{}' declared more than once", s.target.text));
        continue;
      }
      builder.add_output(s.target.text);
    }
    for (const Statement* s : dffs) builder.add_output(s->args.front().text);

    std::unordered_map<GateId, const Statement*> gate_source;
    for (const Statement* s : gates) {
      GateKind kind = *gate_kind_from_name(s->function.text);
      if (s->args.size() == 1 && !is_unary(kind)) {
        GateKind normalized = is_complemented(kind) ? GateKind::Not : GateKind::Buf;
        warning(s->line, s->function.column,
                fmt::format("single-input {} treated as {}", s->function.text, bench_name(normalized)));
        kind = normalized;
      }
      std::vector<NetId> fanin;
      fanin.reserve(s->args.size());
      for (const auto& arg : s->args) fanin.push_back(builder.net(arg.text));
      GateId id = builder.add_gate(kind, fanin, builder.net(s->target.text));
      gate_source[id] = s;
    }
    Circuit c = std::move(builder).build();

    if (!has_errors(diags_) && !c.has_topo()) {
      try {
        topo_order(c);
      } catch (const NetlistError& e) {
        // Locate the definition of the reported net.
        std::size_t line = 1;
        std::size_t column = 1;
        std::string msg = e.what();
        auto quote = msg.find('\'');
        if (quote != std::string::npos) {
          std::string net = msg.substr(quote + 1, msg.rfind('\'') - quote - 1);
          auto it = defined.find(net);
          if (it != defined.end()) {
            line = it->second.line;
            column = it->second.column;
          }
        }
        error(line, column, msg);
      }
    }

    if (has_errors(diags_)) return c;

    // Dangling-net warnings, located at the net's definition.
    std::vector<std::uint32_t> readers(c.net_count(), 0);
    for (const Gate& g : c.gates()) {
      for (NetId in : g.fanin) ++readers[in];
    }
    for (NetId o : c.outputs()) ++readers[o];
    for (NetId n = 0; n < c.net_count(); ++n) {
      if (readers[n] != 0) continue;
      auto it = defined.find(c.net_name(n));
      if (it == defined.end()) continue;
      const char* what = c.is_input(n) ? "input '{}' is never read" : "net '{}' is driven but never read";
      warning(it->second.line, it->second.column, fmt::format(fmt::runtime(what), c.net_name(n)));
    }
    return c;
  }

  const ParseOptions& options_;
  std::vector<Statement> statements_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

ParseResult parse_bench(std::string_view text, const ParseOptions& options) {
  Reader reader(options);
  return reader.run(text);
}

ParseResult parse_bench_file(const std::string& path, ParseOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back({Diagnostic::Severity::Error, fmt::format("cannot open '{}'", path), 0, 0});
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (options.name == "top") {
    auto slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.rfind('.');
    if (dot != std::string::npos && dot > 0) base.resize(dot);
    options.name = base;
  }
  return parse_bench(ss.str(), options);
}

}  // namespace gpa

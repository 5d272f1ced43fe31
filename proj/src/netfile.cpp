#include "ctp/netfile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ctp/errors.hpp"

namespace ctp {
namespace {

constexpr double kRowTolerance = 1e-9;

struct Token {
  std::string text;
  int line = 0;
  int column = 0;
};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '+';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++i;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance();
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
    } else if (c == '{' || c == '}' || c == ',' || c == '|') {
      out.push_back(Token{std::string(1, c), line, column});
      advance();
    } else if (word_char(c)) {
      Token t{{}, line, column};
      while (i < text.size() && word_char(text[i])) {
        t.text += text[i];
        advance();
      }
      out.push_back(std::move(t));
    } else {
      throw ParseError(line, column, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

struct CptDecl {
  Token child;
  std::vector<Token> parents;
  Token open;
  std::vector<Token> values;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  void run() {
    while (!done()) {
      const auto kw = next("'variable' or 'cpt'");
      if (kw.text == "variable")
        variable();
      else if (kw.text == "cpt")
        cpt();
      else
        fail(kw, "expected 'variable' or 'cpt', got '" + kw.text + "'");
    }
  }

  std::vector<std::pair<Token, std::vector<std::string>>> variables;
  std::vector<CptDecl> cpts;

 private:
  bool done() const { return pos_ >= tokens_.size(); }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    throw ParseError(t.line, t.column, what);
  }

  Token next(const std::string& expected) {
    if (done()) {
      const auto& last = tokens_.back();
      throw ParseError(last.line, last.column + static_cast<int>(last.text.size()),
                       "unexpected end of input, expected " + expected);
    }
    return tokens_[pos_++];
  }

  Token name(const std::string& what) {
    auto t = next(what);
    if (!word_char(t.text[0])) fail(t, "expected " + what + ", got '" + t.text + "'");
    return t;
  }

  void expect(const std::string& punct) {
    auto t = next("'" + punct + "'");
    if (t.text != punct) fail(t, "expected '" + punct + "', got '" + t.text + "'");
  }

  bool peek(const std::string& punct) const { return !done() && tokens_[pos_].text == punct; }

  // Comma-separated words up to the closing brace.
  std::vector<Token> braced_list(const std::string& what) {
    std::vector<Token> out;
    for (;;) {
      out.push_back(name(what));
      auto t = next("',' or '}'");
      if (t.text == "}") return out;
      if (t.text != ",") fail(t, "expected ',' or '}', got '" + t.text + "'");
    }
  }

  void variable() {
    auto n = name("a variable name");
    expect("{");
    std::vector<std::string> states;
    for (auto& t : braced_list("a state name")) states.push_back(t.text);
    variables.emplace_back(std::move(n), std::move(states));
  }

  void cpt() {
    CptDecl d;
    d.child = name("a variable name");
    if (peek("|")) {
      ++pos_;
      d.parents.push_back(name("a parent name"));
      while (peek(",")) {
        ++pos_;
        d.parents.push_back(name("a parent name"));
      }
    }
    d.open = next("'{'");
    if (d.open.text != "{") fail(d.open, "expected '{', got '" + d.open.text + "'");
    d.values = braced_list("a probability");
    cpts.push_back(std::move(d));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

double number(const Token& t) {
  const char* begin = t.text.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end != begin + t.text.size() || !std::isfinite(x))
    throw ParseError(t.line, t.column, "'" + t.text + "' is not a number");
  if (x < 0.0) throw ParseError(t.line, t.column, "negative probability " + t.text);
  return x;
}

}  // namespace

SemiBayesNet parse_net(std::string_view text) {
  Parser p(tokenize(text));
  p.run();
  if (p.variables.empty()) throw ParseError(1, 1, "empty net: no variables declared");

  std::vector<Variable> vars;
  std::map<std::string, Variable> by_name;
  for (auto& [tok, states] : p.variables) {
    if (by_name.count(tok.text))
      throw ParseError(tok.line, tok.column, "variable '" + tok.text + "' declared twice");
    try {
      Variable v(static_cast<VarId>(vars.size()), tok.text, states);
      vars.push_back(v);
      by_name.emplace(tok.text, v);
    } catch (const ModelError& e) {
      throw ParseError(tok.line, tok.column, e.what());
    }
  }
  auto lookup = [&](const Token& t) {
    auto it = by_name.find(t.text);
    if (it == by_name.end()) throw ParseError(t.line, t.column, "unknown variable '" + t.text + "'");
    return it->second;
  };

  std::vector<ItemPtr> items;
  std::map<VarId, const CptDecl*> decl_of;
  for (const auto& d : p.cpts) {
    const auto child = lookup(d.child);
    if (decl_of.count(child.id()))
      throw ParseError(d.child.line, d.child.column, "second cpt for '" + child.name() + "'");
    decl_of[child.id()] = &d;
    std::vector<Variable> parents;
    for (const auto& t : d.parents) {
      auto v = lookup(t);
      if (v == child) throw ParseError(t.line, t.column, "'" + v.name() + "' is its own parent");
      if (std::find(parents.begin(), parents.end(), v) != parents.end())
        throw ParseError(t.line, t.column, "parent '" + v.name() + "' listed twice");
      parents.push_back(v);
    }
    auto layout = parents;
    layout.push_back(child);
    const auto expected = static_cast<std::size_t>(state_space(layout));
    if (d.values.size() != expected)
      throw ParseError(d.open.line, d.open.column,
                       "cpt for '" + child.name() + "' needs " + std::to_string(expected) +
                           " probabilities, got " + std::to_string(d.values.size()));
    std::vector<double> values;
    for (const auto& t : d.values) values.push_back(number(t));
    const auto k = child.cardinality();
    for (std::size_t row = 0; row < values.size(); row += k) {
      double sum = 0.0;
      for (std::size_t c = 0; c < k; ++c) sum += values[row + c];
      if (std::abs(sum - 1.0) > kRowTolerance) {
        const auto& t = d.values[row];
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", sum);
        throw ParseError(t.line, t.column,
                         "row of the cpt for '" + child.name() + "' sums to " + buf + ", not 1");
      }
    }
    items.push_back(make_item(child, parents, Potential::from_layout(layout, values)));
  }

  try {
    return SemiBayesNet::from_items(std::move(vars), std::move(items));
  } catch (const ModelError& e) {
    // Only a cycle can get here; report the first cpt that lies on one.
    const Token* where = nullptr;
    std::map<VarId, std::vector<VarId>> parents;
    for (const auto& [id, d] : decl_of)
      for (const auto& t : d->parents) parents[id].push_back(by_name.at(t.text).id());
    std::map<VarId, int> state;  // 1 = on stack, 2 = finished
    std::function<bool(VarId)> on_cycle = [&](VarId v) {
      state[v] = 1;
      for (VarId u : parents[v]) {
        if (state[u] == 1 || (state[u] == 0 && on_cycle(u))) return true;
      }
      state[v] = 2;
      return false;
    };
    for (const auto& d : p.cpts) {
      const auto id = by_name.at(d.child.text).id();
      if (state[id] == 0 && on_cycle(id)) {
        where = &d.child;
        break;
      }
    }
    if (where) throw ParseError(where->line, where->column, "cycle detected through '" + where->text + "'");
    throw ParseError(1, 1, e.what());
  }
}

SemiBayesNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_net(buf.str());
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string print_net(const SemiBayesNet& n) {
  if (!n.parameters().empty())
    throw ContractViolation("print_net: nets with parameters have no text form");
  std::ostringstream os;
  for (const auto& v : n.variables()) {
    if (v.kind() != VariableKind::net) throw ContractViolation("print_net: '" + v.name() + "' is not a net variable");
    os << "variable " << v.name() << " { ";
    for (std::size_t s = 0; s < v.cardinality(); ++s) os << (s ? ", " : "") << v.states()[s];
    os << " }\n";
  }
  for (const auto& item : n.items()) {
    os << "cpt " << item->child.name();
    if (!item->parents.empty()) os << " | " << join_names(item->parents, ", ");
    auto layout = item->parents;
    layout.push_back(item->child);
    os << " {";
    const auto values = item->table.values_in_layout(layout);
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      os << (i ? ", " : " ") << buf;
    }
    os << " }\n";
  }
  return os.str();
}

}  // namespace ctp

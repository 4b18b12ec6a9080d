// Copyright 2026 The quantsyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quantsyn/model_file.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace quantsyn {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : UsageError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { ident, number, symbol, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    const char ch = s[i];
    if (ch == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t j = i;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      if (j < s.size() && s[j] == '\'') ++j;
      t.kind = Tok::ident;
    } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      t.kind = Tok::number;
    } else {
      static const char* two[] = {"->", "<=", ">="};
      t.kind = Tok::symbol;
      j = i + 1;
      for (const char* op : two) {
        if (s.substr(i, 2) == op) j = i + 2;
      }
      if (j == i + 1 && std::string_view("[],;=+-*/()!").find(ch) == std::string_view::npos) {
        throw ParseError(line, col, std::string("unexpected character '") + ch + "'");
      }
    }
    t.text = std::string(s.substr(i, j - i));
    advance(j - i);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

struct QuantSpec {
  bool floor = false;
  Rational value;  // bits or scale
  Interval bounds;
};

class Parser {
 public:
  Parser(std::string_view text, std::optional<unsigned> bits) : toks_(tokenize(text)), bits_(bits) {}

  ModelFile parse() {
    while (peek().kind != Tok::end) statement();
    if (quant_.empty()) fail(peek(), "model declares no state variable");
    const Dtlhs h = builder_.build();
    std::vector<Quantizer> qs;
    for (const auto& spec : quant_) {
      if (spec.floor) {
        qs.push_back(Quantizer::floor_scaled(spec.bounds, spec.value));
      } else {
        const unsigned b = bits_ ? *bits_ : static_cast<unsigned>(spec.value.convert_to<long>());
        qs.push_back(Quantizer::uniform(spec.bounds, b));
      }
    }
    Quantization q(h, std::move(qs));
    ModelFile out{{name_, h, std::move(q), std::move(init_), std::move(goal_), sampling_}, params_};
    return out;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(t.line, t.column, msg);
  }
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::end) ++pos_;
    return t;
  }
  bool accept(const std::string& sym) {
    if (peek().kind == Tok::symbol && peek().text == sym) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& sym) {
    if (!accept(sym)) fail(peek(), "expected '" + sym + "'");
  }
  std::string ident() {
    if (peek().kind != Tok::ident) fail(peek(), "expected a name");
    return take().text;
  }
  bool keyword(const std::string& kw) {
    if (peek().kind == Tok::ident && peek().text == kw) {
      ++pos_;
      return true;
    }
    return false;
  }

  Rational constant() {
    const Token& t = peek();
    LinearExpression e = expression();
    if (!e.is_constant()) fail(t, "expected a constant");
    return e.constant();
  }

  Interval bounds(const Token& at) {
    if (peek().kind != Tok::symbol || peek().text != "[") fail(at, "variable needs bounds [lo, hi]");
    expect("[");
    const Rational lo = constant();
    expect(",");
    const Rational hi = constant();
    expect("]");
    if (lo > hi) fail(at, "empty bounds");
    return {lo, hi};
  }

  Sort sort() {
    const Token& t = peek();
    const std::string s = ident();
    if (s == "real") return Sort::real;
    if (s == "int") return Sort::integer;
    if (s == "bool") return Sort::boolean;
    fail(t, "unknown sort '" + s + "'");
  }

  void declare_name(const Token& t, const std::string& name) {
    if (params_.count(name) || builder_.find(name)) fail(t, "'" + name + "' is already declared");
    if (name.back() == '\'') fail(t, "declared names cannot end with a quote");
  }

  void statement() {
    const Token& t = peek();
    if (t.kind != Tok::ident) fail(t, "expected a statement");
    const std::string kw = ident();
    if (kw == "model") {
      name_ = ident();
    } else if (kw == "param") {
      const Token& nt = peek();
      const std::string n = ident();
      declare_name(nt, n);
      expect("=");
      params_[n] = constant();
    } else if (kw == "sampling") {
      sampling_ = constant();
      if (sampling_ <= 0) fail(t, "sampling time must be positive");
    } else if (kw == "var") {
      const Token& nt = peek();
      const std::string n = ident();
      declare_name(nt, n);
      if (sort() != Sort::real) fail(nt, "state variables must be real");
      const Interval b = bounds(nt);
      QuantSpec spec;
      spec.bounds = b;
      if (keyword("bits")) {
        spec.value = constant();
        if (!is_integral(spec.value) || spec.value < 1 || spec.value > 30) fail(nt, "bits must be in 1..30");
      } else if (keyword("floor")) {
        spec.floor = true;
        spec.value = constant();
        if (spec.value <= 0) fail(nt, "floor scale must be positive");
      } else {
        fail(peek(), "expected 'bits' or 'floor' after the bounds of a state variable");
      }
      state_ids_.push_back(builder_.state(n, b.lo, b.hi));
      quant_.push_back(std::move(spec));
    } else if (kw == "input" || kw == "aux") {
      const Token& nt = peek();
      const std::string n = ident();
      declare_name(nt, n);
      const Sort s = sort();
      Interval b{Rational(0), Rational(1)};
      if (s != Sort::boolean || (peek().kind == Tok::symbol && peek().text == "[")) b = bounds(nt);
      try {
        if (kw == "input") {
          builder_.input(n, s, b.lo, b.hi);
        } else {
          builder_.aux(n, s, b.lo, b.hi);
        }
      } catch (const UsageError& e) {
        fail(nt, e.what());
      }
    } else if (kw == "trans") {
      std::optional<std::pair<VarId, bool>> guard;
      const std::size_t save = pos_;
      bool positive = true;
      if (accept("!")) positive = false;
      if (peek().kind == Tok::ident && toks_[pos_ + 1].kind == Tok::symbol && toks_[pos_ + 1].text == "->") {
        const Token& gt = peek();
        const auto id = builder_.find(ident());
        if (!id) fail(gt, "unknown guard '" + gt.text + "'");
        expect("->");
        guard = std::make_pair(*id, positive);
      } else {
        pos_ = save;
      }
      const Token& et = peek();
      LinearExpression lhs = expression();
      const Token& op = take();
      LinearExpression rhs = expression();
      try {
        if (op.text == "<=") {
          guard ? builder_.le(guard->first, guard->second, lhs, rhs) : builder_.le(lhs, rhs);
        } else if (op.text == ">=") {
          guard ? builder_.ge(guard->first, guard->second, lhs, rhs) : builder_.ge(lhs, rhs);
        } else if (op.text == "=") {
          guard ? builder_.eq(guard->first, guard->second, lhs, rhs) : builder_.eq(lhs, rhs);
        } else {
          fail(op, "expected '<=', '=' or '>='");
        }
      } catch (const ParseError&) {
        throw;
      } catch (const UsageError& e) {
        fail(et, e.what());
      }
    } else if (kw == "init" || kw == "goal") {
      Region& r = kw == "init" ? init_ : goal_;
      const Token& et = peek();
      LinearExpression lhs = expression();
      for (const auto& [id, k] : lhs.terms()) check_state(et, id);
      const Token& op = take();
      LinearExpression rhs = expression();
      for (const auto& [id, k] : rhs.terms()) check_state(et, id);
      std::vector<Constraint> cs;
      if (op.text == "<=") {
        cs = le(lhs, rhs);
      } else if (op.text == ">=") {
        cs = ge(lhs, rhs);
      } else if (op.text == "=") {
        cs = eq(lhs, rhs);
      } else {
        fail(op, "expected '<=', '=' or '>='");
      }
      r.insert(r.end(), cs.begin(), cs.end());
    } else {
      fail(t, "unknown statement '" + kw + "'");
    }
    expect(";");
  }

  void check_state(const Token& t, VarId id) {
    if (std::find(state_ids_.begin(), state_ids_.end(), id) == state_ids_.end()) {
      fail(t, "init and goal may only mention state variables");
    }
  }

  LinearExpression expression() {
    LinearExpression e = term();
    for (;;) {
      if (accept("+")) {
        e += term();
      } else if (accept("-")) {
        e -= term();
      } else {
        return e;
      }
    }
  }

  LinearExpression term() {
    LinearExpression e = unary();
    for (;;) {
      const Token& t = peek();
      if (accept("*")) {
        LinearExpression r = unary();
        if (e.is_constant()) {
          e = r * e.constant();
        } else if (r.is_constant()) {
          e *= r.constant();
        } else {
          fail(t, "product of two variables is not linear");
        }
      } else if (accept("/")) {
        LinearExpression r = unary();
        if (!r.is_constant()) fail(t, "division by a variable is not linear");
        if (r.constant() == 0) fail(t, "division by zero");
        e *= 1 / r.constant();
      } else {
        return e;
      }
    }
  }

  LinearExpression unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return primary();
  }

  LinearExpression primary() {
    const Token& t = peek();
    if (accept("(")) {
      LinearExpression e = expression();
      expect(")");
      return e;
    }
    if (t.kind == Tok::number) {
      take();
      try {
        return LinearExpression(parse_rational(t.text));
      } catch (const std::exception&) {
        fail(t, "malformed number '" + t.text + "'");
      }
    }
    if (t.kind == Tok::ident) {
      take();
      if (const auto it = params_.find(t.text); it != params_.end()) return LinearExpression(it->second);
      std::string base = t.text;
      const bool primed = base.back() == '\'';
      if (primed) base.pop_back();
      const auto id = builder_.find(base);
      if (!id) fail(t, "unknown name '" + base + "'");
      if (!primed) return LinearExpression::variable(*id);
      try {
        return LinearExpression::variable(builder_.next(*id));
      } catch (const UsageError&) {
        fail(t, "'" + base + "' is not a state variable");
      }
    }
    fail(t, "expected an expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::optional<unsigned> bits_;
  DtlhsBuilder builder_;
  std::vector<QuantSpec> quant_;
  std::vector<VarId> state_ids_;
  std::map<std::string, Rational> params_;
  std::string name_ = "model";
  Rational sampling_{1};
  Region init_, goal_;
};

}  // namespace

ModelFile parse_model(std::string_view text, std::optional<unsigned> bits) {
  Parser p(text, bits);
  return p.parse();
}

}  // namespace quantsyn

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpst/core/context.hpp"
#include "mpst/core/error.hpp"
#include "mpst/core/types.hpp"
#include "mpst/proc/process.hpp"

namespace mpst {

struct SourceSpan {
  std::string file;
  size_t start = 0;
  size_t end = 0;
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, std::vector<std::string> expected, std::string found, size_t line,
             size_t col)
      : Error(render(span, expected, found, line, col)),
        span_(std::move(span)),
        expected_(std::move(expected)),
        found_(std::move(found)),
        line_(line),
        col_(col) {}

  const SourceSpan& span() const { return span_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }
  size_t line() const { return line_; }
  size_t column() const { return col_; }

 private:
  static std::string render(const SourceSpan& span, const std::vector<std::string>& expected,
                            const std::string& found, size_t line, size_t col) {
    std::string out = span.file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) out += i + 1 == expected.size() ? " or " : ", ";
      out += expected[i];
    }
    return out + ", found " + found;
  }

  SourceSpan span_;
  std::vector<std::string> expected_;
  std::string found_;
  size_t line_, col_;
};

class DuplicateEndpoint : public Error {
 public:
  explicit DuplicateEndpoint(Endpoint e) : Error("duplicate endpoint " + e.str()), endpoint_(std::move(e)) {}
  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
};

namespace detail {

enum class Tok { kId, kInt, kStr, kPunct, kEof };

struct Token {
  Tok kind;
  std::string text;  // identifier, punctuation, decoded string, digits
  size_t start, end;
};

inline bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kw = {"rec", "end",  "int", "str",  "bool", "unit", "mu",
                                                "new", "if",   "then", "else", "true", "false"};
  return kw.contains(s);
}

class Parser {
 public:
  Parser(std::string_view text, std::string file) : text_(text), file_(std::move(file)) { lex(); }

  GlobalType global() {
    const Token& t = peek();
    if (is_kw("rec")) {
      next();
      std::string var = ident("recursion variable");
      expect(".");
      return GlobalType::rec(std::move(var), global());
    }
    if (is_kw("end")) {
      next();
      return GlobalType::end();
    }
    if (t.kind == Tok::kId && !is_keyword(t.text)) {
      std::string name = next().text;
      if (!at("->")) return GlobalType::var(std::move(name));
      next();
      Role to(ident("role"));
      std::vector<GlobalBranch> branches;
      auto one = [&] {
        Label label(ident("label"));
        Sort sort = payload();
        expect(".");
        branches.push_back({std::move(label), std::move(sort), global()});
      };
      choice(one);
      return GlobalType::comm(Role(std::move(name)), std::move(to), std::move(branches));
    }
    fail({"global type"});
  }

  LocalType local() {
    const Token& t = peek();
    if (is_kw("rec")) {
      next();
      std::string var = ident("recursion variable");
      expect(".");
      return LocalType::rec(std::move(var), local());
    }
    if (is_kw("end")) {
      next();
      return LocalType::end();
    }
    if (t.kind == Tok::kId && !is_keyword(t.text)) {
      std::string name = next().text;
      bool out = at("!");
      if (!out && !at("?")) return LocalType::var(std::move(name));
      next();
      std::vector<LocalBranch> branches;
      auto one = [&] {
        Label label(ident("label"));
        Sort sort = payload();
        expect(".");
        branches.push_back({std::move(label), std::move(sort), local()});
      };
      choice(one);
      return out ? LocalType::select(Role(std::move(name)), std::move(branches))
                 : LocalType::branch(Role(std::move(name)), std::move(branches));
    }
    fail({"local type"});
  }

  Sort sort() {
    if (at("<")) {
      next();
      LocalType t = local();
      require_closed(t);
      expect(">");
      return Sort::Session(std::move(t));
    }
    if (is_kw("int")) return next(), Sort::Int();
    if (is_kw("str")) return next(), Sort::Str();
    if (is_kw("bool")) return next(), Sort::Bool();
    if (is_kw("unit")) return next(), Sort::Unit();
    fail({"'int'", "'str'", "'bool'", "'unit'", "'<'"});
  }

  TypingContext context() {
    TypingContext ctx;
    if (peek().kind != Tok::kId) return ctx;
    do {
      Endpoint e = endpoint();
      expect(":");
      LocalType t = local();
      require_closed(t);
      if (ctx.contains(e)) throw DuplicateEndpoint(e);
      ctx.add(std::move(e), std::move(t));
    } while (accept(","));
    return ctx;
  }

  Process process() {
    Process p = tight();
    while (accept("|")) p = Process::par(std::move(p), tight());
    return p;
  }

  Expr expr() {
    Expr a = atom();
    if (accept("==")) return Expr::eq(std::move(a), atom());
    if (accept("<")) return Expr::lt(std::move(a), atom());
    return a;
  }

  void finish() {
    if (peek().kind != Tok::kEof) fail({"end of input"});
  }

 private:
  // ---- processes ----

  Process tight() {
    const Token& t = peek();
    if (t.kind == Tok::kInt && t.text == "0") {
      next();
      return Process::nil();
    }
    if (at("(")) {
      if (peek(1).kind == Tok::kId && peek(1).text == "new") {
        next();
        next();
        std::string s = ident("session name");
        expect(")");
        return Process::res(std::move(s), tight());
      }
      next();
      Process p = process();
      expect(")");
      return p;
    }
    if (is_kw("if")) {
      next();
      Expr g = expr();
      expect_kw("then");
      Process a = tight();
      expect_kw("else");
      Process b = tight();
      return Process::cond(std::move(g), std::move(a), std::move(b));
    }
    if (is_kw("mu")) {
      next();
      std::string var = ident("process variable");
      std::optional<TypingContext> ann;
      if (accept("[")) {
        ann = context();
        expect("]");
      }
      expect(".");
      pvars_.push_back(var);
      Process body = tight();
      pvars_.pop_back();
      return Process::mu(std::move(var), std::move(ann), std::move(body));
    }
    if (t.kind == Tok::kId && !is_keyword(t.text)) return prefixed();
    fail({"process"});
  }

  Process prefixed() {
    const Token& head = next();
    std::string name = head.text;
    if (!at("[")) {
      if (std::find(pvars_.begin(), pvars_.end(), name) == pvars_.end()) unbound(name, head);
      return Process::var(std::move(name));
    }
    next();
    std::string first = ident("role");
    expect("]");
    std::optional<ChanRef> chan;
    Role peer(first);
    if (accept("[")) {
      chan = ChanRef{Endpoint(name, Role(first))};
      peer = Role(ident("role"));
      expect("]");
    } else {
      if (!bound(name)) unbound(name, head);
      chan = ChanRef{name};
    }
    if (accept("!")) {
      Label label(ident("label"));
      expect("(");
      Expr arg = at(")") ? Expr::unit() : expr();
      expect(")");
      expect(".");
      return Process::select(std::move(*chan), std::move(peer), std::move(label), std::move(arg),
                             tight());
    }
    if (accept("?")) {
      expect("{");
      std::vector<ProcBranch> arms;
      do {
        Label label(ident("label"));
        expect("(");
        std::string binder = ident("binder");
        expect(")");
        expect(".");
        values_.push_back(binder);
        Process body = process();
        values_.pop_back();
        arms.push_back({std::move(label), std::move(binder), std::move(body)});
      } while (accept(","));
      expect("}");
      return Process::branch(std::move(*chan), std::move(peer), std::move(arms));
    }
    fail({"'!'", "'?'"});
  }

  Expr atom() {
    const Token& t = peek();
    if (t.kind == Tok::kInt) return Expr::integer(to_int(next()));
    if (at("-") && peek(1).kind == Tok::kInt) {
      next();
      return Expr::integer(-to_int(next()));
    }
    if (t.kind == Tok::kStr) return Expr::string(next().text);
    if (is_kw("true")) return next(), Expr::boolean(true);
    if (is_kw("false")) return next(), Expr::boolean(false);
    if (at("(")) {
      next();
      if (accept(")")) return Expr::unit();
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::kId && !is_keyword(t.text)) {
      const Token& tok = next();
      std::string name = tok.text;
      if (accept("[")) {
        Role r(ident("role"));
        expect("]");
        return Expr::chan(Endpoint(std::move(name), std::move(r)));
      }
      if (!bound(name)) unbound(name, tok);
      return Expr::var(std::move(name));
    }
    fail({"expression"});
  }

  std::int64_t to_int(const Token& t) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) fail_at(t, {"integer literal in range"});
    return v;
  }

  bool bound(const std::string& name) const {
    return std::find(values_.begin(), values_.end(), name) != values_.end();
  }

  [[noreturn]] void unbound(const std::string& name, const Token&) { throw UnboundVariable(name); }

  // ---- types ----

  Sort payload() {
    if (!accept("(")) return Sort::Unit();
    Sort s = sort();
    expect(")");
    return s;
  }

  template <class F>
  void choice(F&& one) {
    if (accept("{")) {
      do one();
      while (accept(","));
      expect("}");
    } else {
      one();
    }
  }

  Endpoint endpoint() {
    std::string s = ident("session name");
    expect("[");
    Role r(ident("role"));
    expect("]");
    return Endpoint(std::move(s), std::move(r));
  }

  // ---- tokens ----

  std::string ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::kId || is_keyword(t.text)) fail({what});
    return next().text;
  }

  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at(std::string_view p) const { return peek().kind == Tok::kPunct && peek().text == p; }
  bool is_kw(std::string_view k) const { return peek().kind == Tok::kId && peek().text == k; }
  bool accept(std::string_view p) {
    if (!at(p)) return false;
    next();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail({"'" + std::string(p) + "'"});
  }
  void expect_kw(std::string_view k) {
    if (!is_kw(k)) fail({"'" + std::string(k) + "'"});
    next();
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::kEof:
        return "end of input";
      case Tok::kId:
        return is_keyword(t.text) ? "'" + t.text + "'" : "identifier '" + t.text + "'";
      case Tok::kInt:
        return "integer " + t.text;
      case Tok::kStr:
        return "string literal";
      case Tok::kPunct:
        return "'" + t.text + "'";
    }
    return "?";
  }

  [[noreturn]] void fail(std::vector<std::string> expected) { fail_at(peek(), std::move(expected)); }

  [[noreturn]] void fail_at(const Token& t, std::vector<std::string> expected) {
    throw_error(t.start, t.end, std::move(expected), describe(t));
  }

  [[noreturn]] void throw_error(size_t start, size_t end, std::vector<std::string> expected,
                                std::string found) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < start && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(SourceSpan{file_, start, end}, std::move(expected), std::move(found), line, col);
  }

  void lex() {
    size_t i = 0;
    const size_t n = text_.size();
    auto id_start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    auto id_char = [&](char c) { return id_start(c) || (c >= '0' && c <= '9') || c == '_'; };
    while (i < n) {
      char c = text_[i];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++i;
      } else if (c == '/' && i + 1 < n && text_[i + 1] == '/') {
        while (i < n && text_[i] != '\n') ++i;
      } else if (id_start(c)) {
        size_t j = i;
        while (j < n && id_char(text_[j])) ++j;
        toks_.push_back({Tok::kId, std::string(text_.substr(i, j - i)), i, j});
        i = j;
      } else if (c >= '0' && c <= '9') {
        size_t j = i;
        while (j < n && text_[j] >= '0' && text_[j] <= '9') ++j;
        toks_.push_back({Tok::kInt, std::string(text_.substr(i, j - i)), i, j});
        i = j;
      } else if (c == '"') {
        std::string value;
        size_t j = i + 1;
        for (;; ++j) {
          if (j >= n) throw_error(i, n, {"closing '\"'"}, "end of input");
          if (text_[j] == '"') break;
          if (text_[j] == '\\' && j + 1 < n) {
            ++j;
            value += text_[j] == 'n' ? '\n' : text_[j];
          } else {
            value += text_[j];
          }
        }
        toks_.push_back({Tok::kStr, std::move(value), i, j + 1});
        i = j + 1;
      } else if (text_.substr(i, 2) == "->" || text_.substr(i, 2) == "==") {
        toks_.push_back({Tok::kPunct, std::string(text_.substr(i, 2)), i, i + 2});
        i += 2;
      } else if (std::string_view("!?{}()[]<>,.:|-").find(c) != std::string_view::npos) {
        toks_.push_back({Tok::kPunct, std::string(1, c), i, i + 1});
        ++i;
      } else {
        throw_error(i, i + 1, {"token"}, "'" + std::string(1, c) + "'");
      }
    }
    toks_.push_back({Tok::kEof, "", n, n});
  }

  std::string_view text_;
  std::string file_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<std::string> values_;  // value / channel binders in scope
  std::vector<std::string> pvars_;   // process variables in scope
};

}  // namespace detail

inline GlobalType parse_global(std::string_view text, std::string file = "<input>") {
  detail::Parser p(text, std::move(file));
  GlobalType g = p.global();
  p.finish();
  require_closed(g);
  return g;
}

inline LocalType parse_local(std::string_view text, std::string file = "<input>") {
  detail::Parser p(text, std::move(file));
  LocalType t = p.local();
  p.finish();
  require_closed(t);
  return t;
}

inline TypingContext parse_context(std::string_view text, std::string file = "<input>") {
  detail::Parser p(text, std::move(file));
  TypingContext ctx = p.context();
  p.finish();
  return ctx;
}

inline Process parse_process(std::string_view text, std::string file = "<input>") {
  detail::Parser p(text, std::move(file));
  Process proc = p.process();
  p.finish();
  return proc;
}

inline Expr parse_expr(std::string_view text, std::string file = "<input>") {
  detail::Parser p(text, std::move(file));
  Expr e = p.expr();
  p.finish();
  return e;
}

}  // namespace mpst

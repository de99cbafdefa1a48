#pragma once

#include <string>

#include "mpst/core/context.hpp"
#include "mpst/core/types.hpp"
#include "mpst/proc/process.hpp"

namespace mpst {

std::string pretty(const LocalType& t);

inline std::string pretty(const Sort& s) {
  switch (s.kind()) {
    case Sort::Kind::kInt:
      return "int";
    case Sort::Kind::kStr:
      return "str";
    case Sort::Kind::kBool:
      return "bool";
    case Sort::Kind::kUnit:
      return "unit";
    case Sort::Kind::kSession:
      return "<" + pretty(s.session()) + ">";
  }
  return "?";
}

namespace detail {

template <class Branches, class Cont>
std::string pretty_branches(const Branches& branches, Cont&& cont) {
  std::string out = "{ ";
  bool first = true;
  for (const auto& b : branches) {
    if (!first) out += ", ";
    first = false;
    out += b.label.str();
    if (b.sort.kind() != Sort::Kind::kUnit) out += "(" + pretty(b.sort) + ")";
    out += ". " + cont(b.cont);
  }
  return out + " }";
}

inline std::string pretty_local(const LocalType& t, bool show_peer) {
  auto rec = [show_peer](const LocalType& c) { return pretty_local(c, show_peer); };
  switch (t.kind()) {
    case LocalType::Kind::kEnd:
      return "end";
    case LocalType::Kind::kVar:
      return t.var_name();
    case LocalType::Kind::kRec:
      return "rec " + t.var_name() + ". " + rec(t.body());
    case LocalType::Kind::kSelect:
      return (show_peer ? t.peer().str() : "") + "!" + pretty_branches(t.branches(), rec);
    case LocalType::Kind::kBranch:
      return (show_peer ? t.peer().str() : "") + "?" + pretty_branches(t.branches(), rec);
  }
  return "?";
}

}  // namespace detail

/// Canonical text of a local type; reparses to an equal AST.
inline std::string pretty(const LocalType& t) { return detail::pretty_local(t, true); }

/// Local type text with choice peers omitted (`!{...}` / `?{...}`).
inline std::string pretty_peerless(const LocalType& t) { return detail::pretty_local(t, false); }

inline std::string pretty(const GlobalType& g) {
  switch (g.kind()) {
    case GlobalType::Kind::kEnd:
      return "end";
    case GlobalType::Kind::kVar:
      return g.var_name();
    case GlobalType::Kind::kRec:
      return "rec " + g.var_name() + ". " + pretty(g.body());
    case GlobalType::Kind::kComm:
      return g.from().str() + "->" + g.to().str() +
             detail::pretty_branches(g.branches(), [](const GlobalType& c) { return pretty(c); });
  }
  return "?";
}

inline std::string pretty(const TypingContext& ctx) {
  std::string out;
  for (const auto& [e, t] : ctx) {
    if (!out.empty()) out += ", ";
    out += e.str() + ": " + pretty(t);
  }
  return out;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline std::string pretty(const Expr& e) {
  auto operand = [](const Expr& x) {
    bool binary = x.kind() == Expr::Kind::kEq || x.kind() == Expr::Kind::kLt;
    return binary ? "(" + pretty(x) + ")" : pretty(x);
  };
  switch (e.kind()) {
    case Expr::Kind::kInt:
      return std::to_string(e.int_value());
    case Expr::Kind::kStr:
      return quote(e.str_value());
    case Expr::Kind::kBool:
      return e.bool_value() ? "true" : "false";
    case Expr::Kind::kUnit:
      return "()";
    case Expr::Kind::kVar:
      return e.str_value();
    case Expr::Kind::kChan:
      return e.endpoint().str();
    case Expr::Kind::kEq:
      return operand(e.lhs()) + " == " + operand(e.rhs());
    case Expr::Kind::kLt:
      return operand(e.lhs()) + " < " + operand(e.rhs());
  }
  return "?";
}

std::string pretty(const Process& p);

namespace detail {

// Prefix continuations, conditional arms and restriction bodies bind
// tighter than `|`.
inline std::string pretty_tight(const Process& p) {
  return p.kind() == Process::Kind::kPar ? "(" + pretty(p) + ")" : pretty(p);
}

}  // namespace detail

inline std::string pretty(const Process& p) {
  switch (p.kind()) {
    case Process::Kind::kNil:
      return "0";
    case Process::Kind::kSelect:
      return p.chan().str() + "[" + p.peer().str() + "]!" + p.label().str() + "(" +
             (p.arg().kind() == Expr::Kind::kUnit ? "" : pretty(p.arg())) + "). " + detail::pretty_tight(p.cont());
    case Process::Kind::kBranch: {
      std::string out = p.chan().str() + "[" + p.peer().str() + "]?{ ";
      bool first = true;
      for (const auto& a : p.arms()) {
        if (!first) out += ", ";
        first = false;
        out += a.label.str() + "(" + a.binder + "). " + pretty(a.cont);
      }
      return out + " }";
    }
    case Process::Kind::kPar:
      return pretty(p.left()) + " | " + detail::pretty_tight(p.right());
    case Process::Kind::kRes:
      return "(new " + p.name() + ") " + detail::pretty_tight(p.body());
    case Process::Kind::kIf:
      return "if " + pretty(p.guard()) + " then " + detail::pretty_tight(p.then_branch()) +
             " else " + detail::pretty_tight(p.else_branch());
    case Process::Kind::kMu: {
      std::string ann = p.annotation() ? "[" + pretty(*p.annotation()) + "]" : "";
      return "mu " + p.name() + ann + ". " + detail::pretty_tight(p.body());
    }
    case Process::Kind::kVar:
      return p.name();
  }
  return "?";
}

}  // namespace mpst

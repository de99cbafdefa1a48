#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mpst/core/context.hpp"
#include "mpst/core/error.hpp"
#include "mpst/core/names.hpp"
#include "mpst/core/types.hpp"

namespace mpst {

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(std::string name)
      : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

namespace detail {
struct ExprNode;
struct ProcNode;
}  // namespace detail

/// Expression micro-language: base literals, variables, endpoint values
/// (for delegation) and integer `==` / `<`.
class Expr {
 public:
  enum class Kind { kInt, kStr, kBool, kUnit, kVar, kChan, kEq, kLt };

  static Expr integer(std::int64_t v);
  static Expr string(std::string v);
  static Expr boolean(bool v);
  static Expr unit();
  static Expr var(std::string name);
  static Expr chan(Endpoint e);
  static Expr eq(Expr a, Expr b);
  static Expr lt(Expr a, Expr b);

  Kind kind() const;
  std::int64_t int_value() const;
  const std::string& str_value() const;  // kStr value or kVar name
  bool bool_value() const;
  const Endpoint& endpoint() const;
  const Expr& lhs() const;
  const Expr& rhs() const;

  bool is_value() const {
    auto k = kind();
    return k != Kind::kVar && k != Kind::kEq && k != Kind::kLt;
  }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::ExprNode> node_;
};

/// A channel occurrence: a concrete endpoint `s[p]`, or a variable bound by
/// an input of session sort (a received delegation).
struct ChanRef {
  std::variant<Endpoint, std::string> ref;

  bool is_endpoint() const { return std::holds_alternative<Endpoint>(ref); }
  const Endpoint& endpoint() const { return std::get<Endpoint>(ref); }
  const std::string& var() const { return std::get<std::string>(ref); }
  std::string str() const { return is_endpoint() ? endpoint().str() : var(); }

  friend auto operator<=>(const ChanRef&, const ChanRef&) = default;
  friend bool operator==(const ChanRef&, const ChanRef&) = default;
};

struct ProcBranch;

/// Session pi-calculus process.
class Process {
 public:
  enum class Kind { kNil, kSelect, kBranch, kPar, kRes, kIf, kMu, kVar };

  Process() = default;  // 0

  static Process nil() { return Process(); }
  /// `c[to]!label(arg).cont`
  static Process select(ChanRef chan, Role to, Label label, Expr arg, Process cont);
  /// `c[from]?{ l(x).P, ... }`
  static Process branch(ChanRef chan, Role from, std::vector<ProcBranch> arms);
  static Process par(Process left, Process right);
  static Process res(std::string session, Process body);
  static Process cond(Expr guard, Process then_branch, Process else_branch);
  /// `mu X.body` or `mu X[ctx].body`. Rejects unguarded occurrences of X.
  static Process mu(std::string var, std::optional<TypingContext> annotation, Process body);
  static Process var(std::string name);

  Kind kind() const;
  bool is_nil() const { return node_ == nullptr; }

  const ChanRef& chan() const;
  const Role& peer() const;
  const Label& label() const;
  const Expr& arg() const;
  const Process& cont() const;
  const std::vector<ProcBranch>& arms() const;
  const Process& left() const;
  const Process& right() const;
  const std::string& name() const;  // Res session, Mu/Var variable
  const Process& body() const;
  const Expr& guard() const;
  const Process& then_branch() const;
  const Process& else_branch() const;
  const std::optional<TypingContext>& annotation() const;

  friend bool operator==(const Process& a, const Process& b);

 private:
  explicit Process(std::shared_ptr<const detail::ProcNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::ProcNode> node_;
};

struct ProcBranch {
  Label label;
  std::string binder;
  Process cont;
};

namespace detail {

struct ExprNode {
  Expr::Kind kind;
  std::int64_t i = 0;
  bool b = false;
  std::string s;
  std::optional<Endpoint> endpoint;
  std::optional<Expr> lhs, rhs;
};

struct ProcNode {
  Process::Kind kind;
  std::optional<ChanRef> chan;
  std::optional<Role> peer;
  std::optional<Label> label;
  std::optional<Expr> expr;  // Select argument or If guard
  std::vector<ProcBranch> arms;
  std::optional<Process> p1, p2;  // cont / left / body / then ; right / else
  std::string name;
  std::optional<TypingContext> annotation;
};

inline bool unguarded_pvar(const Process& p, const std::string& var) {
  switch (p.kind()) {
    case Process::Kind::kVar:
      return p.name() == var;
    case Process::Kind::kPar:
      return unguarded_pvar(p.left(), var) || unguarded_pvar(p.right(), var);
    case Process::Kind::kRes:
      return unguarded_pvar(p.body(), var);
    case Process::Kind::kIf:
      return unguarded_pvar(p.then_branch(), var) || unguarded_pvar(p.else_branch(), var);
    case Process::Kind::kMu:
      return p.name() != var && unguarded_pvar(p.body(), var);
    default:
      return false;
  }
}

}  // namespace detail

// ---- Expr ----

inline Expr Expr::integer(std::int64_t v) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::kInt;
  n->i = v;
  return Expr(std::move(n));
}
inline Expr Expr::string(std::string v) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::kStr;
  n->s = std::move(v);
  return Expr(std::move(n));
}
inline Expr Expr::boolean(bool v) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::kBool;
  n->b = v;
  return Expr(std::move(n));
}
inline Expr Expr::unit() {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::kUnit;
  return Expr(std::move(n));
}
inline Expr Expr::var(std::string name) {
  if (!is_identifier(name)) throw WellFormednessError("invalid variable '" + name + "'");
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::kVar;
  n->s = std::move(name);
  return Expr(std::move(n));
}
inline Expr Expr::chan(Endpoint e) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::kChan;
  n->endpoint = std::move(e);
  return Expr(std::move(n));
}
inline Expr Expr::eq(Expr a, Expr b) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::kEq;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Expr(std::move(n));
}
inline Expr Expr::lt(Expr a, Expr b) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::kLt;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Expr(std::move(n));
}

inline Expr::Kind Expr::kind() const { return node_->kind; }
inline std::int64_t Expr::int_value() const { return node_->i; }
inline const std::string& Expr::str_value() const { return node_->s; }
inline bool Expr::bool_value() const { return node_->b; }
inline const Endpoint& Expr::endpoint() const { return *node_->endpoint; }
inline const Expr& Expr::lhs() const { return *node_->lhs; }
inline const Expr& Expr::rhs() const { return *node_->rhs; }

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::kInt:
      return a.int_value() == b.int_value();
    case Expr::Kind::kBool:
      return a.bool_value() == b.bool_value();
    case Expr::Kind::kUnit:
      return true;
    case Expr::Kind::kStr:
    case Expr::Kind::kVar:
      return a.str_value() == b.str_value();
    case Expr::Kind::kChan:
      return a.endpoint() == b.endpoint();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

// ---- Process ----

inline Process Process::select(ChanRef chan, Role to, Label label, Expr arg, Process cont) {
  auto n = std::make_shared<detail::ProcNode>();
  n->kind = Kind::kSelect;
  n->chan = std::move(chan);
  n->peer = std::move(to);
  n->label = std::move(label);
  n->expr = std::move(arg);
  n->p1 = std::move(cont);
  return Process(std::move(n));
}

inline Process Process::branch(ChanRef chan, Role from, std::vector<ProcBranch> arms) {
  if (arms.empty()) throw WellFormednessError("empty branch");
  std::set<Label> seen;
  for (const auto& a : arms) {
    if (!seen.insert(a.label).second)
      throw WellFormednessError("duplicate label '" + a.label.str() + "'");
    if (!is_identifier(a.binder)) throw WellFormednessError("invalid binder '" + a.binder + "'");
  }
  auto n = std::make_shared<detail::ProcNode>();
  n->kind = Kind::kBranch;
  n->chan = std::move(chan);
  n->peer = std::move(from);
  n->arms = std::move(arms);
  return Process(std::move(n));
}

inline Process Process::par(Process left, Process right) {
  auto n = std::make_shared<detail::ProcNode>();
  n->kind = Kind::kPar;
  n->p1 = std::move(left);
  n->p2 = std::move(right);
  return Process(std::move(n));
}

inline Process Process::res(std::string session, Process body) {
  if (!is_identifier(session)) throw WellFormednessError("invalid session name '" + session + "'");
  auto n = std::make_shared<detail::ProcNode>();
  n->kind = Kind::kRes;
  n->name = std::move(session);
  n->p1 = std::move(body);
  return Process(std::move(n));
}

inline Process Process::cond(Expr guard, Process then_branch, Process else_branch) {
  auto n = std::make_shared<detail::ProcNode>();
  n->kind = Kind::kIf;
  n->expr = std::move(guard);
  n->p1 = std::move(then_branch);
  n->p2 = std::move(else_branch);
  return Process(std::move(n));
}

inline Process Process::mu(std::string var, std::optional<TypingContext> annotation, Process body) {
  if (!is_identifier(var)) throw WellFormednessError("invalid process variable '" + var + "'");
  if (detail::unguarded_pvar(body, var))
    throw WellFormednessError("unguarded recursion on '" + var + "'");
  auto n = std::make_shared<detail::ProcNode>();
  n->kind = Kind::kMu;
  n->name = std::move(var);
  n->annotation = std::move(annotation);
  n->p1 = std::move(body);
  return Process(std::move(n));
}

inline Process Process::var(std::string name) {
  if (!is_identifier(name)) throw WellFormednessError("invalid process variable '" + name + "'");
  auto n = std::make_shared<detail::ProcNode>();
  n->kind = Kind::kVar;
  n->name = std::move(name);
  return Process(std::move(n));
}

inline Process::Kind Process::kind() const { return node_ ? node_->kind : Kind::kNil; }
inline const ChanRef& Process::chan() const { return *node_->chan; }
inline const Role& Process::peer() const { return *node_->peer; }
inline const Label& Process::label() const { return *node_->label; }
inline const Expr& Process::arg() const { return *node_->expr; }
inline const Process& Process::cont() const { return *node_->p1; }
inline const std::vector<ProcBranch>& Process::arms() const { return node_->arms; }
inline const Process& Process::left() const { return *node_->p1; }
inline const Process& Process::right() const { return *node_->p2; }
inline const std::string& Process::name() const { return node_->name; }
inline const Process& Process::body() const { return *node_->p1; }
inline const Expr& Process::guard() const { return *node_->expr; }
inline const Process& Process::then_branch() const { return *node_->p1; }
inline const Process& Process::else_branch() const { return *node_->p2; }
inline const std::optional<TypingContext>& Process::annotation() const { return node_->annotation; }

inline bool operator==(const Process& a, const Process& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Process::Kind::kNil:
      return true;
    case Process::Kind::kSelect:
      return a.chan() == b.chan() && a.peer() == b.peer() && a.label() == b.label() &&
             a.arg() == b.arg() && a.cont() == b.cont();
    case Process::Kind::kBranch: {
      if (!(a.chan() == b.chan() && a.peer() == b.peer())) return false;
      if (a.arms().size() != b.arms().size()) return false;
      for (size_t i = 0; i < a.arms().size(); ++i) {
        const auto& x = a.arms()[i];
        const auto& y = b.arms()[i];
        if (!(x.label == y.label && x.binder == y.binder && x.cont == y.cont)) return false;
      }
      return true;
    }
    case Process::Kind::kPar:
      return a.left() == b.left() && a.right() == b.right();
    case Process::Kind::kRes:
      return a.name() == b.name() && a.body() == b.body();
    case Process::Kind::kIf:
      return a.guard() == b.guard() && a.then_branch() == b.then_branch() &&
             a.else_branch() == b.else_branch();
    case Process::Kind::kMu:
      return a.name() == b.name() && a.annotation() == b.annotation() && a.body() == b.body();
    case Process::Kind::kVar:
      return a.name() == b.name();
  }
  return false;
}

/// Declaration of a process variable in the process environment.
struct ProcVarDecl {
  std::vector<Sort> params;
  TypingContext annotation;
  /// Types of received channel variables live at the binder.
  std::map<std::string, LocalType> channel_vars;
};

/// Process environment: value variables and process variables, kept in
/// separate namespaces.
struct ProcessEnv {
  std::map<std::string, Sort> values;
  std::map<std::string, ProcVarDecl> processes;
};

/// `theta |- process : guarantee / rely`
struct Judgement {
  ProcessEnv theta;
  TypingContext guarantee;
  TypingContext rely;
  Process process;
};

}  // namespace mpst

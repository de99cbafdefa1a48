#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/core/context.hpp"
#include "mpst/core/error.hpp"
#include "mpst/proc/process.hpp"
#include "mpst/syntax/pretty.hpp"

namespace mpst {

/// A guard that is open or ill-sorted cannot be evaluated.
class StuckExpr : public Error {
 public:
  explicit StuckExpr(const Expr& e) : Error("stuck expression: " + pretty(e)), expr_(e) {}
  const Expr& expr() const { return expr_; }

 private:
  Expr expr_;
};

/// One process reduction: a communication, or an administrative step
/// (conditional, recursion unfolding).
struct ProcAction {
  enum class Kind { kComm, kIf, kMu };

  Kind kind = Kind::kComm;
  std::string session;
  std::optional<Role> from, to;
  std::optional<Label> label;
  std::optional<Expr> value;
  std::string var;  // kMu: unfolded variable

  static ProcAction comm(std::string session, Role from, Role to, Label label, Expr value) {
    ProcAction a;
    a.session = std::move(session);
    a.from = std::move(from);
    a.to = std::move(to);
    a.label = std::move(label);
    a.value = std::move(value);
    return a;
  }
  static ProcAction cond() {
    ProcAction a;
    a.kind = Kind::kIf;
    return a;
  }
  static ProcAction unfold(std::string var) {
    ProcAction a;
    a.kind = Kind::kMu;
    a.var = std::move(var);
    return a;
  }

  std::string str() const {
    switch (kind) {
      case Kind::kIf:
        return "if";
      case Kind::kMu:
        return "mu " + var;
      case Kind::kComm:
        break;
    }
    return session + ": " + from->str() + "->" + to->str() + ": " + label->str() + "(" + pretty(*value) + ")";
  }
};

/// Evaluates a closed expression to a value. Throws StuckExpr.
inline Expr evaluate(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::kVar:
      throw StuckExpr(e);
    case Expr::Kind::kEq:
    case Expr::Kind::kLt: {
      Expr a = evaluate(e.lhs()), b = evaluate(e.rhs());
      if (a.kind() != Expr::Kind::kInt || b.kind() != Expr::Kind::kInt) throw StuckExpr(e);
      return Expr::boolean(e.kind() == Expr::Kind::kEq ? a.int_value() == b.int_value()
                                                       : a.int_value() < b.int_value());
    }
    default:
      return e;
  }
}

// ---------------------------------------------------------------------------
// substitution

/// Sessions restricted somewhere inside `p`, plus every session it mentions.
inline void collect_sessions(const Process& p, std::set<std::string>& out);

namespace detail {

inline void expr_sessions(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == Expr::Kind::kChan) out.insert(e.endpoint().session);
  if (e.kind() == Expr::Kind::kEq || e.kind() == Expr::Kind::kLt) {
    expr_sessions(e.lhs(), out);
    expr_sessions(e.rhs(), out);
  }
}

inline Expr rename_expr(const Expr& e, const std::string& from, const std::string& to) {
  switch (e.kind()) {
    case Expr::Kind::kChan:
      if (e.endpoint().session == from) return Expr::chan(Endpoint(to, e.endpoint().role));
      return e;
    case Expr::Kind::kEq:
      return Expr::eq(rename_expr(e.lhs(), from, to), rename_expr(e.rhs(), from, to));
    case Expr::Kind::kLt:
      return Expr::lt(rename_expr(e.lhs(), from, to), rename_expr(e.rhs(), from, to));
    default:
      return e;
  }
}

inline ChanRef rename_chan(const ChanRef& c, const std::string& from, const std::string& to) {
  if (c.is_endpoint() && c.endpoint().session == from) return ChanRef{Endpoint(to, c.endpoint().role)};
  return c;
}

inline std::optional<TypingContext> rename_ctx(const std::optional<TypingContext>& ctx,
                                               const std::string& from, const std::string& to) {
  if (!ctx) return ctx;
  TypingContext out;
  for (const auto& [e, t] : *ctx) out.add(e.session == from ? Endpoint(to, e.role) : e, t);
  return out;
}

// Renames free occurrences of session `from` to `to`.
inline Process rename_session(const Process& p, const std::string& from, const std::string& to) {
  using K = Process::Kind;
  switch (p.kind()) {
    case K::kNil:
    case K::kVar:
      return p;
    case K::kSelect:
      return Process::select(rename_chan(p.chan(), from, to), p.peer(), p.label(),
                             rename_expr(p.arg(), from, to), rename_session(p.cont(), from, to));
    case K::kBranch: {
      auto arms = p.arms();
      for (auto& a : arms) a.cont = rename_session(a.cont, from, to);
      return Process::branch(rename_chan(p.chan(), from, to), p.peer(), std::move(arms));
    }
    case K::kPar:
      return Process::par(rename_session(p.left(), from, to), rename_session(p.right(), from, to));
    case K::kRes:
      if (p.name() == from) return p;
      return Process::res(p.name(), rename_session(p.body(), from, to));
    case K::kIf:
      return Process::cond(rename_expr(p.guard(), from, to), rename_session(p.then_branch(), from, to),
                           rename_session(p.else_branch(), from, to));
    case K::kMu:
      return Process::mu(p.name(), rename_ctx(p.annotation(), from, to), rename_session(p.body(), from, to));
  }
  return p;
}

inline bool value_var_free(const Process& p, const std::string& x);

inline bool expr_mentions(const Expr& e, const std::string& x) {
  switch (e.kind()) {
    case Expr::Kind::kVar:
      return e.str_value() == x;
    case Expr::Kind::kEq:
    case Expr::Kind::kLt:
      return expr_mentions(e.lhs(), x) || expr_mentions(e.rhs(), x);
    default:
      return false;
  }
}

inline bool value_var_free(const Process& p, const std::string& x) {
  using K = Process::Kind;
  switch (p.kind()) {
    case K::kNil:
    case K::kVar:
      return false;
    case K::kSelect:
      return (!p.chan().is_endpoint() && p.chan().var() == x) || expr_mentions(p.arg(), x) ||
             value_var_free(p.cont(), x);
    case K::kBranch:
      if (!p.chan().is_endpoint() && p.chan().var() == x) return true;
      for (const auto& a : p.arms())
        if (a.binder != x && value_var_free(a.cont, x)) return true;
      return false;
    case K::kPar:
      return value_var_free(p.left(), x) || value_var_free(p.right(), x);
    case K::kRes:
    case K::kMu:
      return value_var_free(p.body(), x);
    case K::kIf:
      return expr_mentions(p.guard(), x) || value_var_free(p.then_branch(), x) ||
             value_var_free(p.else_branch(), x);
  }
  return false;
}

inline Expr subst_expr(const Expr& e, const std::string& x, const Expr& v) {
  switch (e.kind()) {
    case Expr::Kind::kVar:
      return e.str_value() == x ? v : e;
    case Expr::Kind::kEq:
      return Expr::eq(subst_expr(e.lhs(), x, v), subst_expr(e.rhs(), x, v));
    case Expr::Kind::kLt:
      return Expr::lt(subst_expr(e.lhs(), x, v), subst_expr(e.rhs(), x, v));
    default:
      return e;
  }
}

inline std::string fresh_session(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!avoid.contains(cand)) return cand;
  }
}

}  // namespace detail

inline void collect_sessions(const Process& p, std::set<std::string>& out) {
  using K = Process::Kind;
  switch (p.kind()) {
    case K::kNil:
    case K::kVar:
      return;
    case K::kSelect:
      if (p.chan().is_endpoint()) out.insert(p.chan().endpoint().session);
      detail::expr_sessions(p.arg(), out);
      collect_sessions(p.cont(), out);
      return;
    case K::kBranch:
      if (p.chan().is_endpoint()) out.insert(p.chan().endpoint().session);
      for (const auto& a : p.arms()) collect_sessions(a.cont, out);
      return;
    case K::kPar:
      collect_sessions(p.left(), out);
      collect_sessions(p.right(), out);
      return;
    case K::kRes:
      out.insert(p.name());
      collect_sessions(p.body(), out);
      return;
    case K::kIf:
      detail::expr_sessions(p.guard(), out);
      collect_sessions(p.then_branch(), out);
      collect_sessions(p.else_branch(), out);
      return;
    case K::kMu:
      if (p.annotation())
        for (const auto& [e, _] : *p.annotation()) out.insert(e.session);
      collect_sessions(p.body(), out);
      return;
  }
}

/// Substitutes value `v` for the variable `x`. Endpoint values also replace
/// channel occurrences `x[q]`; restrictions that would capture them are
/// renamed.
inline Process substitute_value(const Process& p, const std::string& x, const Expr& v) {
  using K = Process::Kind;
  auto chan = [&](const ChanRef& c) {
    if (!c.is_endpoint() && c.var() == x && v.kind() == Expr::Kind::kChan) return ChanRef{v.endpoint()};
    return c;
  };
  switch (p.kind()) {
    case K::kNil:
    case K::kVar:
      return p;
    case K::kSelect:
      return Process::select(chan(p.chan()), p.peer(), p.label(), detail::subst_expr(p.arg(), x, v),
                             substitute_value(p.cont(), x, v));
    case K::kBranch: {
      auto arms = p.arms();
      for (auto& a : arms)
        if (a.binder != x) a.cont = substitute_value(a.cont, x, v);
      return Process::branch(chan(p.chan()), p.peer(), std::move(arms));
    }
    case K::kPar:
      return Process::par(substitute_value(p.left(), x, v), substitute_value(p.right(), x, v));
    case K::kRes: {
      if (v.kind() == Expr::Kind::kChan && v.endpoint().session == p.name() && detail::value_var_free(p.body(), x)) {
        std::set<std::string> avoid;
        collect_sessions(p.body(), avoid);
        avoid.insert(p.name());
        std::string fresh = detail::fresh_session(p.name(), avoid);
        return Process::res(fresh, substitute_value(detail::rename_session(p.body(), p.name(), fresh), x, v));
      }
      return Process::res(p.name(), substitute_value(p.body(), x, v));
    }
    case K::kIf:
      return Process::cond(detail::subst_expr(p.guard(), x, v), substitute_value(p.then_branch(), x, v),
                           substitute_value(p.else_branch(), x, v));
    case K::kMu:
      return Process::mu(p.name(), p.annotation(), substitute_value(p.body(), x, v));
  }
  return p;
}

/// Replaces free occurrences of process variable `var` by `with`.
inline Process substitute_process(const Process& p, const std::string& var, const Process& with) {
  using K = Process::Kind;
  switch (p.kind()) {
    case K::kNil:
      return p;
    case K::kVar:
      return p.name() == var ? with : p;
    case K::kSelect:
      return Process::select(p.chan(), p.peer(), p.label(), p.arg(), substitute_process(p.cont(), var, with));
    case K::kBranch: {
      auto arms = p.arms();
      for (auto& a : arms) a.cont = substitute_process(a.cont, var, with);
      return Process::branch(p.chan(), p.peer(), std::move(arms));
    }
    case K::kPar:
      return Process::par(substitute_process(p.left(), var, with), substitute_process(p.right(), var, with));
    case K::kRes:
      return Process::res(p.name(), substitute_process(p.body(), var, with));
    case K::kIf:
      return Process::cond(p.guard(), substitute_process(p.then_branch(), var, with),
                           substitute_process(p.else_branch(), var, with));
    case K::kMu:
      if (p.name() == var) return p;
      return Process::mu(p.name(), p.annotation(), substitute_process(p.body(), var, with));
  }
  return p;
}

// ---------------------------------------------------------------------------
// reduction

namespace detail {

// A top-level thread: a non-Par, non-Res subterm reached through Par/Res
// nodes. `scopes` maps each restricted session name in scope to the path of
// its binder, so equal names under different binders never synchronise.
struct Thread {
  std::vector<int> path;
  Process proc;
  std::map<std::string, std::string> scopes;
};

inline std::string path_key(const std::vector<int>& path) {
  std::string out = "/";
  for (int d : path) out += static_cast<char>('0' + d);
  return out;
}

inline void collect_threads(const Process& p, std::vector<int>& path, std::map<std::string, std::string>& scopes,
                            std::vector<Thread>& out) {
  switch (p.kind()) {
    case Process::Kind::kPar:
      path.push_back(0);
      collect_threads(p.left(), path, scopes, out);
      path.back() = 1;
      collect_threads(p.right(), path, scopes, out);
      path.pop_back();
      return;
    case Process::Kind::kRes: {
      auto saved = scopes;
      scopes[p.name()] = path_key(path);
      path.push_back(0);
      collect_threads(p.body(), path, scopes, out);
      path.pop_back();
      scopes = std::move(saved);
      return;
    }
    default:
      out.push_back({path, p, scopes});
  }
}

inline Process replace_at(const Process& p, const std::vector<int>& path, size_t i, const Process& with) {
  if (i == path.size()) return with;
  if (p.kind() == Process::Kind::kPar) {
    return path[i] == 0 ? Process::par(replace_at(p.left(), path, i + 1, with), p.right())
                        : Process::par(p.left(), replace_at(p.right(), path, i + 1, with));
  }
  return Process::res(p.name(), replace_at(p.body(), path, i + 1, with));
}

inline std::string scope_of(const Thread& t, const std::string& session) {
  auto it = t.scopes.find(session);
  return it == t.scopes.end() ? "" : it->second;
}

}  // namespace detail

/// All one-step reducts of `p`, in thread order. Throws StuckExpr when a
/// conditional guard cannot be evaluated.
inline std::vector<std::pair<ProcAction, Process>> proc_step(const Process& p) {
  std::vector<detail::Thread> threads;
  std::vector<int> path;
  std::map<std::string, std::string> scopes;
  detail::collect_threads(p, path, scopes, threads);

  std::vector<std::pair<ProcAction, Process>> out;
  for (const auto& t : threads) {
    const Process& q = t.proc;
    switch (q.kind()) {
      case Process::Kind::kIf: {
        Expr g = evaluate(q.guard());
        if (g.kind() != Expr::Kind::kBool) throw StuckExpr(q.guard());
        out.emplace_back(ProcAction::cond(),
                         detail::replace_at(p, t.path, 0, g.bool_value() ? q.then_branch() : q.else_branch()));
        break;
      }
      case Process::Kind::kMu:
        out.emplace_back(ProcAction::unfold(q.name()),
                         detail::replace_at(p, t.path, 0, substitute_process(q.body(), q.name(), q)));
        break;
      case Process::Kind::kSelect: {
        if (!q.chan().is_endpoint()) break;
        const Endpoint& src = q.chan().endpoint();
        for (const auto& r : threads) {
          const Process& b = r.proc;
          if (b.kind() != Process::Kind::kBranch || !b.chan().is_endpoint()) continue;
          const Endpoint& dst = b.chan().endpoint();
          if (dst.session != src.session || dst.role != q.peer() || b.peer() != src.role) continue;
          if (detail::scope_of(t, src.session) != detail::scope_of(r, dst.session)) continue;
          const ProcBranch* arm = nullptr;
          for (const auto& a : b.arms())
            if (a.label == q.label()) arm = &a;
          if (!arm) continue;
          Expr v = evaluate(q.arg());
          Process next = detail::replace_at(p, t.path, 0, q.cont());
          next = detail::replace_at(next, r.path, 0, substitute_value(arm->cont, arm->binder, v));
          out.emplace_back(ProcAction::comm(src.session, src.role, q.peer(), q.label(), v), std::move(next));
        }
        break;
      }
      default:
        break;
    }
  }
  return out;
}

}  // namespace mpst

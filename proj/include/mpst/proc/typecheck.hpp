#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/core/context.hpp"
#include "mpst/core/ops.hpp"
#include "mpst/proc/process.hpp"
#include "mpst/safety.hpp"
#include "mpst/semantics.hpp"
#include "mpst/syntax/pretty.hpp"

namespace mpst {

/// Where the liveness side condition on `guarantee ∘ rely` is enforced.
enum class LivenessAt {
  kRes,        // at every restriction only
  kTop,        // on the whole context only
  kResAndTop,  // both (default)
  kAll,        // at every restriction, every parallel composition, and the top
};

struct TypecheckOptions {
  LivenessAt liveness_at = LivenessAt::kResAndTop;
  SemanticsOptions semantics;
};

/// Failed typing rule. `kind()` names the error class (LabelNotInType,
/// SortMismatch, SplitNotFound, ...).
class TypeError : public Error {
 public:
  TypeError(std::string rule, std::string kind, std::string message, std::string path)
      : Error(RuleWitness{rule, kind, message, path}.str()),
        rule_(std::move(rule)),
        kind_(std::move(kind)),
        message_(std::move(message)),
        path_(std::move(path)) {}

  const std::string& rule() const { return rule_; }
  const std::string& kind() const { return kind_; }
  const std::string& message() const { return message_; }
  const std::string& path() const { return path_; }

  RuleWitness witness() const { return {rule_, kind_, message_, path_}; }

 private:
  std::string rule_, kind_, message_, path_;
};

namespace detail {

using ChanCtx = std::map<ChanRef, LocalType>;

inline ChanCtx to_chan_ctx(const TypingContext& ctx) {
  ChanCtx out;
  for (const auto& [e, t] : ctx) out.emplace(ChanRef{e}, t);
  return out;
}

inline TypingContext endpoints_of(const ChanCtx& ctx) {
  TypingContext out;
  for (const auto& [c, t] : ctx)
    if (c.is_endpoint()) out.add(c.endpoint(), t);
  return out;
}

// Same obligations: entries that are not `end` coincide up to mutual
// subtyping; `end` entries may be missing on either side.
inline bool equivalent(const ChanCtx& a, const ChanCtx& b) {
  for (const auto& [c, t] : a) {
    auto it = b.find(c);
    if (it == b.end()) {
      if (!unfolds_to_end(t)) return false;
    } else if (!subtype(t, it->second) || !subtype(it->second, t)) {
      return false;
    }
  }
  for (const auto& [c, t] : b)
    if (!a.contains(c) && !unfolds_to_end(t)) return false;
  return true;
}

class Checker {
 public:
  explicit Checker(const TypecheckOptions& opts) : opts_(opts) {}

  void check(const Process& p, const ProcessEnv& theta, ChanCtx g, const ChanCtx& r, const std::string& path) {
    using K = Process::Kind;
    switch (p.kind()) {
      case K::kNil:
        for (const auto& [c, t] : g)
          if (!unfolds_to_end(t))
            fail("T-NIL", "EndpointNotEnded", c.str() + " still has type '" + pretty(t) + "'", path);
        return;
      case K::kSelect:
        return check_select(p, theta, std::move(g), r, path);
      case K::kBranch:
        return check_branch(p, theta, std::move(g), r, path);
      case K::kPar:
        return check_par(p, theta, g, r, path);
      case K::kRes: {
        if (opts_.liveness_at != LivenessAt::kTop) {
          ChanCtx all = g;
          all.insert(r.begin(), r.end());
          require_live("T-RES", endpoints_of(all).restrict_to(p.name()), path);
        }
        return check(p.body(), theta, std::move(g), r, join(path, "new " + p.name()));
      }
      case K::kIf: {
        Sort s = sort_of(p.guard(), theta, g, "T-IF", path);
        if (s.kind() != Sort::Kind::kBool)
          fail("T-IF", "SortMismatch", "guard '" + pretty(p.guard()) + "' has sort " + pretty(s), path);
        check(p.then_branch(), theta, g, r, join(path, "then"));
        check(p.else_branch(), theta, std::move(g), r, join(path, "else"));
        return;
      }
      case K::kMu: {
        ProcVarDecl decl;
        if (p.annotation()) {
          ChanCtx ann = to_chan_ctx(*p.annotation());
          if (!equivalent(ann, g))
            fail("T-MU", "AnnotationMismatch",
                 "annotation of " + p.name() + " does not match the channels' current types", path);
        }
        decl.annotation = endpoints_of(g);
        for (const auto& [c, t] : g)
          if (!c.is_endpoint()) decl.channel_vars.emplace(c.var(), t);
        ProcessEnv inner = theta;
        inner.processes.insert_or_assign(p.name(), std::move(decl));
        return check(p.body(), inner, std::move(g), r, join(path, "mu " + p.name()));
      }
      case K::kVar: {
        auto it = theta.processes.find(p.name());
        if (it == theta.processes.end())
          fail("T-PVAR", "UnboundVariable", "process variable " + p.name(), path);
        if (!equivalent(annotation_ctx(it->second), g))
          fail("T-PVAR", "AnnotationMismatch",
               "channels do not return to the types declared at mu " + p.name(), path);
        return;
      }
    }
  }

  // Free channels of `p`; recursion variables contribute their declared
  // channels.
  static void free_channels(const Process& p, const ProcessEnv& theta, std::set<std::string>& bound,
                            std::set<ChanRef>& out) {
    using K = Process::Kind;
    auto use = [&](const ChanRef& c) {
      if (c.is_endpoint() || !bound.contains(c.var())) out.insert(c);
    };
    auto use_expr = [&](auto&& self, const Expr& e) -> void {
      if (e.kind() == Expr::Kind::kChan) out.insert(ChanRef{e.endpoint()});
      if (e.kind() == Expr::Kind::kVar && !bound.contains(e.str_value())) out.insert(ChanRef{e.str_value()});
      if (e.kind() == Expr::Kind::kEq || e.kind() == Expr::Kind::kLt) {
        self(self, e.lhs());
        self(self, e.rhs());
      }
    };
    switch (p.kind()) {
      case K::kNil:
        return;
      case K::kSelect:
        use(p.chan());
        use_expr(use_expr, p.arg());
        free_channels(p.cont(), theta, bound, out);
        return;
      case K::kBranch:
        use(p.chan());
        for (const auto& a : p.arms()) {
          bool fresh = bound.insert(a.binder).second;
          free_channels(a.cont, theta, bound, out);
          if (fresh) bound.erase(a.binder);
        }
        return;
      case K::kPar:
        free_channels(p.left(), theta, bound, out);
        free_channels(p.right(), theta, bound, out);
        return;
      case K::kRes:
        free_channels(p.body(), theta, bound, out);
        return;
      case K::kIf:
        use_expr(use_expr, p.guard());
        free_channels(p.then_branch(), theta, bound, out);
        free_channels(p.else_branch(), theta, bound, out);
        return;
      case K::kMu:
        if (p.annotation())
          for (const auto& [e, t] : *p.annotation())
            if (!unfolds_to_end(t)) out.insert(ChanRef{e});
        free_channels(p.body(), theta, bound, out);
        return;
      case K::kVar: {
        auto it = theta.processes.find(p.name());
        if (it == theta.processes.end()) return;
        for (const auto& [e, t] : it->second.annotation)
          if (!unfolds_to_end(t)) out.insert(ChanRef{e});
        for (const auto& [v, t] : it->second.channel_vars)
          if (!unfolds_to_end(t)) out.insert(ChanRef{v});
        return;
      }
    }
  }

  void require_live(const std::string& rule, const TypingContext& ctx, const std::string& path) {
    Verdict v = is_live(ctx, opts_.semantics);
    if (v.holds) return;
    const auto& w = std::get<TraceWitness>(v.witness);
    std::string msg = "context '" + pretty(ctx) + "' is not live";
    if (w.stuck) msg += ": " + w.stuck->str() + " can never fire";
    fail(rule, "ContextNotLive", msg, path);
  }

  [[noreturn]] static void fail(std::string rule, std::string kind, std::string message, const std::string& path) {
    throw TypeError(std::move(rule), std::move(kind), std::move(message), path);
  }

 private:
  static std::string join(const std::string& path, const std::string& step) {
    return path.empty() ? step : path + " / " + step;
  }

  static ChanCtx annotation_ctx(const ProcVarDecl& d) {
    ChanCtx out = to_chan_ctx(d.annotation);
    for (const auto& [v, t] : d.channel_vars) out.emplace(ChanRef{v}, t);
    return out;
  }

  Sort sort_of(const Expr& e, const ProcessEnv& theta, const ChanCtx& g, const char* rule, const std::string& path) {
    switch (e.kind()) {
      case Expr::Kind::kInt:
        return Sort::Int();
      case Expr::Kind::kStr:
        return Sort::Str();
      case Expr::Kind::kBool:
        return Sort::Bool();
      case Expr::Kind::kUnit:
        return Sort::Unit();
      case Expr::Kind::kVar: {
        if (auto it = theta.values.find(e.str_value()); it != theta.values.end()) return it->second;
        if (auto it = g.find(ChanRef{e.str_value()}); it != g.end()) return Sort::Session(it->second);
        fail(rule, "UnboundVariable", "variable " + e.str_value(), path);
      }
      case Expr::Kind::kChan: {
        auto it = g.find(ChanRef{e.endpoint()});
        if (it == g.end()) fail(rule, "UnknownEndpoint", e.endpoint().str() + " is not in the guarantee context", path);
        return Sort::Session(it->second);
      }
      case Expr::Kind::kEq:
      case Expr::Kind::kLt: {
        Sort a = sort_of(e.lhs(), theta, g, rule, path);
        Sort b = sort_of(e.rhs(), theta, g, rule, path);
        if (a.kind() != Sort::Kind::kInt || b.kind() != Sort::Kind::kInt)
          fail(rule, "SortMismatch", "operands of '" + pretty(e) + "' must be int", path);
        return Sort::Bool();
      }
    }
    return Sort::Unit();
  }

  LocalType lookup(const ChanCtx& g, const ChanRef& c, const char* rule, const std::string& path) {
    auto it = g.find(c);
    if (it == g.end()) fail(rule, "UnknownEndpoint", c.str() + " is not in the guarantee context", path);
    return unfold_all(it->second);
  }

  void check_select(const Process& p, const ProcessEnv& theta, ChanCtx g, const ChanCtx& r, const std::string& path) {
    std::string here = join(path, p.chan().str() + "[" + p.peer().str() + "]!" + p.label().str());
    LocalType t = lookup(g, p.chan(), "T-SEL", path);
    if (t.kind() != LocalType::Kind::kSelect || t.peer() != p.peer())
      fail("T-SEL", "ActionMismatch",
           p.chan().str() + " has type '" + pretty(t) + "', not an output to " + p.peer().str(), path);
    // Subsumption: the singleton choice {label} is a subtype of `t`.
    const LocalBranch* b = t.find(p.label());
    if (!b) fail("T-SEL", "LabelNotInType", "label " + p.label().str() + " not offered by '" + pretty(t) + "'", path);
    if (b->sort.is_session()) {
      std::optional<ChanRef> delegated;
      if (p.arg().kind() == Expr::Kind::kChan) delegated = ChanRef{p.arg().endpoint()};
      if (p.arg().kind() == Expr::Kind::kVar && !theta.values.contains(p.arg().str_value()))
        delegated = ChanRef{p.arg().str_value()};
      if (!delegated) fail("T-SEL", "SortMismatch", "payload of " + p.label().str() + " must be a channel", path);
      if (*delegated == p.chan()) fail("T-SEL", "SortMismatch", "a channel cannot be sent over itself", path);
      LocalType carried = lookup(g, *delegated, "T-SEL", path);
      if (!subtype(carried, b->sort.session()) || !subtype(b->sort.session(), carried))
        fail("T-SEL", "SortMismatch",
             delegated->str() + " has type '" + pretty(g.at(*delegated)) + "', expected '" +
                 pretty(b->sort.session()) + "'",
             path);
      g.erase(*delegated);
    } else {
      Sort s = sort_of(p.arg(), theta, g, "T-SEL", path);
      if (!(s == b->sort))
        fail("T-SEL", "SortMismatch",
             "argument '" + pretty(p.arg()) + "' has sort " + pretty(s) + ", expected " + pretty(b->sort), path);
    }
    g.insert_or_assign(p.chan(), b->cont);
    check(p.cont(), theta, std::move(g), r, here);
  }

  void check_branch(const Process& p, const ProcessEnv& theta, ChanCtx g, const ChanCtx& r, const std::string& path) {
    LocalType t = lookup(g, p.chan(), "T-BRA", path);
    if (t.kind() != LocalType::Kind::kBranch || t.peer() != p.peer())
      fail("T-BRA", "ActionMismatch",
           p.chan().str() + " has type '" + pretty(t) + "', not an input from " + p.peer().str(), path);
    for (const auto& tb : t.branches()) {
      const ProcBranch* arm = nullptr;
      for (const auto& a : p.arms())
        if (a.label == tb.label) arm = &a;
      if (!arm) fail("T-BRA", "MissingBranch", "no arm for label " + tb.label.str(), path);
      std::string here = join(path, p.chan().str() + "[" + p.peer().str() + "]?" + tb.label.str());
      ProcessEnv inner = theta;
      ChanCtx g2 = g;
      g2.insert_or_assign(p.chan(), tb.cont);
      if (tb.sort.is_session()) {
        if (g2.contains(ChanRef{arm->binder}))
          fail("T-BRA", "ShadowedChannel", "binder " + arm->binder + " shadows a live channel", path);
        inner.values.erase(arm->binder);
        g2.emplace(ChanRef{arm->binder}, tb.sort.session());
      } else {
        if (g2.contains(ChanRef{arm->binder}))
          fail("T-BRA", "ShadowedChannel", "binder " + arm->binder + " shadows a live channel", path);
        inner.values.insert_or_assign(arm->binder, tb.sort);
      }
      check(arm->cont, inner, std::move(g2), r, here);
    }
  }

  void check_par(const Process& p, const ProcessEnv& theta, const ChanCtx& g, const ChanCtx& r, const std::string& path) {
    if (opts_.liveness_at == LivenessAt::kAll) {
      ChanCtx all = g;
      all.insert(r.begin(), r.end());
      require_live("T-PAR", endpoints_of(all), path);
    }
    std::set<ChanRef> left_uses, right_uses;
    std::set<std::string> bound;
    free_channels(p.left(), theta, bound, left_uses);
    free_channels(p.right(), theta, bound, right_uses);

    ChanCtx left, right;
    std::vector<ChanRef> open;  // unused, not ended: either side
    for (const auto& [c, t] : g) {
      bool l = left_uses.contains(c), rr = right_uses.contains(c);
      if (l && rr) fail("T-PAR", "SplitNotFound", c.str() + " is used by both parallel components", path);
      if (l) {
        left.emplace(c, t);
      } else if (rr) {
        right.emplace(c, t);
      } else if (unfolds_to_end(t)) {
        left.emplace(c, t);
      } else {
        open.push_back(c);
      }
    }

    size_t combos = size_t{1} << open.size();
    std::optional<TypeError> first_error;
    for (size_t mask = 0; mask < combos; ++mask) {
      ChanCtx l = left, rt = right;
      for (size_t i = 0; i < open.size(); ++i) (mask >> i & 1 ? rt : l).emplace(open[i], g.at(open[i]));
      ChanCtx rely_l = rt, rely_r = l;
      rely_l.insert(r.begin(), r.end());
      rely_r.insert(r.begin(), r.end());
      try {
        check(p.left(), theta, l, rely_l, join(path, "par.left"));
        check(p.right(), theta, rt, rely_r, join(path, "par.right"));
        return;
      } catch (const TypeError& e) {
        if (!first_error) first_error = e;
      }
    }
    if (combos == 1) throw *first_error;
    fail("T-PAR", "SplitNotFound",
         "no split of " + std::to_string(open.size()) + " unused endpoint(s) types both components (first failure: " +
             first_error->what() + ")",
         path);
  }

  const TypecheckOptions& opts_;
};

}  // namespace detail

/// Decides `theta |- process : guarantee / rely`. The verdict's witness is
/// the failing rule instance.
inline Verdict typecheck(const Judgement& j, const TypecheckOptions& opts = {}) {
  Verdict v;
  v.property = Property::kTyping;
  try {
    for (const auto& [e, _] : j.guarantee)
      if (j.rely.contains(e))
        detail::Checker::fail("T-JUDGE", "OverlappingEndpoint", e.str() + " is in both guarantee and rely", "");
    detail::Checker checker(opts);
    checker.check(j.process, j.theta, detail::to_chan_ctx(j.guarantee), detail::to_chan_ctx(j.rely), "");
  } catch (const TypeError& e) {
    v.holds = false;
    v.witness = e.witness();
  }
  return v;
}

/// `typecheck` preceded by the top-level side condition: `guarantee ∘ rely`
/// must be live (skipped when liveness is only checked at restrictions).
inline Verdict check_judgement(const Judgement& j, const TypecheckOptions& opts = {}) {
  bool overlap = false;
  for (const auto& [e, _] : j.guarantee) overlap = overlap || j.rely.contains(e);
  if (!overlap && opts.liveness_at != LivenessAt::kRes) {
    Verdict live = is_live(compose(j.guarantee, j.rely), opts.semantics);
    if (!live.holds) {
      const auto& w = std::get<TraceWitness>(live.witness);
      std::string msg = "context is not live";
      if (w.stuck) msg += ": " + w.stuck->str() + " can never fire";
      Verdict v;
      v.property = Property::kTyping;
      v.holds = false;
      v.states_explored = live.states_explored;
      v.witness = RuleWitness{"T-TOP", "ContextNotLive", msg, ""};
      return v;
    }
  }
  return typecheck(j, opts);
}

/// Closed system against `ctx` with an empty rely context.
inline Verdict check_system(const Process& p, const TypingContext& ctx, const TypecheckOptions& opts = {}) {
  return check_judgement(Judgement{ProcessEnv{}, ctx, TypingContext{}, p}, opts);
}

}  // namespace mpst

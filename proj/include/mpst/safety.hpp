#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mpst/core/context.hpp"
#include "mpst/core/error.hpp"
#include "mpst/core/ops.hpp"
#include "mpst/core/types.hpp"
#include "mpst/semantics.hpp"
#include "mpst/syntax/pretty.hpp"

namespace mpst {

enum class Property { kLiveness, kConsistency, kDeadlockFreedom, kTyping };

inline std::string to_string(Property p) {
  switch (p) {
    case Property::kLiveness:
      return "liveness";
    case Property::kConsistency:
      return "consistency";
    case Property::kDeadlockFreedom:
      return "deadlock-freedom";
    case Property::kTyping:
      return "typing";
  }
  return "?";
}

/// Counterexample for liveness or deadlock-freedom: a reachable state, the
/// endpoint that can never fire there, and a trace from the initial context.
struct TraceWitness {
  TypingContext state;
  std::optional<Endpoint> stuck;
  std::vector<CtxAction> trace;
};

/// Counterexample for consistency: the first endpoint pair whose partial
/// projections are undefined or not dual.
struct PairWitness {
  Endpoint first;
  Endpoint second;
  std::string reason;
  std::optional<LocalType> first_partial;
  std::optional<LocalType> second_partial;
};

/// Failing typing rule instance.
struct RuleWitness {
  std::string rule;   // e.g. "T-SEL"
  std::string error;  // e.g. "LabelNotInType"
  std::string message;
  std::string path;   // subterm path from the root process

  std::string str() const { return rule + ": " + error + ": " + message + (path.empty() ? "" : " at " + path); }
};

struct Verdict {
  Property property = Property::kLiveness;
  bool holds = true;
  std::variant<std::monostate, TraceWitness, PairWitness, RuleWitness> witness;
  size_t states_explored = 0;

  explicit operator bool() const { return holds; }
};

// ---------------------------------------------------------------------------
// liveness / deadlock freedom

namespace detail {

// Path from the initial state to `target` along discovery edges.
inline std::vector<CtxAction> trace_to(const CtxLTS& lts, size_t target) {
  std::vector<std::optional<size_t>> parent(lts.num_states());
  std::vector<bool> seen(lts.num_states(), false);
  seen[lts.initial] = true;
  for (size_t i = 0; i < lts.edges.size(); ++i) {
    size_t dst = lts.edges[i].dst;
    if (!seen[dst]) {
      seen[dst] = true;
      parent[dst] = i;
    }
  }
  std::vector<CtxAction> trace;
  for (size_t s = target; parent[s]; s = lts.edges[*parent[s]].src) trace.push_back(lts.edges[*parent[s]].action);
  std::reverse(trace.begin(), trace.end());
  return trace;
}

inline Verdict trace_failure(Property property, const CtxLTS& lts, size_t state,
                             std::optional<Endpoint> stuck) {
  Verdict v;
  v.property = property;
  v.holds = false;
  v.states_explored = lts.num_states();
  v.witness = TraceWitness{lts.states[state], std::move(stuck), trace_to(lts, state)};
  return v;
}

}  // namespace detail

/// Liveness over an already-computed LTS: every pending endpoint in every
/// reachable state can eventually take part in a synchronisation.
inline Verdict is_live(const CtxLTS& lts) {
  std::set<Endpoint> endpoints;
  for (const auto& s : lts.states)
    for (const auto& [e, _] : s) endpoints.insert(e);

  // pred[dst] lists source states
  std::vector<std::vector<size_t>> pred(lts.num_states());
  for (const auto& e : lts.edges) pred[e.dst].push_back(e.src);

  std::map<Endpoint, std::vector<bool>> can_fire;
  for (const auto& ep : endpoints) {
    std::vector<bool> mark(lts.num_states(), false);
    std::vector<size_t> work;
    for (const auto& e : lts.edges)
      if (e.action.involves(ep) && !mark[e.src]) {
        mark[e.src] = true;
        work.push_back(e.src);
      }
    while (!work.empty()) {
      size_t s = work.back();
      work.pop_back();
      for (size_t p : pred[s])
        if (!mark[p]) {
          mark[p] = true;
          work.push_back(p);
        }
    }
    can_fire.emplace(ep, std::move(mark));
  }

  for (size_t s = 0; s < lts.num_states(); ++s)
    for (const auto& [ep, _] : lts.states[s])
      if (!can_fire.at(ep)[s]) return detail::trace_failure(Property::kLiveness, lts, s, ep);

  Verdict v;
  v.property = Property::kLiveness;
  v.states_explored = lts.num_states();
  return v;
}

/// Throws StateLimitExceeded.
inline Verdict is_live(const TypingContext& ctx, const SemanticsOptions& opts = {}) {
  return is_live(reachable(ctx, opts));
}

inline Verdict is_deadlock_free(const CtxLTS& lts) {
  for (size_t s = 0; s < lts.num_states(); ++s) {
    const auto& state = lts.states[s];
    if (!state.empty() && lts.out[s].empty())
      return detail::trace_failure(Property::kDeadlockFreedom, lts, s, state.begin()->first);
  }
  Verdict v;
  v.property = Property::kDeadlockFreedom;
  v.states_explored = lts.num_states();
  return v;
}

/// Every reachable state is final or can move. Throws StateLimitExceeded.
inline Verdict is_deadlock_free(const TypingContext& ctx, const SemanticsOptions& opts = {}) {
  return is_deadlock_free(reachable(ctx, opts));
}

// ---------------------------------------------------------------------------
// consistency

/// A local type restricted to the interactions with one peer. The peer is
/// implicit; `type` keeps it in its choices so the usual operations apply.
struct PartialLocalType {
  Role peer;
  LocalType type;

  std::string str() const { return pretty_peerless(type); }
  friend bool operator==(const PartialLocalType& a, const PartialLocalType& b) {
    return a.peer == b.peer && a.type == b.type;
  }
};

class PartialUndefined : public Error {
 public:
  PartialUndefined(Role onto, std::vector<std::string> path, LocalType a, LocalType b)
      : Error("partial projection onto " + onto.str() + " undefined at " + render(path) + ": '" +
              pretty_peerless(a) + "' vs '" + pretty_peerless(b) + "'"),
        onto_(std::move(onto)),
        path_(std::move(path)),
        left_(std::move(a)),
        right_(std::move(b)) {}

  const Role& onto() const { return onto_; }
  const std::vector<std::string>& path() const { return path_; }
  const LocalType& left() const { return left_; }
  const LocalType& right() const { return right_; }

 private:
  static std::string render(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& s : path) out += (out.empty() ? "" : "/") + s;
    return out.empty() ? "<root>" : out;
  }

  Role onto_;
  std::vector<std::string> path_;
  LocalType left_, right_;
};

namespace detail {

inline LocalType partial_at(const LocalType& s, const Role& onto, std::vector<std::string>& path) {
  switch (s.kind()) {
    case LocalType::Kind::kEnd:
    case LocalType::Kind::kVar:
      return s;
    case LocalType::Kind::kRec: {
      LocalType body = partial_at(s.body(), onto, path);
      if (body.kind() == LocalType::Kind::kVar && body.var_name() == s.var_name()) return LocalType::end();
      if (!free_vars(body).contains(s.var_name())) return body;
      return LocalType::rec(s.var_name(), std::move(body));
    }
    default:
      break;
  }
  const char* dir = s.kind() == LocalType::Kind::kSelect ? "!" : "?";
  auto step = [&](const LocalBranch& b) {
    path.push_back(s.peer().str() + dir + b.label.str());
    LocalType t = partial_at(b.cont, onto, path);
    path.pop_back();
    return t;
  };
  if (s.peer() == onto) {
    std::vector<LocalBranch> out;
    for (const auto& b : s.branches()) out.push_back({b.label, b.sort, step(b)});
    return s.kind() == LocalType::Kind::kSelect ? LocalType::select(onto, std::move(out))
                                                : LocalType::branch(onto, std::move(out));
  }
  // Interactions with other peers are erased; every alternative must leave
  // the same behaviour toward `onto`.
  std::optional<LocalType> first;
  for (const auto& b : s.branches()) {
    LocalType t = step(b);
    if (!first) {
      first = std::move(t);
    } else if (!(*first == t)) {
      throw PartialUndefined(onto, path, *first, t);
    }
  }
  return *first;
}

class DualChecker {
 public:
  bool check(const LocalType& a, const LocalType& b) {
    if (!assumed_.emplace(a, b).second) return true;
    LocalType ua = unfold_all(a), ub = unfold_all(b);
    if (ua.is_end() || ub.is_end()) return ua.is_end() && ub.is_end();
    bool opposite = (ua.kind() == LocalType::Kind::kSelect && ub.kind() == LocalType::Kind::kBranch) ||
                    (ua.kind() == LocalType::Kind::kBranch && ub.kind() == LocalType::Kind::kSelect);
    if (!opposite || ua.branches().size() != ub.branches().size()) return false;
    for (const auto& x : ua.branches()) {
      const LocalBranch* y = ub.find(x.label);
      if (!y || !sort_equiv(x.sort, y->sort) || !check(x.cont, y->cont)) return false;
    }
    return true;
  }

 private:
  std::set<std::pair<LocalType, LocalType>> assumed_;
};

}  // namespace detail

/// Restriction of `s` to its interactions with `onto`. Sibling branches that
/// differ after erasing other peers make it undefined (PartialUndefined).
inline PartialLocalType partial_project(const LocalType& s, const Role& onto) {
  std::vector<std::string> path;
  return {onto, detail::partial_at(s, onto, path)};
}

/// Exact duality of two partial types: outputs against inputs with the same
/// labels and sorts, dual continuations; `end` is self-dual.
inline bool dual(const PartialLocalType& a, const PartialLocalType& b) {
  return detail::DualChecker{}.check(a.type, b.type);
}

/// Pairwise duality of the partial projections of every two endpoints of the
/// same session.
inline Verdict is_consistent(const TypingContext& ctx) {
  Verdict v;
  v.property = Property::kConsistency;
  std::vector<std::pair<Endpoint, LocalType>> entries(ctx.begin(), ctx.end());
  for (size_t i = 0; i < entries.size(); ++i) {
    for (size_t j = i + 1; j < entries.size(); ++j) {
      const auto& [ep, tp] = entries[i];
      const auto& [eq, tq] = entries[j];
      if (ep.session != eq.session) continue;
      PairWitness w{ep, eq, "", std::nullopt, std::nullopt};
      try {
        PartialLocalType a = partial_project(tp, eq.role);
        w.first_partial = a.type;
        PartialLocalType b = partial_project(tq, ep.role);
        w.second_partial = b.type;
        if (dual(a, b)) continue;
        w.reason = "partial projections '" + a.str() + "' and '" + b.str() + "' are not dual";
      } catch (const PartialUndefined& e) {
        w.reason = e.what();
      }
      v.holds = false;
      v.witness = std::move(w);
      return v;
    }
  }
  return v;
}

}  // namespace mpst

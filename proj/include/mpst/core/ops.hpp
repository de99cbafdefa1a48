#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/core/types.hpp"

namespace mpst {

/// Replaces free occurrences of `var` in `t` by `with`. `with` must be closed.
template <class T>
T substitute(const T& t, const std::string& var, const T& with) {
  switch (t.kind()) {
    case T::Kind::kEnd:
      return t;
    case T::Kind::kVar:
      return t.var_name() == var ? with : t;
    case T::Kind::kRec:
      if (t.var_name() == var) return t;
      return T::rec(t.var_name(), substitute(t.body(), var, with));
    default:
      break;
  }
  auto branches = t.branches();
  for (auto& b : branches) b.cont = substitute(b.cont, var, with);
  if constexpr (std::is_same_v<T, LocalType>) {
    return t.kind() == T::Kind::kSelect ? T::select(t.peer(), std::move(branches))
                                        : T::branch(t.peer(), std::move(branches));
  } else {
    return T::comm(t.from(), t.to(), std::move(branches));
  }
}

/// One-step recursion unfolding: `rec X.B` becomes `B[rec X.B / X]`; any
/// other type is returned unchanged.
template <class T>
T unfold(const T& t) {
  if (t.kind() != T::Kind::kRec) return t;
  return substitute(t.body(), t.var_name(), t);
}

/// Unfolds until the head is not a `rec`. Terminates on contractive types.
template <class T>
T unfold_all(T t) {
  while (t.kind() == T::Kind::kRec) t = unfold(t);
  return t;
}

/// True if `t` unfolds to `end`.
inline bool unfolds_to_end(const LocalType& t) { return unfold_all(t).is_end(); }

bool subtype(const LocalType& a, const LocalType& b);

/// Payload compatibility: base sorts must be identical, session payloads
/// must be mutual subtypes.
inline bool sort_equiv(const Sort& a, const Sort& b) {
  if (a.kind() != b.kind()) return false;
  if (!a.is_session()) return true;
  return subtype(a.session(), b.session()) && subtype(b.session(), a.session());
}

/// Payload subsumption used when `--payload-sub` is requested: base sorts
/// identical, session payloads covariant.
inline bool sort_sub(const Sort& a, const Sort& b) {
  if (a.kind() != b.kind()) return false;
  if (!a.is_session()) return true;
  return subtype(a.session(), b.session());
}

namespace detail {

// Coinductive synchronous subtyping. A pair already under consideration is
// assumed to hold; since the relation is a pure conjunction, an assumption
// that is later falsified makes the whole query false anyway.
class SubtypeChecker {
 public:
  bool check(const LocalType& a, const LocalType& b) {
    if (!assumed_.emplace(a, b).second) return true;
    LocalType ua = unfold_all(a);
    LocalType ub = unfold_all(b);
    if (ua.kind() != ub.kind()) return false;
    switch (ua.kind()) {
      case LocalType::Kind::kEnd:
        return true;
      case LocalType::Kind::kSelect:
        // fewer outputs is more specific
        return ua.peer() == ub.peer() && covers(ub, ua);
      case LocalType::Kind::kBranch:
        // more inputs is more specific
        return ua.peer() == ub.peer() && covers(ua, ub);
      default:
        return false;  // free variables: not closed
    }
  }

 private:
  // Every branch of `small` appears in `big`, with equivalent payloads and
  // continuations related in the a-to-b direction.
  bool covers(const LocalType& big, const LocalType& small) {
    bool select = big.kind() == LocalType::Kind::kSelect;
    for (const auto& sb : small.branches()) {
      const LocalBranch* bb = big.find(sb.label);
      if (!bb || !sort_equiv(sb.sort, bb->sort)) return false;
      bool ok = select ? check(sb.cont, bb->cont) : check(bb->cont, sb.cont);
      if (!ok) return false;
    }
    return true;
  }

  std::set<std::pair<LocalType, LocalType>> assumed_;
};

}  // namespace detail

/// Synchronous session subtyping `a <= b`: a may be used where b is expected.
inline bool subtype(const LocalType& a, const LocalType& b) {
  return detail::SubtypeChecker{}.check(a, b);
}

}  // namespace mpst

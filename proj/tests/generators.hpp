#pragma once

// Seeded random terms for the property suites.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mpst/mpst.hpp"

namespace mpst::gen {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[static_cast<size_t>(uniform(rng, 0, static_cast<int>(xs.size()) - 1))];
}

inline const std::vector<std::string>& role_pool() {
  static const std::vector<std::string> pool{"p", "q", "r", "t"};
  return pool;
}

inline const std::vector<std::string>& label_pool() {
  static const std::vector<std::string> pool{"a", "b", "c", "d", "e"};
  return pool;
}

inline Sort base_sort(Rng& rng) {
  switch (uniform(rng, 0, 3)) {
    case 0:
      return Sort::Int();
    case 1:
      return Sort::Str();
    case 2:
      return Sort::Bool();
    default:
      return Sort::Unit();
  }
}

inline std::vector<Label> labels(Rng& rng, int max_branches) {
  std::vector<std::string> pool = label_pool();
  std::shuffle(pool.begin(), pool.end(), rng);
  int n = uniform(rng, 1, max_branches);
  std::vector<Label> out;
  for (int i = 0; i < n; ++i) out.emplace_back(pool[static_cast<size_t>(i)]);
  return out;
}

// ---------------------------------------------------------------------------
// global types

struct GlobalParams {
  int max_roles = 4;
  int max_branches = 3;
  int max_depth = 5;
  int max_recs = 1;
};

namespace detail {

struct GlobalGen {
  Rng& rng;
  const GlobalParams& params;
  std::vector<Role> roles;
  std::vector<std::string> vars;
  int recs_left;

  GlobalType leaf(bool guarded) {
    if (guarded && !vars.empty() && chance(rng, 0.6)) return GlobalType::var(pick(rng, vars));
    return GlobalType::end();
  }

  GlobalType comm(int depth) {
    Role from = pick(rng, roles), to = pick(rng, roles);
    while (to == from) to = pick(rng, roles);
    std::vector<GlobalBranch> branches;
    for (auto& l : labels(rng, params.max_branches)) branches.push_back({l, base_sort(rng), any(depth - 1, true)});
    return GlobalType::comm(from, to, std::move(branches));
  }

  GlobalType any(int depth, bool guarded) {
    if (depth <= 0) return leaf(guarded);
    if (recs_left > 0 && chance(rng, 0.35)) {
      --recs_left;
      std::string x = "X" + std::to_string(vars.size());
      vars.push_back(x);
      GlobalType body = comm(depth);
      vars.pop_back();
      return GlobalType::rec(x, std::move(body));
    }
    if (guarded && chance(rng, 0.15)) return leaf(guarded);
    return comm(depth);
  }
};

}  // namespace detail

inline GlobalType global_type(Rng& rng, const GlobalParams& params = {}) {
  int n = uniform(rng, 2, params.max_roles);
  std::vector<Role> roles;
  for (int i = 0; i < n; ++i) roles.emplace_back(role_pool()[static_cast<size_t>(i)]);
  detail::GlobalGen g{rng, params, roles, {}, params.max_recs};
  return g.any(params.max_depth, false);
}

// ---------------------------------------------------------------------------
// local types and contexts

struct LocalParams {
  int max_branches = 3;
  int max_depth = 4;
  int max_recs = 1;
  bool session_payloads = false;
};

namespace detail {

struct LocalGen {
  Rng& rng;
  const LocalParams& params;
  std::vector<Role> peers;
  std::vector<std::string> vars;
  int recs_left;

  LocalType leaf(bool guarded) {
    if (guarded && !vars.empty() && chance(rng, 0.6)) return LocalType::var(pick(rng, vars));
    return LocalType::end();
  }

  Sort sort(int depth) {
    if (params.session_payloads && depth > 1 && chance(rng, 0.15)) {
      LocalParams inner = params;
      inner.max_depth = 1;
      inner.session_payloads = false;
      LocalGen g{rng, inner, peers, {}, 0};
      return Sort::Session(g.action(1));
    }
    return base_sort(rng);
  }

  LocalType action(int depth) {
    Role peer = pick(rng, peers);
    std::vector<LocalBranch> branches;
    for (auto& l : labels(rng, params.max_branches)) branches.push_back({l, sort(depth), any(depth - 1, true)});
    return chance(rng, 0.5) ? LocalType::select(peer, std::move(branches))
                            : LocalType::branch(peer, std::move(branches));
  }

  LocalType any(int depth, bool guarded) {
    if (depth <= 0) return leaf(guarded);
    if (recs_left > 0 && chance(rng, 0.35)) {
      --recs_left;
      std::string x = "Y" + std::to_string(vars.size());
      vars.push_back(x);
      LocalType body = action(depth);
      vars.pop_back();
      return LocalType::rec(x, std::move(body));
    }
    if (guarded && chance(rng, 0.15)) return leaf(guarded);
    return action(depth);
  }
};

}  // namespace detail

inline LocalType local_type(Rng& rng, const std::vector<Role>& peers, const LocalParams& params = {}) {
  detail::LocalGen g{rng, params, peers, {}, params.max_recs};
  return g.any(params.max_depth, false);
}

/// Two or three endpoints of session `s` with independent random types:
/// mostly unsafe, which is the point for oracle comparisons.
inline TypingContext random_context(Rng& rng, const LocalParams& params = {}, const std::string& session = "s") {
  int n = uniform(rng, 2, 3);
  TypingContext ctx;
  for (int i = 0; i < n; ++i) {
    std::vector<Role> peers;
    for (int j = 0; j < n; ++j)
      if (j != i) peers.emplace_back(role_pool()[static_cast<size_t>(j)]);
    ctx.add(Endpoint(session, Role(role_pool()[static_cast<size_t>(i)])), local_type(rng, peers, params));
  }
  return ctx;
}

/// A subtype of `t`: internal choices lose branches, external choices gain
/// some.
inline LocalType narrow(Rng& rng, const LocalType& t) {
  switch (t.kind()) {
    case LocalType::Kind::kEnd:
    case LocalType::Kind::kVar:
      return t;
    case LocalType::Kind::kRec:
      return LocalType::rec(t.var_name(), narrow(rng, t.body()));
    case LocalType::Kind::kSelect: {
      std::vector<LocalBranch> out;
      for (const auto& b : t.branches())
        if (out.empty() || chance(rng, 0.6)) out.push_back({b.label, b.sort, narrow(rng, b.cont)});
      return LocalType::select(t.peer(), std::move(out));
    }
    case LocalType::Kind::kBranch: {
      std::vector<LocalBranch> out;
      for (const auto& b : t.branches()) out.push_back({b.label, b.sort, narrow(rng, b.cont)});
      for (const auto& l : label_pool())
        if (!t.find(Label(l)) && chance(rng, 0.2)) out.push_back({Label(l), base_sort(rng), LocalType::end()});
      return LocalType::branch(t.peer(), std::move(out));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// processes

namespace detail {

inline Expr value_of(Rng& rng, const Sort& s) {
  switch (s.kind()) {
    case Sort::Kind::kInt:
      return Expr::integer(uniform(rng, -20, 20));
    case Sort::Kind::kStr: {
      static const std::vector<std::string> words{"", "hi", "a b", "quote\"d", "back\\slash", "tab\tnl\n"};
      return Expr::string(pick(rng, words));
    }
    case Sort::Kind::kBool:
      return Expr::boolean(chance(rng, 0.5));
    default:
      return Expr::unit();
  }
}

struct Synth {
  Rng& rng;
  Endpoint self;
  std::vector<std::string> ints;  // int-sorted binders in scope
  std::map<std::string, LocalType> closed;  // type variable -> its closed rec type
  int fresh = 0;

  LocalType close(LocalType t) const {
    for (const auto& [x, rec] : closed) t = substitute(t, x, rec);
    return t;
  }

  Expr int_expr() {
    if (!ints.empty() && chance(rng, 0.5)) return Expr::var(pick(rng, ints));
    return Expr::integer(uniform(rng, -5, 5));
  }

  Process send(const LocalType& t, const LocalBranch& b) {
    return Process::select(ChanRef{self}, t.peer(), b.label, value_of(rng, b.sort), go(b.cont));
  }

  Process go(const LocalType& t) {
    switch (t.kind()) {
      case LocalType::Kind::kEnd:
        return Process::nil();
      case LocalType::Kind::kVar:
        return Process::var(t.var_name());
      case LocalType::Kind::kRec: {
        std::optional<TypingContext> ann;
        LocalType whole = close(t);
        if (chance(rng, 0.5)) {
          ann = TypingContext{};
          ann->add(self, whole);
        }
        auto saved = closed;
        closed.insert_or_assign(t.var_name(), whole);
        Process body = go(t.body());
        closed = std::move(saved);
        return Process::mu(t.var_name(), std::move(ann), std::move(body));
      }
      case LocalType::Kind::kSelect: {
        const auto& bs = t.branches();
        if (bs.size() >= 2 && chance(rng, 0.35)) {
          size_t i = static_cast<size_t>(uniform(rng, 0, static_cast<int>(bs.size()) - 1));
          size_t j = (i + 1) % bs.size();
          Expr guard = chance(rng, 0.5) ? Expr::lt(int_expr(), int_expr()) : Expr::eq(int_expr(), int_expr());
          return Process::cond(std::move(guard), send(t, bs[i]), send(t, bs[j]));
        }
        return send(t, pick(rng, bs));
      }
      case LocalType::Kind::kBranch: {
        std::vector<ProcBranch> arms;
        for (const auto& b : t.branches()) {
          std::string x = "x" + std::to_string(fresh++);
          bool is_int = b.sort.kind() == Sort::Kind::kInt;
          if (is_int) ints.push_back(x);
          arms.push_back({b.label, x, go(b.cont)});
          if (is_int) ints.pop_back();
        }
        std::shuffle(arms.begin(), arms.end(), rng);
        return Process::branch(ChanRef{self}, t.peer(), std::move(arms));
      }
    }
    return Process::nil();
  }
};

}  // namespace detail

/// A process for endpoint `self` that follows `t`, choosing one branch (or a
/// conditional between two) at each internal choice.
inline Process synthesize(Rng& rng, const Endpoint& self, const LocalType& t) {
  detail::Synth s{rng, self, {}, {}, 0};
  return s.go(t);
}

/// Parallel composition of one synthesized process per endpoint of `ctx`,
/// in random order and association; sometimes under `(new s)` for the
/// first session.
inline Process system(Rng& rng, const TypingContext& ctx) {
  std::vector<Process> parts;
  for (const auto& [e, t] : ctx) parts.push_back(synthesize(rng, e, t));
  if (parts.empty()) return Process::nil();
  std::shuffle(parts.begin(), parts.end(), rng);
  while (parts.size() > 1) {
    size_t i = static_cast<size_t>(uniform(rng, 0, static_cast<int>(parts.size()) - 2));
    parts[i] = Process::par(parts[i], parts[i + 1]);
    parts.erase(parts.begin() + static_cast<long>(i) + 1);
  }
  Process p = parts.front();
  if (chance(rng, 0.3)) p = Process::res(ctx.begin()->first.session, p);
  return p;
}

// ---------------------------------------------------------------------------
// arbitrary closed processes (untyped), for syntax round trips

namespace detail {

struct ProcGen {
  Rng& rng;
  std::vector<std::string> values;               // value / channel binders
  std::vector<std::pair<std::string, bool>> pvars;  // name, guarded
  int fresh = 0;

  Role role() { return Role(pick(rng, role_pool())); }

  Expr atom() {
    switch (uniform(rng, 0, 5)) {
      case 0:
        return Expr::integer(uniform(rng, -1000, 1000));
      case 1:
        return value_of(rng, Sort::Str());
      case 2:
        return Expr::boolean(chance(rng, 0.5));
      case 3:
        return Expr::unit();
      case 4:
        return Expr::chan(Endpoint(chance(rng, 0.5) ? "s" : "t", role()));
      default:
        return values.empty() ? Expr::integer(0) : Expr::var(pick(rng, values));
    }
  }

  Expr expr() {
    if (chance(rng, 0.25)) return chance(rng, 0.5) ? Expr::eq(atom(), atom()) : Expr::lt(atom(), atom());
    return atom();
  }

  ChanRef chan() {
    if (!values.empty() && chance(rng, 0.2)) return ChanRef{pick(rng, values)};
    return ChanRef{Endpoint(chance(rng, 0.7) ? "s" : "t", role())};
  }

  Process guarded(int depth) {
    auto saved = pvars;
    for (auto& v : pvars) v.second = true;
    Process p = any(depth);
    pvars = std::move(saved);
    return p;
  }

  Process any(int depth) {
    if (depth <= 0) {
      std::vector<std::string> ok;
      for (const auto& [x, g] : pvars)
        if (g) ok.push_back(x);
      if (!ok.empty() && chance(rng, 0.5)) return Process::var(pick(rng, ok));
      return Process::nil();
    }
    switch (uniform(rng, 0, 7)) {
      case 0:
        return Process::nil();
      case 1:
      case 2: {
        ChanRef c = chan();
        Role peer = role();
        Label l(pick(rng, label_pool()));
        Expr arg = expr();
        return Process::select(std::move(c), std::move(peer), std::move(l), std::move(arg), guarded(depth - 1));
      }
      case 3: {
        ChanRef c = chan();
        std::vector<ProcBranch> arms;
        for (auto& l : labels(rng, 3)) {
          std::string x = "v" + std::to_string(fresh++);
          values.push_back(x);
          arms.push_back({l, x, guarded(depth - 1)});
          values.pop_back();
        }
        return Process::branch(std::move(c), role(), std::move(arms));
      }
      case 4:
        return Process::par(any(depth - 1), any(depth - 1));
      case 5:
        return Process::res(chance(rng, 0.5) ? "s" : "u", any(depth - 1));
      case 6:
        return Process::cond(expr(), any(depth - 1), any(depth - 1));
      default: {
        std::string x = "P" + std::to_string(fresh++);
        std::optional<TypingContext> ann;
        if (chance(rng, 0.4)) {
          ann = TypingContext{};
          ann->add(Endpoint("s", role()), local_type(rng, {role()}, LocalParams{2, 2, 1, true}));
        }
        pvars.emplace_back(x, false);
        Process body = any(depth - 1);
        pvars.pop_back();
        return Process::mu(x, std::move(ann), std::move(body));
      }
    }
  }
};

}  // namespace detail

inline Process random_process(Rng& rng, int depth = 4) {
  detail::ProcGen g{rng, {}, {}, 0};
  return g.any(depth);
}

}  // namespace mpst::gen

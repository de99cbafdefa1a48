#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mpst/core/context.hpp"
#include "mpst/core/error.hpp"
#include "mpst/core/ops.hpp"
#include "mpst/core/types.hpp"
#include "mpst/syntax/pretty.hpp"

namespace mpst {

/// One synchronisation `s: p->q: l(T)` of a typing context.
struct CtxAction {
  std::string session;
  Role from;
  Role to;
  Label label;
  Sort payload;

  std::string str() const {
    std::string out = session + ": " + from.str() + "->" + to.str() + ": " + label.str();
    return out + "(" + pretty(payload) + ")";
  }

  bool involves(const Endpoint& e) const {
    return e.session == session && (e.role == from || e.role == to);
  }

  friend std::strong_ordering operator<=>(const CtxAction& a, const CtxAction& b) {
    if (auto c = a.session <=> b.session; c != 0) return c;
    if (auto c = a.from <=> b.from; c != 0) return c;
    if (auto c = a.to <=> b.to; c != 0) return c;
    if (auto c = a.label <=> b.label; c != 0) return c;
    return compare(a.payload, b.payload) <=> 0;
  }
  friend bool operator==(const CtxAction& a, const CtxAction& b) { return (a <=> b) == 0; }
};

class NotEnabled : public Error {
 public:
  explicit NotEnabled(const CtxAction& a) : Error("action not enabled: " + a.str()), action_(a) {}
  const CtxAction& action() const { return action_; }

 private:
  CtxAction action_;
};

class StateLimitExceeded : public Error {
 public:
  explicit StateLimitExceeded(size_t limit)
      : Error("state limit exceeded (" + std::to_string(limit) + " states)"), limit_(limit) {}
  size_t limit() const { return limit_; }

 private:
  size_t limit_;
};

struct SemanticsOptions {
  size_t max_states = 1'000'000;
  /// Let session payloads synchronise by subtyping (sender's payload a
  /// subtype of the receiver's) instead of mutual subtyping.
  bool payload_subtyping = false;
};

namespace detail {

inline bool payload_agrees(const Sort& sent, const Sort& expected, const SemanticsOptions& opts) {
  return opts.payload_subtyping ? sort_sub(sent, expected) : sort_equiv(sent, expected);
}

}  // namespace detail

/// All synchronisations available in `ctx`, in CtxAction order. An output
/// toward an absent endpoint contributes nothing.
inline std::vector<CtxAction> enabled(const TypingContext& ctx, const SemanticsOptions& opts = {}) {
  std::vector<CtxAction> out;
  for (const auto& [ep, type] : ctx) {
    LocalType sender = unfold_all(type);
    if (sender.kind() != LocalType::Kind::kSelect) continue;
    const LocalType* peer_type = ctx.find(Endpoint(ep.session, sender.peer()));
    if (!peer_type) continue;
    LocalType receiver = unfold_all(*peer_type);
    if (receiver.kind() != LocalType::Kind::kBranch || receiver.peer() != ep.role) continue;
    for (const LocalBranch* b : sender.sorted_branches()) {
      const LocalBranch* r = receiver.find(b->label);
      if (r && detail::payload_agrees(b->sort, r->sort, opts))
        out.push_back({ep.session, ep.role, sender.peer(), b->label, b->sort});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Fires `a`: both endpoints advance to their continuations. Throws
/// NotEnabled.
inline TypingContext step(const TypingContext& ctx, const CtxAction& a, const SemanticsOptions& opts = {}) {
  Endpoint from(a.session, a.from), to(a.session, a.to);
  const LocalType* st = ctx.find(from);
  const LocalType* rt = ctx.find(to);
  if (!st || !rt || a.from == a.to) throw NotEnabled(a);
  LocalType sender = unfold_all(*st), receiver = unfold_all(*rt);
  if (sender.kind() != LocalType::Kind::kSelect || sender.peer() != a.to) throw NotEnabled(a);
  if (receiver.kind() != LocalType::Kind::kBranch || receiver.peer() != a.from) throw NotEnabled(a);
  const LocalBranch* sb = sender.find(a.label);
  const LocalBranch* rb = receiver.find(a.label);
  if (!sb || !rb || !(sb->sort == a.payload) || !detail::payload_agrees(sb->sort, rb->sort, opts))
    throw NotEnabled(a);
  TypingContext out = ctx;
  out.set(from, sb->cont);
  out.set(to, rb->cont);
  return out;
}

/// True iff every entry unfolds to `end`.
inline bool is_final(const TypingContext& ctx) {
  for (const auto& [_, t] : ctx)
    if (!unfolds_to_end(t)) return false;
  return true;
}

/// Canonical state: each entry replaced by its head-unfolded representative,
/// `end` entries dropped.
inline TypingContext canonicalize(const TypingContext& ctx) {
  TypingContext out;
  for (const auto& [e, t] : ctx) {
    LocalType u = unfold_all(t);
    if (!u.is_end()) out.add(e, std::move(u));
  }
  return out;
}

/// Reachable labelled transition system of a typing context.
struct CtxLTS {
  struct Edge {
    size_t src;
    CtxAction action;
    size_t dst;
  };

  std::vector<TypingContext> states;  // canonical; index = state id
  size_t initial = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<size_t>> out;  // state id -> indices into `edges`

  size_t num_states() const { return states.size(); }
  size_t num_edges() const { return edges.size(); }
};

/// Breadth-first closure of `ctx` under `step`. Throws StateLimitExceeded.
inline CtxLTS reachable(const TypingContext& ctx, const SemanticsOptions& opts = {}) {
  CtxLTS lts;
  std::map<TypingContext::Map, size_t> index;
  auto intern = [&](TypingContext state) -> size_t {
    auto [it, fresh] = index.emplace(state.entries(), lts.states.size());
    if (fresh) {
      if (lts.states.size() >= opts.max_states) throw StateLimitExceeded(opts.max_states);
      lts.states.push_back(std::move(state));
      lts.out.emplace_back();
    }
    return it->second;
  };
  lts.initial = intern(canonicalize(ctx));
  for (size_t id = 0; id < lts.states.size(); ++id) {
    for (const auto& a : enabled(lts.states[id], opts)) {
      size_t dst = intern(canonicalize(step(lts.states[id], a, opts)));
      lts.out[id].push_back(lts.edges.size());
      lts.edges.push_back({id, a, dst});
    }
  }
  return lts;
}

}  // namespace mpst

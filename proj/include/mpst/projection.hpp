#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpst/core/context.hpp"
#include "mpst/core/error.hpp"
#include "mpst/core/types.hpp"
#include "mpst/syntax/pretty.hpp"

namespace mpst {

enum class MergeMode {
  kFull,   // external choices from the same peer may be unioned
  kPlain,  // sibling projections must be identical
};

class Unmergeable : public Error {
 public:
  Unmergeable(LocalType a, LocalType b)
      : Error("cannot merge '" + pretty(a) + "' with '" + pretty(b) + "'"),
        left_(std::move(a)),
        right_(std::move(b)) {}
  const LocalType& left() const { return left_; }
  const LocalType& right() const { return right_; }

 private:
  LocalType left_, right_;
};

/// Projection is undefined because sibling branches could not be merged.
/// `path()` lists the choices traversed from the root (`p->q:label`).
class ProjectionUndefined : public Error {
 public:
  ProjectionUndefined(Role role, std::vector<std::string> path, const Unmergeable& cause)
      : Error("projection onto " + role.str() + " undefined at " + render(path) + ": " + cause.what()),
        role_(std::move(role)),
        path_(std::move(path)),
        left_(cause.left()),
        right_(cause.right()) {}

  const Role& role() const { return role_; }
  const std::vector<std::string>& path() const { return path_; }
  const LocalType& left() const { return left_; }
  const LocalType& right() const { return right_; }
  std::string path_string() const { return render(path_); }

 private:
  static std::string render(const std::vector<std::string>& path) {
    if (path.empty()) return "<root>";
    std::string out;
    for (const auto& step : path) out += (out.empty() ? "" : "/") + step;
    return out;
  }

  Role role_;
  std::vector<std::string> path_;
  LocalType left_, right_;
};

/// Roles occurring as sender or receiver anywhere in `g`.
inline std::set<Role> roles(const GlobalType& g) {
  std::set<Role> out;
  auto walk = [&out](auto&& self, const GlobalType& t) -> void {
    switch (t.kind()) {
      case GlobalType::Kind::kComm:
        out.insert(t.from());
        out.insert(t.to());
        for (const auto& b : t.branches()) self(self, b.cont);
        break;
      case GlobalType::Kind::kRec:
        self(self, t.body());
        break;
      default:
        break;
    }
  };
  walk(walk, g);
  return out;
}

/// Merge of two sibling projections. Throws Unmergeable.
inline LocalType merge(const LocalType& a, const LocalType& b, MergeMode mode = MergeMode::kFull) {
  if (mode == MergeMode::kPlain || a.kind() != b.kind()) {
    if (a == b) return a;
    throw Unmergeable(a, b);
  }
  switch (a.kind()) {
    case LocalType::Kind::kEnd:
      return a;
    case LocalType::Kind::kVar:
      if (a.var_name() == b.var_name()) return a;
      throw Unmergeable(a, b);
    case LocalType::Kind::kRec:
      if (a.var_name() != b.var_name()) throw Unmergeable(a, b);
      return LocalType::rec(a.var_name(), merge(a.body(), b.body(), mode));
    case LocalType::Kind::kSelect:
      if (a == b) return a;
      throw Unmergeable(a, b);
    case LocalType::Kind::kBranch: {
      if (a.peer() != b.peer()) throw Unmergeable(a, b);
      std::vector<LocalBranch> out;
      for (const auto& x : a.branches()) {
        const LocalBranch* y = b.find(x.label);
        if (!y) {
          out.push_back(x);
          continue;
        }
        if (!(x.sort == y->sort)) throw Unmergeable(a, b);
        out.push_back({x.label, x.sort, merge(x.cont, y->cont, mode)});
      }
      for (const auto& y : b.branches())
        if (!a.find(y.label)) out.push_back(y);
      return LocalType::branch(a.peer(), std::move(out));
    }
  }
  throw Unmergeable(a, b);
}

namespace detail {

inline LocalType project_at(const GlobalType& g, const Role& r, MergeMode mode,
                            std::vector<std::string>& path) {
  switch (g.kind()) {
    case GlobalType::Kind::kEnd:
      return LocalType::end();
    case GlobalType::Kind::kVar:
      return LocalType::var(g.var_name());
    case GlobalType::Kind::kRec: {
      LocalType body = project_at(g.body(), r, mode, path);
      // A body that loops straight back without any action of r is `end`;
      // an unused binder is dropped.
      if (body.kind() == LocalType::Kind::kVar && body.var_name() == g.var_name())
        return LocalType::end();
      if (!free_vars(body).contains(g.var_name())) return body;
      return LocalType::rec(g.var_name(), std::move(body));
    }
    case GlobalType::Kind::kComm:
      break;
  }
  auto step = [&](const GlobalBranch& b) {
    path.push_back(g.from().str() + "->" + g.to().str() + ":" + b.label.str());
    LocalType t = project_at(b.cont, r, mode, path);
    path.pop_back();
    return t;
  };
  if (r == g.from() || r == g.to()) {
    std::vector<LocalBranch> out;
    for (const auto& b : g.branches()) out.push_back({b.label, b.sort, step(b)});
    return r == g.from() ? LocalType::select(g.to(), std::move(out))
                         : LocalType::branch(g.from(), std::move(out));
  }
  std::optional<LocalType> acc;
  for (const auto& b : g.branches()) {
    LocalType t = step(b);
    try {
      acc = acc ? merge(*acc, t, mode) : t;
    } catch (const Unmergeable& e) {
      throw ProjectionUndefined(r, path, e);
    }
  }
  return *acc;
}

}  // namespace detail

/// Local type of role `r` in `g`. Throws ProjectionUndefined.
inline LocalType project(const GlobalType& g, const Role& r, MergeMode mode = MergeMode::kFull) {
  std::vector<std::string> path;
  return detail::project_at(g, r, mode, path);
}

/// `{session[r] : project(g, r)}` for every role of `g`.
inline TypingContext project_all(const GlobalType& g, const std::string& session,
                                 MergeMode mode = MergeMode::kFull) {
  TypingContext ctx;
  for (const auto& r : roles(g)) ctx.add(Endpoint(session, r), project(g, r, mode));
  return ctx;
}

}  // namespace mpst

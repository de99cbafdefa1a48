#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpst/core/error.hpp"
#include "mpst/core/names.hpp"

namespace mpst {

class LocalType;

/// Message payload sort. Session payloads carry a (closed) local type and
/// model delegation.
class Sort {
 public:
  enum class Kind { kInt, kStr, kBool, kUnit, kSession };

  Sort() = default;
  static Sort Int() { return Sort(Kind::kInt); }
  static Sort Str() { return Sort(Kind::kStr); }
  static Sort Bool() { return Sort(Kind::kBool); }
  static Sort Unit() { return Sort(Kind::kUnit); }
  static Sort Session(LocalType type);

  Kind kind() const { return kind_; }
  bool is_session() const { return kind_ == Kind::kSession; }
  const LocalType& session() const { return *session_; }

 private:
  explicit Sort(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::kUnit;
  std::shared_ptr<const LocalType> session_;
};

namespace detail {
struct LocalNode;
struct GlobalNode;
}  // namespace detail

struct LocalBranch;
struct GlobalBranch;

/// Immutable local session type. Copies share structure.
class LocalType {
 public:
  enum class Kind { kSelect, kBranch, kRec, kVar, kEnd };

  /// `end`
  LocalType() = default;

  static LocalType end() { return LocalType(); }
  /// `peer!{...}`: internal choice (output).
  static LocalType select(Role peer, std::vector<LocalBranch> branches);
  /// `peer?{...}`: external choice (input).
  static LocalType branch(Role peer, std::vector<LocalBranch> branches);
  /// `rec X. body`; rejects bodies where X occurs unguarded.
  static LocalType rec(std::string var, LocalType body);
  static LocalType var(std::string name);

  Kind kind() const;
  bool is_end() const { return node_ == nullptr; }
  bool is_choice() const { return kind() == Kind::kSelect || kind() == Kind::kBranch; }

  const Role& peer() const;
  /// Branches in source order.
  const std::vector<LocalBranch>& branches() const;
  /// Branches sorted by label.
  std::vector<const LocalBranch*> sorted_branches() const;
  const LocalBranch* find(const Label& label) const;
  const std::string& var_name() const;
  const LocalType& body() const;

 private:
  explicit LocalType(std::shared_ptr<const detail::LocalNode> node) : node_(std::move(node)) {}

  std::shared_ptr<const detail::LocalNode> node_;
};

struct LocalBranch {
  Label label;
  Sort sort;
  LocalType cont;
};

/// Immutable global type (choreography).
class GlobalType {
 public:
  enum class Kind { kComm, kRec, kVar, kEnd };

  GlobalType() = default;

  static GlobalType end() { return GlobalType(); }
  /// `from->to{...}`; rejects self-communication and duplicate labels.
  static GlobalType comm(Role from, Role to, std::vector<GlobalBranch> branches);
  static GlobalType rec(std::string var, GlobalType body);
  static GlobalType var(std::string name);

  Kind kind() const;
  bool is_end() const { return node_ == nullptr; }

  const Role& from() const;
  const Role& to() const;
  const std::vector<GlobalBranch>& branches() const;
  std::vector<const GlobalBranch*> sorted_branches() const;
  const std::string& var_name() const;
  const GlobalType& body() const;

 private:
  explicit GlobalType(std::shared_ptr<const detail::GlobalNode> node) : node_(std::move(node)) {}

  std::shared_ptr<const detail::GlobalNode> node_;
};

struct GlobalBranch {
  Label label;
  Sort sort;
  GlobalType cont;
};

namespace detail {

struct LocalNode {
  LocalType::Kind kind;
  std::optional<Role> peer;
  std::vector<LocalBranch> branches;
  std::vector<size_t> order;  // indices of `branches` sorted by label
  std::string var;
  std::optional<LocalType> body;
};

struct GlobalNode {
  GlobalType::Kind kind;
  std::optional<Role> from, to;
  std::vector<GlobalBranch> branches;
  std::vector<size_t> order;
  std::string var;
  std::optional<GlobalType> body;
};

template <class Branch>
std::vector<size_t> label_order(const std::vector<Branch>& branches) {
  if (branches.empty()) throw WellFormednessError("empty choice");
  std::vector<size_t> order(branches.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return branches[a].label < branches[b].label; });
  for (size_t i = 1; i < order.size(); ++i)
    if (branches[order[i - 1]].label == branches[order[i]].label)
      throw WellFormednessError("duplicate label '" + branches[order[i]].label.str() + "'");
  return order;
}

// True if `var` occurs in `t` without an intervening communication.
template <class T>
bool occurs_unguarded(const T& t, const std::string& var) {
  switch (t.kind()) {
    case T::Kind::kVar:
      return t.var_name() == var;
    case T::Kind::kRec:
      return t.var_name() != var && occurs_unguarded(t.body(), var);
    default:
      return false;
  }
}

}  // namespace detail

inline Sort Sort::Session(LocalType type) {
  Sort s(Kind::kSession);
  s.session_ = std::make_shared<const LocalType>(std::move(type));
  return s;
}

// ---- LocalType ----

inline LocalType LocalType::select(Role peer, std::vector<LocalBranch> branches) {
  auto node = std::make_shared<detail::LocalNode>();
  node->kind = Kind::kSelect;
  node->order = detail::label_order(branches);
  node->peer = std::move(peer);
  node->branches = std::move(branches);
  return LocalType(std::move(node));
}

inline LocalType LocalType::branch(Role peer, std::vector<LocalBranch> branches) {
  auto node = std::make_shared<detail::LocalNode>();
  node->kind = Kind::kBranch;
  node->order = detail::label_order(branches);
  node->peer = std::move(peer);
  node->branches = std::move(branches);
  return LocalType(std::move(node));
}

inline LocalType LocalType::rec(std::string var, LocalType body) {
  if (!is_identifier(var)) throw WellFormednessError("invalid recursion variable '" + var + "'");
  if (detail::occurs_unguarded(body, var))
    throw WellFormednessError("non-contractive recursion on '" + var + "'");
  auto node = std::make_shared<detail::LocalNode>();
  node->kind = Kind::kRec;
  node->var = std::move(var);
  node->body = std::move(body);
  return LocalType(std::move(node));
}

inline LocalType LocalType::var(std::string name) {
  if (!is_identifier(name)) throw WellFormednessError("invalid recursion variable '" + name + "'");
  auto node = std::make_shared<detail::LocalNode>();
  node->kind = Kind::kVar;
  node->var = std::move(name);
  return LocalType(std::move(node));
}

inline LocalType::Kind LocalType::kind() const { return node_ ? node_->kind : Kind::kEnd; }
inline const Role& LocalType::peer() const { return *node_->peer; }
inline const std::vector<LocalBranch>& LocalType::branches() const { return node_->branches; }
inline const std::string& LocalType::var_name() const { return node_->var; }
inline const LocalType& LocalType::body() const { return *node_->body; }

inline std::vector<const LocalBranch*> LocalType::sorted_branches() const {
  std::vector<const LocalBranch*> out;
  for (size_t i : node_->order) out.push_back(&node_->branches[i]);
  return out;
}

inline const LocalBranch* LocalType::find(const Label& label) const {
  if (!is_choice()) return nullptr;
  for (const auto& b : node_->branches)
    if (b.label == label) return &b;
  return nullptr;
}

// ---- GlobalType ----

inline GlobalType GlobalType::comm(Role from, Role to, std::vector<GlobalBranch> branches) {
  if (from == to) throw WellFormednessError("self-communication");
  auto node = std::make_shared<detail::GlobalNode>();
  node->kind = Kind::kComm;
  node->order = detail::label_order(branches);
  node->from = std::move(from);
  node->to = std::move(to);
  node->branches = std::move(branches);
  return GlobalType(std::move(node));
}

inline GlobalType GlobalType::rec(std::string var, GlobalType body) {
  if (!is_identifier(var)) throw WellFormednessError("invalid recursion variable '" + var + "'");
  if (detail::occurs_unguarded(body, var))
    throw WellFormednessError("non-contractive recursion on '" + var + "'");
  auto node = std::make_shared<detail::GlobalNode>();
  node->kind = Kind::kRec;
  node->var = std::move(var);
  node->body = std::move(body);
  return GlobalType(std::move(node));
}

inline GlobalType GlobalType::var(std::string name) {
  if (!is_identifier(name)) throw WellFormednessError("invalid recursion variable '" + name + "'");
  auto node = std::make_shared<detail::GlobalNode>();
  node->kind = Kind::kVar;
  node->var = std::move(name);
  return GlobalType(std::move(node));
}

inline GlobalType::Kind GlobalType::kind() const { return node_ ? node_->kind : Kind::kEnd; }
inline const Role& GlobalType::from() const { return *node_->from; }
inline const Role& GlobalType::to() const { return *node_->to; }
inline const std::vector<GlobalBranch>& GlobalType::branches() const { return node_->branches; }
inline const std::string& GlobalType::var_name() const { return node_->var; }
inline const GlobalType& GlobalType::body() const { return *node_->body; }

inline std::vector<const GlobalBranch*> GlobalType::sorted_branches() const {
  std::vector<const GlobalBranch*> out;
  for (size_t i : node_->order) out.push_back(&node_->branches[i]);
  return out;
}

// ---- structural comparison (branch order is irrelevant) ----

int compare(const LocalType& a, const LocalType& b);

inline int compare(const Sort& a, const Sort& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (a.is_session()) return compare(a.session(), b.session());
  return 0;
}

namespace detail {

inline int cmp_str(const std::string& a, const std::string& b) {
  int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

template <class Branches>
int compare_branches(const Branches& xs, const Branches& ys) {
  if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (int c = cmp_str(xs[i]->label.str(), ys[i]->label.str())) return c;
    if (int c = compare(xs[i]->sort, ys[i]->sort)) return c;
    if (int c = compare(xs[i]->cont, ys[i]->cont)) return c;
  }
  return 0;
}

}  // namespace detail

inline int compare(const LocalType& a, const LocalType& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case LocalType::Kind::kEnd:
      return 0;
    case LocalType::Kind::kVar:
      return detail::cmp_str(a.var_name(), b.var_name());
    case LocalType::Kind::kRec:
      if (int c = detail::cmp_str(a.var_name(), b.var_name())) return c;
      return compare(a.body(), b.body());
    default:
      if (int c = detail::cmp_str(a.peer().str(), b.peer().str())) return c;
      return detail::compare_branches(a.sorted_branches(), b.sorted_branches());
  }
}

inline int compare(const GlobalType& a, const GlobalType& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case GlobalType::Kind::kEnd:
      return 0;
    case GlobalType::Kind::kVar:
      return detail::cmp_str(a.var_name(), b.var_name());
    case GlobalType::Kind::kRec:
      if (int c = detail::cmp_str(a.var_name(), b.var_name())) return c;
      return compare(a.body(), b.body());
    case GlobalType::Kind::kComm:
      if (int c = detail::cmp_str(a.from().str(), b.from().str())) return c;
      if (int c = detail::cmp_str(a.to().str(), b.to().str())) return c;
      return detail::compare_branches(a.sorted_branches(), b.sorted_branches());
  }
  return 0;
}

inline bool operator==(const Sort& a, const Sort& b) { return compare(a, b) == 0; }
inline bool operator==(const LocalType& a, const LocalType& b) { return compare(a, b) == 0; }
inline bool operator<(const LocalType& a, const LocalType& b) { return compare(a, b) < 0; }
inline bool operator==(const GlobalType& a, const GlobalType& b) { return compare(a, b) == 0; }

// ---- variables ----

template <class T>
void collect_free_vars(const T& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t.kind()) {
    case T::Kind::kVar:
      if (!bound.contains(t.var_name())) out.insert(t.var_name());
      break;
    case T::Kind::kRec: {
      bool fresh = bound.insert(t.var_name()).second;
      collect_free_vars(t.body(), bound, out);
      if (fresh) bound.erase(t.var_name());
      break;
    }
    case T::Kind::kEnd:
      break;
    default:
      for (const auto& b : t.branches()) collect_free_vars(b.cont, bound, out);
  }
}

template <class T>
std::set<std::string> free_vars(const T& t) {
  std::set<std::string> bound, out;
  collect_free_vars(t, bound, out);
  return out;
}

inline bool is_closed(const LocalType& t) { return free_vars(t).empty(); }
inline bool is_closed(const GlobalType& t) { return free_vars(t).empty(); }

/// Throws WellFormednessError if `t` has a free recursion variable.
inline void require_closed(const LocalType& t) {
  auto fv = free_vars(t);
  if (!fv.empty()) throw WellFormednessError("unbound variable '" + *fv.begin() + "'");
}

inline void require_closed(const GlobalType& t) {
  auto fv = free_vars(t);
  if (!fv.empty()) throw WellFormednessError("unbound variable '" + *fv.begin() + "'");
}

}  // namespace mpst

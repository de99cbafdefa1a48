#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "mpst/core/error.hpp"
#include "mpst/core/names.hpp"
#include "mpst/core/types.hpp"

namespace mpst {

/// Session endpoint `s[p]`: the channel used to play role p in session s.
struct Endpoint {
  std::string session;
  Role role;

  Endpoint(std::string session, Role role) : session(std::move(session)), role(std::move(role)) {
    if (!is_identifier(this->session))
      throw WellFormednessError("invalid session name '" + this->session + "'");
  }

  std::string str() const { return session + "[" + role.str() + "]"; }

  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

class OverlappingEndpoint : public Error {
 public:
  explicit OverlappingEndpoint(Endpoint e)
      : Error("overlapping endpoint " + e.str()), endpoint_(std::move(e)) {}
  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
};

/// Typing context: finite map from endpoints to local types, iterated in
/// (session, role) order.
class TypingContext {
 public:
  using Map = std::map<Endpoint, LocalType>;

  TypingContext() = default;

  /// Throws OverlappingEndpoint if `e` is already present.
  void add(Endpoint e, LocalType t) {
    if (entries_.contains(e)) throw OverlappingEndpoint(std::move(e));
    entries_.emplace(std::move(e), std::move(t));
  }
  /// Inserts or replaces.
  void set(const Endpoint& e, LocalType t) { entries_.insert_or_assign(e, std::move(t)); }
  void erase(const Endpoint& e) { entries_.erase(e); }

  bool contains(const Endpoint& e) const { return entries_.contains(e); }
  const LocalType* find(const Endpoint& e) const {
    auto it = entries_.find(e);
    return it == entries_.end() ? nullptr : &it->second;
  }
  const LocalType& at(const Endpoint& e) const { return entries_.at(e); }

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const Map& entries() const { return entries_; }

  std::vector<std::string> sessions() const {
    std::vector<std::string> out;
    for (const auto& [e, _] : entries_)
      if (out.empty() || out.back() != e.session) out.push_back(e.session);
    return out;
  }

  /// Entries belonging to `session`.
  TypingContext restrict_to(const std::string& session) const {
    TypingContext out;
    for (const auto& [e, t] : entries_)
      if (e.session == session) out.entries_.emplace(e, t);
    return out;
  }

  friend bool operator==(const TypingContext& a, const TypingContext& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Map entries_;
};

/// Disjoint union `d1 ∘ d2`. Throws OverlappingEndpoint on a shared key.
inline TypingContext compose(const TypingContext& d1, const TypingContext& d2) {
  TypingContext out = d1;
  for (const auto& [e, t] : d2) out.add(e, t);
  return out;
}

}  // namespace mpst

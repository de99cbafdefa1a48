#pragma once

#include <compare>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "mpst/core/error.hpp"

namespace mpst {

/// True for strings matching `[a-zA-Z][a-zA-Z0-9_]*`.
inline bool is_identifier(std::string_view s) {
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (s.empty() || !alpha(s.front())) return false;
  for (char c : s)
    if (!alpha(c) && !digit(c) && c != '_') return false;
  return true;
}

/// Identifier wrapper, distinct per Tag so roles and labels do not mix.
template <class Tag>
class Name {
 public:
  explicit Name(std::string value) : value_(std::move(value)) {
    if (!is_identifier(value_))
      throw WellFormednessError("invalid identifier '" + value_ + "'");
  }

  const std::string& str() const { return value_; }

  friend auto operator<=>(const Name&, const Name&) = default;
  friend bool operator==(const Name&, const Name&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Name& n) { return os << n.value_; }

 private:
  std::string value_;
};

using Role = Name<struct RoleTag>;
using Label = Name<struct LabelTag>;

}  // namespace mpst

template <class Tag>
struct std::hash<mpst::Name<Tag>> {
  size_t operator()(const mpst::Name<Tag>& n) const noexcept { return std::hash<std::string>{}(n.str()); }
};

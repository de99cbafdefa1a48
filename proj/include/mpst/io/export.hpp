#pragma once

#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mpst/proc/probe.hpp"
#include "mpst/safety.hpp"
#include "mpst/semantics.hpp"
#include "mpst/syntax/pretty.hpp"

namespace mpst {

// nlohmann::json keeps object keys in a std::map, so dumps are sorted and
// byte-stable.
using Json = nlohmann::json;

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline Json trace_json(const std::vector<CtxAction>& trace) {
  Json out = Json::array();
  for (const auto& a : trace) out.push_back(a.str());
  return out;
}

}  // namespace detail

inline Json to_json(const CtxLTS& lts) {
  Json states = Json::array(), edges = Json::array();
  for (size_t i = 0; i < lts.num_states(); ++i) states.push_back({{"id", i}, {"context", pretty(lts.states[i])}});
  for (const auto& e : lts.edges) edges.push_back({{"src", e.src}, {"action", e.action.str()}, {"dst", e.dst}});
  return {{"states", states}, {"edges", edges}, {"initial", lts.initial}};
}

/// Graphviz rendering. `highlight` marks one state (e.g. a witness).
inline std::string to_dot(const CtxLTS& lts, std::optional<size_t> highlight = std::nullopt) {
  std::ostringstream out;
  out << "digraph lts {\n  node [shape=box, fontname=monospace];\n";
  for (size_t i = 0; i < lts.num_states(); ++i) {
    std::string text = lts.states[i].empty() ? "end" : pretty(lts.states[i]);
    out << "  s" << i << " [label=\"" << detail::dot_escape(text) << "\"";
    if (i == lts.initial) out << ", penwidth=2";
    if (highlight && *highlight == i) out << ", color=red";
    out << "];\n";
  }
  for (const auto& e : lts.edges)
    out << "  s" << e.src << " -> s" << e.dst << " [label=\"" << detail::dot_escape(e.action.str()) << "\"];\n";
  out << "}\n";
  return out.str();
}

inline Json to_json(const Verdict& v) {
  Json witness = nullptr;
  if (const auto* w = std::get_if<TraceWitness>(&v.witness)) {
    witness = {{"state", pretty(w->state)}, {"trace", detail::trace_json(w->trace)}};
    witness["stuck"] = w->stuck ? Json(w->stuck->str()) : Json(nullptr);
  } else if (const auto* w = std::get_if<PairWitness>(&v.witness)) {
    witness = {{"first", w->first.str()}, {"second", w->second.str()}, {"reason", w->reason}};
    witness["first_partial"] = w->first_partial ? Json(pretty_peerless(*w->first_partial)) : Json(nullptr);
    witness["second_partial"] = w->second_partial ? Json(pretty_peerless(*w->second_partial)) : Json(nullptr);
  } else if (const auto* w = std::get_if<RuleWitness>(&v.witness)) {
    witness = {{"rule", w->rule}, {"error", w->error}, {"message", w->message}, {"path", w->path}};
  }
  return {{"property", to_string(v.property)}, {"holds", v.holds}, {"witness", witness},
          {"states_explored", v.states_explored}};
}

inline Json to_json(const SRReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"trace", f.trace},
                        {"error", f.error},
                        {"process", f.process},
                        {"context", f.context},
                        {"reduction", f.reduction}});
  return {{"explored", r.explored},
          {"reductions", r.reductions},
          {"failures", failures},
          {"truncated", r.truncated},
          {"no_matching", r.no_matching}};
}

/// Human-readable verdict; traces are printed one action per line.
inline std::string describe(const Verdict& v) {
  std::ostringstream out;
  out << to_string(v.property) << ": " << (v.holds ? "holds" : "fails");
  if (v.states_explored) out << " (" << v.states_explored << " states)";
  out << "\n";
  if (const auto* w = std::get_if<TraceWitness>(&v.witness)) {
    if (w->stuck) out << "  stuck endpoint: " << w->stuck->str() << "\n";
    out << "  state: " << (w->state.empty() ? "(empty)" : pretty(w->state)) << "\n";
    out << "  trace:" << (w->trace.empty() ? " (initial state)" : "") << "\n";
    for (const auto& a : w->trace) out << "    " << a.str() << "\n";
  } else if (const auto* w = std::get_if<PairWitness>(&v.witness)) {
    out << "  pair: " << w->first.str() << ", " << w->second.str() << "\n";
    out << "  " << w->reason << "\n";
  } else if (const auto* w = std::get_if<RuleWitness>(&v.witness)) {
    out << "  " << w->str() << "\n";
  }
  return out.str();
}

}  // namespace mpst

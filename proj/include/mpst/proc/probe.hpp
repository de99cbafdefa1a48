#pragma once

#include <deque>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mpst/core/context.hpp"
#include "mpst/proc/process.hpp"
#include "mpst/proc/step.hpp"
#include "mpst/proc/typecheck.hpp"
#include "mpst/semantics.hpp"
#include "mpst/syntax/pretty.hpp"

namespace mpst {

/// The process fired a communication its typing context does not enable.
class NoMatchingCtxAction : public Error {
 public:
  explicit NoMatchingCtxAction(const ProcAction& a)
      : Error("no context action matches " + a.str()), action_(a) {}
  const ProcAction& action() const { return action_; }

 private:
  ProcAction action_;
};

/// Context after the process performs `a`. Conditionals and unfoldings leave
/// it unchanged. Throws NoMatchingCtxAction.
inline TypingContext mirror_context(const TypingContext& ctx, const ProcAction& a,
                                    const SemanticsOptions& opts = {}) {
  if (a.kind != ProcAction::Kind::kComm) return ctx;
  for (const auto& c : enabled(ctx, opts))
    if (c.session == a.session && c.from == *a.from && c.to == *a.to && c.label == *a.label)
      return step(ctx, c, opts);
  throw NoMatchingCtxAction(a);
}

struct SRFailure {
  std::vector<std::string> trace;  // actions from the initial system
  std::string error;
  std::string process;  // offending configuration
  std::string context;
  std::string reduction;  // last action, empty for the initial system
};

struct SRReport {
  size_t explored = 0;    // distinct configurations visited
  size_t reductions = 0;  // reductions taken between them
  std::vector<SRFailure> failures;
  bool truncated = false;  // some configuration at the depth bound could still reduce
  size_t no_matching = 0;  // failures caused by NoMatchingCtxAction

  bool passed() const { return failures.empty(); }
};

/// Explores every reduction sequence of `p` up to `depth` steps, re-checking
/// each reduct against the mirrored context. Configurations are identified by
/// their printed process and context.
inline SRReport sr_probe(const Process& p, const TypingContext& ctx, size_t depth,
                         const TypecheckOptions& opts = {}) {
  struct Config {
    Process proc;
    TypingContext ctx;
    std::vector<std::string> trace;
  };
  SRReport report;
  auto fail = [&](const Config& c, std::string error, std::string reduction) {
    report.failures.push_back({c.trace, std::move(error), pretty(c.proc), pretty(c.ctx), std::move(reduction)});
  };

  Config init{p, ctx, {}};
  Verdict v0 = check_system(p, ctx, opts);
  if (!v0.holds) {
    report.explored = 1;
    fail(init, std::get<RuleWitness>(v0.witness).str(), "");
    return report;
  }

  std::set<std::pair<std::string, std::string>> seen{{pretty(p), pretty(ctx)}};
  std::deque<Config> frontier{init};
  for (size_t level = 0; !frontier.empty(); ++level) {
    std::deque<Config> next;
    for (const auto& c : frontier) {
      ++report.explored;
      std::vector<std::pair<ProcAction, Process>> reducts;
      try {
        reducts = proc_step(c.proc);
      } catch (const StuckExpr& e) {
        fail(c, e.what(), "");
        continue;
      }
      if (level == depth) {
        if (!reducts.empty()) report.truncated = true;
        continue;
      }
      for (auto& [action, proc] : reducts) {
        ++report.reductions;
        Config n{proc, c.ctx, c.trace};
        n.trace.push_back(action.str());
        try {
          n.ctx = mirror_context(c.ctx, action, opts.semantics);
        } catch (const NoMatchingCtxAction& e) {
          ++report.no_matching;
          fail(n, e.what(), action.str());
          continue;
        }
        if (!seen.emplace(pretty(n.proc), pretty(n.ctx)).second) continue;
        Verdict v = check_system(n.proc, n.ctx, opts);
        if (!v.holds) {
          fail(n, std::get<RuleWitness>(v.witness).str(), action.str());
          continue;
        }
        next.push_back(std::move(n));
      }
    }
    frontier = std::move(next);
  }
  return report;
}

}  // namespace mpst

#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpst/io/export.hpp"
#include "mpst/proc/probe.hpp"
#include "mpst/proc/typecheck.hpp"
#include "mpst/projection.hpp"
#include "mpst/safety.hpp"
#include "mpst/semantics.hpp"
#include "mpst/syntax/parser.hpp"

namespace mpst::cli {

enum Exit : int {
  kOk = 0,
  kParse = 1,
  kProjection = 2,
  kFail = 3,
  kLimit = 4,
};

namespace detail {

class InputError : public Error {
 public:
  using Error::Error;
};

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

inline std::string slurp(const std::string& path, std::istream& in) {
  if (path == "-") return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline std::string display_name(const std::string& path) { return path == "-" ? "<stdin>" : path; }

inline size_t max_states(const std::optional<size_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MPST_MAX_STATES")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<size_t>(v);
    throw InputError(std::string("MPST_MAX_STATES must be a positive integer, got '") + env + "'");
  }
  return SemanticsOptions{}.max_states;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

inline int emit(Io& io, bool json, const Json& j, const std::string& human) {
  if (json)
    io.out << j.dump(2) << "\n";
  else
    io.out << human;
  return kOk;
}

// ---- project ----

struct ProjectArgs {
  std::string file;
  std::optional<std::string> role;
  std::string session = "s";
  std::string merge = "full";
  bool json = false;
};

inline int project_cmd(const ProjectArgs& a, Io& io) {
  GlobalType g = parse_global(slurp(a.file, io.in), display_name(a.file));
  MergeMode mode = a.merge == "plain" ? MergeMode::kPlain : MergeMode::kFull;
  std::vector<Role> targets;
  if (a.role) {
    targets.push_back(Role(*a.role));
  } else {
    auto rs = roles(g);
    targets.assign(rs.begin(), rs.end());
  }
  Json j = Json::object();
  std::string human;
  for (const auto& r : targets) {
    LocalType t = project(g, r, mode);
    Endpoint e(a.session, r);
    j[e.str()] = pretty(t);
    human += e.str() + ": " + pretty(t) + "\n";
  }
  return emit(io, a.json, j, human);
}

// ---- check ----

struct CheckArgs {
  std::string file;
  bool liveness = false, consistency = false, deadlock = false;
  bool json = false;
  std::optional<std::string> dot;
  std::optional<size_t> max_states;
};

inline int check_cmd(const CheckArgs& a, Io& io) {
  if (a.liveness + a.consistency + a.deadlock != 1)
    throw InputError("choose exactly one of --liveness, --consistency, --deadlock");
  TypingContext ctx = parse_context(slurp(a.file, io.in), display_name(a.file));
  SemanticsOptions opts;
  opts.max_states = max_states(a.max_states);

  Verdict v;
  std::optional<CtxLTS> lts;
  if (a.consistency) {
    v = is_consistent(ctx);
    if (a.dot) lts = reachable(ctx, opts);
  } else {
    lts = reachable(ctx, opts);
    v = a.liveness ? is_live(*lts) : is_deadlock_free(*lts);
  }
  if (a.dot) {
    std::optional<size_t> mark;
    if (const auto* w = std::get_if<TraceWitness>(&v.witness))
      for (size_t i = 0; i < lts->num_states(); ++i)
        if (lts->states[i] == w->state) mark = i;
    write_file(*a.dot, to_dot(*lts, mark));
  }
  emit(io, a.json, to_json(v), describe(v));
  return v.holds ? kOk : kFail;
}

// ---- typecheck ----

struct TypecheckArgs {
  std::string file;
  std::string ctx;
  std::optional<std::string> rely;
  std::string liveness_at = "both";
  bool json = false;
  std::optional<size_t> max_states;
};

inline LivenessAt liveness_mode(const std::string& s) {
  if (s == "res") return LivenessAt::kRes;
  if (s == "top") return LivenessAt::kTop;
  if (s == "all") return LivenessAt::kAll;
  return LivenessAt::kResAndTop;
}

inline int typecheck_cmd(const TypecheckArgs& a, Io& io) {
  Process p = parse_process(slurp(a.file, io.in), display_name(a.file));
  TypingContext g = parse_context(slurp(a.ctx, io.in), display_name(a.ctx));
  TypingContext r;
  if (a.rely) r = parse_context(slurp(*a.rely, io.in), display_name(*a.rely));
  TypecheckOptions opts;
  opts.liveness_at = liveness_mode(a.liveness_at);
  opts.semantics.max_states = max_states(a.max_states);

  Verdict v = check_judgement(Judgement{ProcessEnv{}, g, r, p}, opts);
  emit(io, a.json, to_json(v), describe(v));
  return v.holds ? kOk : kFail;
}

// ---- sr ----

struct SrArgs {
  std::string file;
  std::string ctx;
  size_t depth = 10;
  bool json = false;
  std::optional<size_t> max_states;
};

inline int sr_cmd(const SrArgs& a, Io& io) {
  Process p = parse_process(slurp(a.file, io.in), display_name(a.file));
  TypingContext ctx = parse_context(slurp(a.ctx, io.in), display_name(a.ctx));
  TypecheckOptions opts;
  opts.semantics.max_states = max_states(a.max_states);

  SRReport r = sr_probe(p, ctx, a.depth, opts);
  std::ostringstream human;
  human << "explored " << r.explored << " configurations, " << r.reductions << " reductions"
        << (r.truncated ? " (truncated at depth " + std::to_string(a.depth) + ")" : "") << "\n";
  human << (r.passed() ? "subject reduction: holds\n" : "subject reduction: fails\n");
  for (const auto& f : r.failures) {
    human << "  " << f.error << "\n";
    for (const auto& step : f.trace) human << "    " << step << "\n";
    human << "  process: " << f.process << "\n  context: " << f.context << "\n";
  }
  emit(io, a.json, to_json(r), human.str());
  return r.passed() ? kOk : kFail;
}

// ---- lts ----

struct LtsArgs {
  std::string file;
  bool dot = false, json = false;
  std::optional<size_t> max_states;
};

inline int lts_cmd(const LtsArgs& a, Io& io) {
  if (a.dot && a.json) throw InputError("--dot and --json are exclusive");
  TypingContext ctx = parse_context(slurp(a.file, io.in), display_name(a.file));
  SemanticsOptions opts;
  opts.max_states = max_states(a.max_states);
  CtxLTS lts = reachable(ctx, opts);
  if (a.dot) {
    io.out << to_dot(lts);
  } else if (a.json) {
    io.out << to_json(lts).dump(2) << "\n";
  } else {
    io.out << lts.num_states() << " states, " << lts.num_edges() << " edges\n";
    for (size_t i = 0; i < lts.num_states(); ++i)
      io.out << "  " << i << (i == lts.initial ? "*" : "") << ": "
             << (lts.states[i].empty() ? "(empty)" : pretty(lts.states[i])) << "\n";
    for (const auto& e : lts.edges) io.out << "  " << e.src << " --" << e.action.str() << "--> " << e.dst << "\n";
  }
  return kOk;
}

}  // namespace detail

/// Runs the command line `args` (without the program name) and returns the
/// exit code.
inline int run(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  detail::Io io{in, out, err};
  CLI::App app{"Multiparty session types: projection, context safety, rely/guarantee typing"};
  app.name("mpst");
  app.require_subcommand(1);

  detail::ProjectArgs pa;
  auto* project = app.add_subcommand("project", "project a global type onto its roles");
  project->add_option("file", pa.file, "global type file, - for stdin")->required();
  project->add_option("--role", pa.role, "only this role");
  project->add_option("--session", pa.session, "session name for the printed endpoints");
  project->add_option("--merge", pa.merge, "merge operator")->check(CLI::IsMember({"full", "plain"}));
  project->add_flag("--json", pa.json);

  detail::CheckArgs ca;
  auto* check = app.add_subcommand("check", "check a safety property of a typing context");
  check->add_option("file", ca.file, "context file, - for stdin")->required();
  check->add_flag("--liveness", ca.liveness);
  check->add_flag("--consistency", ca.consistency);
  check->add_flag("--deadlock", ca.deadlock);
  check->add_flag("--json", ca.json);
  check->add_option("--dot", ca.dot, "write the state space as Graphviz");
  check->add_option("--max-states", ca.max_states)->check(CLI::PositiveNumber);

  detail::TypecheckArgs ta;
  auto* tc = app.add_subcommand("typecheck", "type a process against guarantee/rely contexts");
  tc->add_option("file", ta.file, "process file, - for stdin")->required();
  tc->add_option("--ctx", ta.ctx, "guarantee context")->required();
  tc->add_option("--rely", ta.rely, "rely context");
  tc->add_option("--liveness-at", ta.liveness_at, "where liveness is enforced")
      ->check(CLI::IsMember({"res", "top", "both", "all"}));
  tc->add_flag("--json", ta.json);
  tc->add_option("--max-states", ta.max_states)->check(CLI::PositiveNumber);

  detail::SrArgs sa;
  auto* sr = app.add_subcommand("sr", "explore reductions and re-check typing after each one");
  sr->add_option("file", sa.file, "process file, - for stdin")->required();
  sr->add_option("--ctx", sa.ctx, "typing context")->required();
  sr->add_option("--depth", sa.depth, "maximum reduction sequence length")->required();
  sr->add_flag("--json", sa.json);
  sr->add_option("--max-states", sa.max_states)->check(CLI::PositiveNumber);

  detail::LtsArgs la;
  auto* lts = app.add_subcommand("lts", "dump the reachable state space of a typing context");
  lts->add_option("file", la.file, "context file, - for stdin")->required();
  lts->add_flag("--dot", la.dot);
  lts->add_flag("--json", la.json);
  lts->add_option("--max-states", la.max_states)->check(CLI::PositiveNumber);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mpst: " << e.what() << "\n";
    return kParse;
  }

  try {
    if (*project) return detail::project_cmd(pa, io);
    if (*check) return detail::check_cmd(ca, io);
    if (*tc) return detail::typecheck_cmd(ta, io);
    if (*sr) return detail::sr_cmd(sa, io);
    if (*lts) return detail::lts_cmd(la, io);
  } catch (const ProjectionUndefined& e) {
    err << "mpst: " << e.what() << "\n";
    return kProjection;
  } catch (const StateLimitExceeded& e) {
    err << "mpst: " << e.what() << "\n";
    return kLimit;
  } catch (const Error& e) {
    // parse errors, ill-formed terms, unreadable files, bad flags
    err << "mpst: " << e.what() << "\n";
    return kParse;
  }
  return kParse;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), std::cin, std::cout, std::cerr);
}

}  // namespace mpst::cli

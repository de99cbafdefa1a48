#include <gtest/gtest.h>

#include <functional>

#include "mpst/mpst.hpp"

using namespace mpst;

namespace {

const char* kThreeRoleGlobal =
    "p->q{ m1(int). q->r{ m2(str). r->p{ m3(bool). end } }, stop. q->r{ quit. end } }";

GlobalType three_role_global_by_hand() {
  Role p("p"), q("q"), r("r");
  auto m3 = GlobalType::comm(r, p, {{Label("m3"), Sort::Bool(), GlobalType::end()}});
  auto m2 = GlobalType::comm(q, r, {{Label("m2"), Sort::Str(), m3}});
  auto quit = GlobalType::comm(q, r, {{Label("quit"), Sort::Unit(), GlobalType::end()}});
  return GlobalType::comm(p, q, {{Label("m1"), Sort::Int(), m2}, {Label("stop"), Sort::Unit(), quit}});
}

void expect_parse_error(const std::function<void()>& f, int line, int col) {
  try {
    f();
    FAIL() << "no ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), static_cast<size_t>(line)) << e.what();
    EXPECT_EQ(e.column(), static_cast<size_t>(col)) << e.what();
  }
}

}  // namespace

TEST(ParseGlobal, ThreeRoleType) { EXPECT_EQ(parse_global(kThreeRoleGlobal), three_role_global_by_hand()); }

TEST(ParseGlobal, EndAndSelfCommunication) {
  EXPECT_EQ(parse_global("end"), GlobalType::end());
  try {
    parse_global("p->p{ l. end }");
    FAIL();
  } catch (const WellFormednessError& e) {
    EXPECT_EQ(e.reason(), "self-communication");
  }
}

TEST(ParseGlobal, OpenTypeRejected) { EXPECT_THROW(parse_global("p->q{ a. X }"), WellFormednessError); }

TEST(ParseLocal, Examples) {
  LocalType sp = parse_local("q!{ m1(int). r?{ m3(bool). end }, stop. end }");
  EXPECT_EQ(sp.kind(), LocalType::Kind::kSelect);
  EXPECT_EQ(sp.peer(), Role("q"));
  EXPECT_EQ(sp.find(Label("stop"))->sort, Sort::Unit());

  LocalType loop = parse_local("rec X. q!{ l(int). X }");
  LocalType by_hand = LocalType::rec("X", LocalType::select(Role("q"), {{Label("l"), Sort::Int(), LocalType::var("X")}}));
  EXPECT_EQ(loop, by_hand);
}

TEST(ParseLocal, EmptyChoiceIsParseError) {
  expect_parse_error([] { parse_local("q!{ }"); }, 1, 5);
}

TEST(ParseLocal, ErrorPositionsCountLines) {
  expect_parse_error([] { parse_local("q!{ a.\n  end,\n  b. q?{ c end } }"); }, 3, 12);
}

TEST(ParseLocal, KeywordsAreNotNames) { EXPECT_THROW(parse_local("end!{ a. end }"), ParseError); }

TEST(ParseContext, Examples) {
  TypingContext one = parse_context("s[p]: end");
  EXPECT_EQ(one.size(), 1u);
  EXPECT_TRUE(one.contains(Endpoint("s", Role("p"))));
  EXPECT_TRUE(parse_context("").empty());
  EXPECT_TRUE(parse_context("// nothing\n").empty());
  EXPECT_THROW(parse_context("s[p]: end, s[p]: end"), DuplicateEndpoint);
}

TEST(ParseProcess, Examples) {
  EXPECT_EQ(parse_process("0"), Process::nil());
  Process pp = parse_process("s[p][q]!m1(42). s[p][r]?{ m3(b). 0 }");
  ASSERT_EQ(pp.kind(), Process::Kind::kSelect);
  EXPECT_EQ(pp.arg(), Expr::integer(42));
  EXPECT_EQ(pp.cont().kind(), Process::Kind::kBranch);
  EXPECT_EQ(pp.cont().arms().at(0).binder, "b");
  EXPECT_EQ(parse_process("(new t)(0 | 0)"), Process::res("t", Process::par(Process::nil(), Process::nil())));
}

TEST(ParseProcess, ParallelIsLeftAssociativeAndLoosest) {
  Process p = parse_process("s[p][q]!a(). 0 | 0 | 0");
  ASSERT_EQ(p.kind(), Process::Kind::kPar);
  EXPECT_EQ(p.left().kind(), Process::Kind::kPar);
  EXPECT_EQ(p.left().left().kind(), Process::Kind::kSelect);
}

TEST(ParseProcess, ScopeErrors) {
  EXPECT_THROW(parse_process("s[p][q]!a(x). 0"), UnboundVariable);
  EXPECT_THROW(parse_process("X"), UnboundVariable);
  EXPECT_THROW(parse_process("mu X. X"), WellFormednessError);
  EXPECT_NO_THROW(parse_process("s[q][p]?{ d(c). c[r]!a(1). 0 }"));
  EXPECT_THROW(parse_process("s[q][p]?{ a(x). 0, a(y). 0 }"), WellFormednessError);
}

TEST(ParseExpr, Operators) {
  EXPECT_EQ(parse_expr("1 < 2"), Expr::lt(Expr::integer(1), Expr::integer(2)));
  EXPECT_EQ(parse_expr("-3 == (4)"), Expr::eq(Expr::integer(-3), Expr::integer(4)));
  EXPECT_EQ(parse_expr("\"a\\\"b\\n\""), Expr::string("a\"b\n"));
  EXPECT_EQ(parse_expr("s[p]"), Expr::chan(Endpoint("s", Role("p"))));
  EXPECT_EQ(parse_expr("()"), Expr::unit());
  EXPECT_THROW(parse_expr("99999999999999999999"), ParseError);
}

TEST(Pretty, Forms) {
  EXPECT_EQ(pretty(LocalType::end()), "end");
  EXPECT_EQ(pretty(parse_global(kThreeRoleGlobal)), kThreeRoleGlobal);
  LocalType sp = parse_local("q!{ m1(int). r?{ m3(bool). end }, stop. end }");
  EXPECT_EQ(parse_local(pretty(sp)), sp);
  EXPECT_EQ(pretty(parse_process("if 1 < 2 then 0 else (0 | 0)")), "if 1 < 2 then 0 else (0 | 0)");
  EXPECT_EQ(pretty(parse_process("s[p][q]!quit(). 0")), "s[p][q]!quit(). 0");
  EXPECT_EQ(pretty(parse_process("0 | (0 | 0)")), "0 | (0 | 0)");
}

TEST(Pretty, ErrorMessageShape) {
  try {
    parse_local("q!{ }", "f.local");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()), "f.local:1:5: expected label, found '}'");
  }
}

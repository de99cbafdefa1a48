#include <gtest/gtest.h>

#include "mpst/mpst.hpp"

using namespace mpst;

namespace {

LocalType L(const char* s) { return parse_local(s); }

}  // namespace

TEST(Names, RejectMalformedIdentifiers) {
  EXPECT_NO_THROW(Role("p1"));
  EXPECT_NO_THROW(Label("m_1"));
  EXPECT_THROW(Role(""), WellFormednessError);
  EXPECT_THROW(Role("1p"), WellFormednessError);
  EXPECT_THROW(Label("a-b"), WellFormednessError);
}

TEST(Types, EndIsDefault) {
  LocalType t;
  EXPECT_TRUE(t.is_end());
  EXPECT_EQ(t, LocalType::end());
  EXPECT_EQ(GlobalType().kind(), GlobalType::Kind::kEnd);
}

TEST(Types, ChoicesNeedDistinctLabels) {
  EXPECT_THROW(LocalType::select(Role("q"), {}), WellFormednessError);
  std::vector<LocalBranch> dup{{Label("a"), Sort::Int(), {}}, {Label("a"), Sort::Str(), {}}};
  EXPECT_THROW(LocalType::branch(Role("q"), dup), WellFormednessError);
}

TEST(Types, SelfCommunicationRejected) {
  try {
    GlobalType::comm(Role("p"), Role("p"), {{Label("l"), Sort::Unit(), {}}});
    FAIL();
  } catch (const WellFormednessError& e) {
    EXPECT_EQ(e.reason(), "self-communication");
  }
}

TEST(Types, RecursionMustBeGuarded) {
  EXPECT_THROW(LocalType::rec("X", LocalType::var("X")), WellFormednessError);
  EXPECT_THROW(LocalType::rec("X", LocalType::rec("Y", LocalType::var("X"))), WellFormednessError);
  EXPECT_THROW(GlobalType::rec("X", GlobalType::var("X")), WellFormednessError);
  EXPECT_NO_THROW(L("rec X. q!{ l(int). X }"));
}

TEST(Types, EqualityIgnoresBranchOrder) {
  EXPECT_EQ(L("q!{ a. end, b(int). end }"), L("q!{ b(int). end, a. end }"));
  EXPECT_NE(L("q!{ a. end }"), L("q?{ a. end }"));
  EXPECT_NE(L("q!{ a(int). end }"), L("q!{ a(str). end }"));
}

TEST(Types, FreeVariables) {
  auto open = LocalType::select(Role("q"), {{Label("a"), Sort::Unit(), LocalType::var("X")}});
  EXPECT_EQ(free_vars(open), std::set<std::string>{"X"});
  EXPECT_FALSE(is_closed(open));
  EXPECT_TRUE(is_closed(LocalType::rec("X", open)));
  EXPECT_THROW(require_closed(open), WellFormednessError);
}

TEST(Unfold, EndIsFixedPoint) { EXPECT_EQ(unfold(LocalType::end()), LocalType::end()); }

TEST(Unfold, OneStep) {
  EXPECT_EQ(unfold(L("rec X. q!{ l(int). X }")), L("q!{ l(int). rec X. q!{ l(int). X } }"));
}

TEST(Unfold, NestedBinders) {
  LocalType t = L("rec X. rec Y. q?{ a. X }");
  LocalType expected =
      LocalType::rec("Y", LocalType::branch(Role("q"), {{Label("a"), Sort::Unit(), t}}));
  EXPECT_EQ(unfold(t), expected);
  EXPECT_EQ(parse_local(pretty(unfold(t))), expected);
  EXPECT_EQ(unfold_all(t).kind(), LocalType::Kind::kBranch);
}

TEST(Unfold, SubstitutionRespectsShadowing) {
  LocalType inner = L("rec X. q!{ a. X }");
  LocalType body = LocalType::select(Role("q"), {{Label("b"), Sort::Unit(), inner}, {Label("c"), Sort::Unit(), LocalType::var("X")}});
  LocalType sub = substitute(body, "X", LocalType::end());
  EXPECT_EQ(sub.find(Label("b"))->cont, inner);
  EXPECT_TRUE(sub.find(Label("c"))->cont.is_end());
}

TEST(Context, ComposeIdentityAndOverlap) {
  TypingContext a, b;
  b.add(Endpoint("s", Role("p")), LocalType::end());
  EXPECT_EQ(compose(a, b), b);
  EXPECT_THROW(compose(b, b), OverlappingEndpoint);
}

TEST(Context, ComposeRebuildsThreeRoleContext) {
  TypingContext whole = parse_context(
      "s[p]: q!{ m1(int). r?{ m3(bool). end }, stop. end },"
      "s[q]: p?{ m1(int). r!{ m2(str). end }, stop. r!{ quit. end } },"
      "s[r]: q?{ m2(str). p!{ m3(bool). end }, quit. end }");
  TypingContext g, r;
  for (const auto& [e, t] : whole) (e.role == Role("p") ? g : r).add(e, t);
  EXPECT_EQ(compose(g, r), whole);
  EXPECT_EQ(compose(r, g), whole);
}

TEST(Context, RestrictAndSessions) {
  TypingContext c = parse_context("s[p]: end, t[q]: end, s[q]: end");
  EXPECT_EQ(c.sessions(), (std::vector<std::string>{"s", "t"}));
  EXPECT_EQ(c.restrict_to("s").size(), 2u);
  EXPECT_TRUE(c.restrict_to("u").empty());
}

TEST(Subtype, Examples) {
  EXPECT_TRUE(subtype(LocalType::end(), LocalType::end()));
  EXPECT_TRUE(subtype(L("q!{ m1(int). end }"), L("q!{ m1(int). end, stop. end }")));
  EXPECT_FALSE(subtype(L("q?{ m1(int). end }"), L("q?{ m1(int). end, stop. end }")));
  EXPECT_TRUE(subtype(L("q?{ m1(int). end, stop. end }"), L("q?{ m1(int). end }")));
  EXPECT_FALSE(subtype(L("q!{ m1(int). end, stop. end }"), L("q!{ m1(int). end }")));
}

TEST(Subtype, PeersAndSortsAreInvariant) {
  EXPECT_FALSE(subtype(L("q!{ a(int). end }"), L("r!{ a(int). end }")));
  EXPECT_FALSE(subtype(L("q!{ a(int). end }"), L("q!{ a(str). end }")));
  EXPECT_FALSE(subtype(L("q!{ a. end }"), L("end")));
  EXPECT_FALSE(subtype(L("end"), L("q?{ a. end }")));
}

TEST(Subtype, RecursiveTypesComparedUpToUnfolding) {
  LocalType t = L("rec X. q!{ a. X }");
  LocalType twice = L("q!{ a. rec Y. q!{ a. Y } }");
  EXPECT_TRUE(subtype(t, twice));
  EXPECT_TRUE(subtype(twice, t));
  EXPECT_TRUE(subtype(L("rec X. q!{ a. X }"), L("rec X. q!{ a. X, b. end }")));
  EXPECT_FALSE(subtype(L("rec X. q!{ a. X, b. end }"), L("rec X. q!{ a. X }")));
}

TEST(Subtype, SessionPayloadsByMutualSubtyping) {
  EXPECT_TRUE(subtype(L("q!{ d(<r!{ a. end }>). end }"), L("q!{ d(<rec X. r!{ a. end }>). end }")));
  EXPECT_FALSE(subtype(L("q!{ d(<r!{ a. end }>). end }"), L("q!{ d(<r!{ a. end, b. end }>). end }")));
}

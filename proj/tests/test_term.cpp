#include <gtest/gtest.h>

#include "support.hpp"

using namespace semwb;

namespace {

Type et() { return Type::fn(Type::e(), Type::t()); }

TEST(Types, ParsePrint) {
  EXPECT_EQ(parse_type("<<e,t>,t>").str(), "<<e,t>,t>");
  EXPECT_EQ(parse_type("<s,<e,t>>"), Type::fn(Type::s(), et()));
  EXPECT_THROW(parse_type("<e,t"), Error);
}

TEST(Terms, InferredTypes) {
  EXPECT_EQ(type_of(parse_term("lam(x, laugh:<e,t>(x))")), et());
  // unconstrained result types default to e
  EXPECT_EQ(type_of(parse_term("lam(x, laugh(x))")), Type::fn(Type::e(), Type::e()));
  // DRS conditions are truth-valued, which fixes laugh
  EXPECT_EQ(type_of(parse_term("drs([x],[eq(x,anna),laugh(x)])")), Type::t());
  EXPECT_EQ(type_of(parse_term("lam(P, app(down(P), anna))", nullptr, Type::fn(Type::fn(Type::s(), et()), Type::t()))),
            Type::fn(Type::fn(Type::s(), et()), Type::t()));
  EXPECT_EQ(type_of(parse_term("forall(x, man(x), exists(y, woman(y), love(x,y)))")), Type::t());
}

TEST(Terms, RoundTripWithTypes) {
  tests::TermGen gen(7);
  for (int i = 0; i < 200; ++i) {
    Term t = gen.of(gen.some_type(), 5);
    std::string text = to_string(t, {true});
    Term back = parse_term(text);
    EXPECT_TRUE(back == t) << text;
  }
}

TEST(Terms, SyntaxErrorsCarryPosition) {
  try {
    parse_term("lam(x, laugh(x)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("line 1:"), std::string::npos);
  }
}

TEST(Terms, IllTypedApplicationRejected) {
  EXPECT_THROW(parse_term("app(anna, anna)"), Error);
}

TEST(Alpha, RenamingBoundVariablesOnly) {
  EXPECT_TRUE(alpha_eq(parse_term("lam(x, laugh(x))"), parse_term("lam(y, laugh(y))")));
  EXPECT_FALSE(alpha_eq(parse_term("lam(x, love(x, var(y)))"), parse_term("lam(z, love(z, var(w)))")));
  EXPECT_TRUE(alpha_eq(parse_term("drs([x],[man(x)])"), parse_term("drs([y],[man(y)])")));
  EXPECT_FALSE(alpha_eq(parse_term("drs([x],[man(x)])"), parse_term("drs([x],[woman(x)])")));
}

TEST(FreeVariables, BindersAndReferents) {
  EXPECT_TRUE(free_vars(parse_term("lam(x, laugh(x))")).empty());
  auto fv = free_var_names(parse_term("lam(x, love(x, var(y)))"));
  EXPECT_EQ(fv, (NameSet{"y"}));
  // a referent declared on the left of a merge binds the right operand
  EXPECT_TRUE(free_vars(parse_term("merge(drs([x],[man(x)]), drs([],[laugh(x)]))")).empty());
}

TEST(Substitution, AvoidsCapture) {
  Term t = parse_term("lam(y, love(var(x), y))");
  Term y = Term::var("y", Type::e());
  Term r = substitute(t, {{Var{"x", Type::e()}, y}});
  // the binder must have been renamed: the result is λy'.love(y, y')
  ASSERT_TRUE(r.is(TermKind::Lam));
  EXPECT_NE(r.name(), "y");
  EXPECT_TRUE(alpha_eq(r, parse_term("lam(z, love(var(y), z))")));
}

TEST(Substitution, PreservesTypeProperty) {
  tests::TermGen gen(11);
  for (int i = 0; i < 200; ++i) {
    Term t = gen.of(Type::t(), 5);
    ASSERT_TRUE(well_typed(t)) << to_string(t);
    auto fv = free_vars(t);
    if (fv.empty()) continue;
    Var v = *fv.begin();
    Term rep = v.type == Type::e() ? Term::constant("anna", v.type) : Term::constant("k", v.type);
    Term s = substitute(t, {{v, rep}});
    EXPECT_TRUE(well_typed(s));
    EXPECT_EQ(type_of(s), type_of(t));
    EXPECT_EQ(free_vars(s).count(v), 0u);
  }
}

TEST(Paths, AtAndReplace) {
  Term t = parse_term("app(lam(x, laugh(x)), anna)");
  EXPECT_TRUE(t.at({0}).is(TermKind::Lam));
  Term r = t.replace_at({1}, Term::constant("bill", Type::e()));
  EXPECT_EQ(to_string(r), "app(lam(x,laugh(x)),bill)");
}

}  // namespace

#include <gtest/gtest.h>

#include "support.hpp"

using namespace semwb;

namespace {

const char* kDonkey =
    "drs([],[implies(drs([x,y],[farmer(x),donkey(y),own(x,y)]),drs([z],[donkey(z),beat(x,z)]))])";

TEST(Translate, AnnaLaughs) {
  Term f = drs_to_fol(parse_term("drs([x],[eq(x,anna),laugh(x)])"));
  EXPECT_TRUE(alpha_eq(f, parse_term("exists(x, and(eq(x,anna), laugh:<e,t>(x)))"))) << to_string(f);
  EXPECT_TRUE(is_first_order(f));
}

TEST(Translate, DonkeyConditionalIsUniversal) {
  Term f = drs_to_fol(parse_term(kDonkey));
  Term expected = parse_term(
      "forall(x, forall(y, implies(and(farmer:<e,t>(x), donkey:<e,t>(y), own:<e,<e,t>>(x,y)),"
      " exists(z, and(donkey(z), beat:<e,<e,t>>(x,z))))))");
  EXPECT_TRUE(alpha_eq(f, expected)) << to_string(f);
}

TEST(Translate, FreeReferentRejected) {
  try {
    drs_to_fol(parse_term("drs([],[walk(var(x))])"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FreeReferent);
  }
}

// Hand-computed truth values for the donkey sentence.
TEST(Evaluate, DonkeyByHand) {
  Term d = parse_term(kDonkey);
  FiniteModel beats_all = parse_model(
      "domain f d1 d2. pred farmer = {f}. pred donkey = {d1, d2}. pred own = {(f,d1)}. pred beat = {(f,d1)}.");
  FiniteModel spares = parse_model(
      "domain f d1 d2. pred farmer = {f}. pred donkey = {d1, d2}. pred own = {(f,d1),(f,d2)}. pred beat = {(f,d1)}.");
  FiniteModel no_farmer = parse_model("domain a. pred farmer = {}. pred donkey = {}. pred own = {}. pred beat = {}.");
  EXPECT_TRUE(eval_drs(d, beats_all));
  // the weak reading: beating some donkey suffices
  EXPECT_TRUE(eval_drs(d, spares));
  EXPECT_TRUE(eval_drs(d, no_farmer));
  FiniteModel lazy = parse_model(
      "domain f d1. pred farmer = {f}. pred donkey = {d1}. pred own = {(f,d1)}. pred beat = {}.");
  EXPECT_FALSE(eval_drs(d, lazy));
  EXPECT_FALSE(eval_fol(drs_to_fol(d), lazy));
}

TEST(Evaluate, ModelTextRoundTrip) {
  FiniteModel m = parse_model("domain a b. pred laugh = {a}. pred love = {(a,b)}. const anna = a.");
  FiniteModel back = parse_model(to_string(m));
  EXPECT_EQ(back.domain, m.domain);
  EXPECT_EQ(back.predicates, m.predicates);
  EXPECT_EQ(back.constants, m.constants);
  EXPECT_TRUE(eval_drs(parse_term("drs([x],[eq(x,anna),laugh(x)])"), m));
}

TEST(Evaluate, TranslationPreservesTruthProperty) {
  tests::DrsGen gen(404);
  for (int i = 0; i < 40; ++i) {
    Term d = gen.drs(2);
    Term f = drs_to_fol(d);
    for (int n = 1; n <= 2; ++n) {
      ModelSpace space(signature_of(d), n);
      space.for_each([&](const PackedModel& pm) {
        FiniteModel m = space.unpack(pm);
        ASSERT_EQ(eval_drs(d, m), eval_fol(f, m)) << to_string(d) << "\n" << to_string(m);
      });
    }
  }
}

TEST(Evaluate, CompiledAgreesWithReference) {
  tests::DrsGen gen(405);
  for (int i = 0; i < 30; ++i) {
    Term d = gen.drs(2);
    Term f = drs_to_fol(d);
    ModelSpace space(signature_of(d), 2);
    auto cd = CompiledEvaluator::drs(d, space);
    auto cf = CompiledEvaluator::fol(f, space);
    space.for_each([&](const PackedModel& pm) {
      FiniteModel m = space.unpack(pm);
      ASSERT_EQ(cd(pm), eval_drs(d, m));
      ASSERT_EQ(cf(pm), eval_fol(f, m));
    });
  }
}

TEST(Evaluate, ModelSpaceCountsAllModels) {
  ModelSignature sig;
  sig.add_predicate("p", 1);
  sig.add_predicate("r", 2);
  sig.constants.insert("anna");
  ModelSpace space(sig, 2);
  // 2 cells for p, 4 for r, 2 choices for anna
  EXPECT_EQ(space.model_count(), (1u << 6) * 2u);
  std::uint64_t n = 0;
  space.for_each([&](const PackedModel&) { ++n; });
  EXPECT_EQ(n, space.model_count());
}

}  // namespace

#include <gtest/gtest.h>

#include "support.hpp"

using namespace semwb;

namespace {

FeatureStructure F(const char* s) { return parse_fs(s); }

TEST(Features, UnifyCompatible) {
  auto u = unify(F("[cat=np]"), F("[num=sg]"));
  ASSERT_TRUE(u);
  EXPECT_EQ(u->atom_at("cat"), "np");
  EXPECT_EQ(u->atom_at("num"), "sg");
}

TEST(Features, ClashFails) {
  EXPECT_FALSE(unify(F("[num=sg]"), F("[num=pl]")));
  EXPECT_FALSE(unify(F("[agr=[num=sg]]"), F("[agr=pl]")));
}

TEST(Features, ReentrancyPropagates) {
  auto u = unify(F("[agr=#1, subj=[agr=#1]]"), F("[agr=[num=sg]]"));
  ASSERT_TRUE(u);
  EXPECT_EQ(u->at({"subj", "agr", "num"})->atom_value(), "sg");
  // and the shared value still clashes through the other path
  EXPECT_FALSE(unify(*u, F("[subj=[agr=[num=pl]]]")));
}

TEST(Features, PrintParseRoundTrip) {
  for (const char* s : {"[cat=np, num=sg]", "[agr=#1, subj=[agr=#1]]", "[a=[b=[c=d]]]", "[]"}) {
    FeatureStructure fs = F(s);
    EXPECT_EQ(parse_fs(fs.str()), fs) << s;
  }
}

TEST(Features, UnificationIsCommutativeAndIdempotent) {
  std::vector<FeatureStructure> pool{F("[cat=np]"), F("[num=sg]"), F("[num=pl]"), F("[agr=#1, subj=[agr=#1]]"),
                                     F("[agr=[num=sg]]"), F("[subj=[agr=[per=3]]]"), F("[]")};
  for (const auto& a : pool) {
    auto self = unify(a, a);
    ASSERT_TRUE(self);
    EXPECT_EQ(*self, a);
    for (const auto& b : pool) {
      auto ab = unify(a, b), ba = unify(b, a);
      ASSERT_EQ(ab.has_value(), ba.has_value());
      if (ab) {
        EXPECT_EQ(*ab, *ba);
      }
    }
  }
}

TEST(Features, AssociativeOnPool) {
  std::vector<FeatureStructure> pool{F("[agr=#1, subj=[agr=#1]]"), F("[agr=[num=sg]]"), F("[subj=[agr=[per=3]]]"),
                                     F("[cat=s]"), F("[subj=[agr=[num=pl]]]")};
  for (const auto& a : pool)
    for (const auto& b : pool)
      for (const auto& c : pool) {
        std::optional<FeatureStructure> l, r;
        if (auto ab = unify(a, b)) l = unify(*ab, c);
        if (auto bc = unify(b, c)) r = unify(a, *bc);
        ASSERT_EQ(l.has_value(), r.has_value());
        if (l) {
          EXPECT_EQ(*l, *r);
        }
      }
}

TEST(Features, SyntaxError) { EXPECT_THROW(parse_fs("[cat=np"), Error); }

}  // namespace

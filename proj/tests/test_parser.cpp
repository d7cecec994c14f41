#include <gtest/gtest.h>

#include "support.hpp"

using namespace semwb;

namespace {

const Grammar& grammar(const std::string& name) {
  static const Registry reg = bundled_registry();
  return *reg.find_grammar(name);
}

std::vector<int> preorder_ids(const SynTree& t) {
  std::vector<int> out{t.id};
  for (const auto& c : t.children)
    for (int id : preorder_ids(c)) out.push_back(id);
  return out;
}

TEST(Parser, AnnaLaughsTree) {
  auto trees = parse(tokenize("Anna laughs."), grammar("simple-psg"), ParserKind::Chart);
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_EQ(to_string(trees[0]), "s(np(anna),vp(laughs))");
  EXPECT_EQ(trees[0].size(), 3u);
  EXPECT_EQ(preorder_ids(trees[0]), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(trees[0].children[1].start, 1);
  EXPECT_EQ(trees[0].children[1].end, 2);
}

TEST(Parser, TransitiveSentenceTree) {
  auto trees = parse(tokenize("every man loves a woman"), grammar("simple-psg"), ParserKind::Chart);
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_EQ(to_string(trees[0]), "s(np(det(every),n(man)),vp(tv(loves),np(det(a),n(woman))))");
  EXPECT_EQ(preorder_ids(trees[0]), (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(Parser, AgreementInFeatureGrammar) {
  EXPECT_FALSE(parse_all(tokenize("the men laugh"), grammar("feature-psg"), ParserKind::Chart).empty());
  EXPECT_TRUE(parse_all(tokenize("every men laugh"), grammar("feature-psg"), ParserKind::Chart).empty());
  EXPECT_TRUE(parse_all(tokenize("the man laugh"), grammar("feature-psg"), ParserKind::Chart).empty());
  // the plain grammar has no agreement
  EXPECT_FALSE(parse_all(tokenize("every men laugh"), grammar("simple-psg"), ParserKind::Chart).empty());
}

TEST(Parser, CategorialIncremental) {
  auto trees = parse(tokenize("anna laughs"), grammar("cg"), ParserKind::Incremental);
  ASSERT_FALSE(trees.empty());
  EXPECT_EQ(trees[0].rule, "fa");
  EXPECT_TRUE(parse_all(tokenize("laughs anna"), grammar("cg"), ParserKind::Incremental).empty());
}

TEST(Parser, Errors) {
  try {
    parse(tokenize("anna sings"), grammar("simple-psg"), ParserKind::Chart);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownWord);
  }
  try {
    parse(tokenize("anna"), grammar("simple-psg"), ParserKind::Chart);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoParse);
  }
  try {
    parse(tokenize("anna laughs"), grammar("simple-psg"), ParserKind::Incremental);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompatibleParser);
  }
}

TEST(Parser, ChartPushPopIsIncremental) {
  ChartParser chart(grammar("simple-psg"));
  chart.push("anna");
  EXPECT_TRUE(chart.complete().empty());
  chart.push("laughs");
  EXPECT_EQ(chart.complete().size(), 1u);
  chart.pop();
  EXPECT_EQ(chart.length(), 1u);
  EXPECT_TRUE(chart.complete().empty());
  chart.push("walks");
  EXPECT_EQ(chart.complete().size(), 1u);
}

TEST(Parser, TreesAreWellFormed) {
  for (const auto& s : tests::corpus()) {
    auto trees = parse_all(tokenize(s), grammar("simple-psg"), ParserKind::Chart);
    ASSERT_FALSE(trees.empty()) << s;
    for (const auto& t : trees) {
      auto ids = preorder_ids(t);
      for (size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], static_cast<int>(i));
      EXPECT_EQ(t.start, 0);
      EXPECT_EQ(t.end, static_cast<int>(tokenize(s).size()));
    }
  }
}

// Generation oracle: a word-class sequence is a sentence iff its category
// sequence is a sentential form of the context-free grammar.
TEST(ParserOracle, SimplePsgAgainstGeneration) {
  const Grammar& g = grammar("simple-psg");
  auto forms = tests::sentential_forms(g, 5);
  auto classes = tests::word_classes(g);
  tests::for_each_sequence(classes, 5, [&](const std::vector<std::string>& words) {
    std::vector<std::string> cats;
    for (const auto& w : words) cats.push_back(category_name(g.lookup(w)[0]->category));
    bool generated = forms.count(cats) > 0;
    ASSERT_EQ(!parse_all(words, g, ParserKind::Chart).empty(), generated);
  });
}

TEST(ParserOracle, FeaturePsgAgainstExhaustiveRecognizer) {
  const Grammar& g = grammar("feature-psg");
  tests::ExhaustiveRecognizer rec(g);
  tests::for_each_sequence(tests::word_classes(g), 4, [&](const std::vector<std::string>& words) {
    ASSERT_EQ(!parse_all(words, g, ParserKind::Chart).empty(), rec(words));
  });
}

TEST(ParserOracle, IncrementalCgAgainstExhaustiveRecognizer) {
  const Grammar& g = grammar("cg");
  tests::ExhaustiveRecognizer rec(g);
  tests::for_each_sequence(tests::word_classes(g), 4, [&](const std::vector<std::string>& words) {
    ASSERT_EQ(!parse_all(words, g, ParserKind::Incremental).empty(), rec(words));
  });
}

TEST(Grammar, TextRoundTrip) {
  for (const char* name : {"simple-psg", "feature-psg", "cg"}) {
    const Grammar& g = grammar(name);
    Grammar back = parse_grammar(to_string(g), name);
    EXPECT_EQ(to_string(back), to_string(g));
    EXPECT_EQ(back.rules.size(), g.rules.size());
    EXPECT_EQ(back.lexicon.size(), g.lexicon.size());
  }
}

}  // namespace

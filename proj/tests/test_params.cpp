#include <gtest/gtest.h>

#include "support.hpp"

using namespace semwb;

namespace {

const Registry& reg() {
  static const Registry r = bundled_registry();
  return r;
}

// Independent count: every combination of dimension values, checked
// against the allow lines directly rather than through validate().
size_t brute_force_count() {
  const std::vector<std::string> formalisms{"il", "lgq", "ldrt"}, reducers{"substitution", "metavariable"},
      storages{"none", "cooper", "nested-cooper"}, grammars{"simple-psg", "feature-psg", "cg"},
      parsers{"chart", "incremental"}, mappings{"rule-to-rule", "template"};
  const std::set<std::pair<std::string, std::string>> allowed{
      {"chart", "simple-psg"}, {"chart", "feature-psg"}, {"incremental", "cg"}};
  size_t n = 0;
  for (const auto& f : formalisms)
    for (const auto& r : reducers)
      for (const auto& s : storages)
        for (const auto& g : grammars)
          for (const auto& p : parsers)
            for (const auto& m : mappings) {
              (void)f, (void)r, (void)s, (void)m;
              n += allowed.count({p, g});
            }
  return n;
}

TEST(Params, CountMatchesBruteForce) {
  auto all = reg().enumerate_valid();
  EXPECT_EQ(all.size(), brute_force_count());
  EXPECT_EQ(all.size(), 108u);
  std::set<std::string> distinct;
  for (const auto& p : all) distinct.insert(to_string(p));
  EXPECT_EQ(distinct.size(), all.size());
}

TEST(Params, TextRoundTrip) {
  for (const auto& p : reg().enumerate_valid()) {
    ParamSet back = parse_params(to_string(p));
    EXPECT_EQ(back, p);
  }
  ParamSet d = parse_params("formalism=ldrt tree.orientation=vertical");
  EXPECT_EQ(d.formalism, Formalism::LDRT);
  EXPECT_EQ(d.display.at("tree.orientation"), "vertical");
  EXPECT_EQ(parse_params(to_string(d)), d);
}

TEST(Params, DefaultsAreValid) {
  ParamSet p;
  EXPECT_TRUE(reg().valid(p));
  EXPECT_EQ(to_string(p),
            "formalism=il reducer=substitution storage=none grammar=simple-psg parser=chart mapping=rule-to-rule");
}

TEST(Params, InvalidCombinationsAreRejected) {
  auto code = [](const std::string& text) -> std::optional<ErrorCode> {
    try {
      reg().validate(parse_params(text));
    } catch (const Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  EXPECT_EQ(code("parser=incremental grammar=simple-psg"), ErrorCode::InvalidParams);
  EXPECT_EQ(code("parser=chart grammar=cg"), ErrorCode::InvalidParams);
  EXPECT_EQ(code("grammar=nonesuch"), ErrorCode::InvalidParams);
  EXPECT_EQ(code("formalism=modal"), ErrorCode::InvalidParams);
  EXPECT_EQ(code("storage=sometimes"), ErrorCode::InvalidParams);
  EXPECT_EQ(code("parser=incremental grammar=cg"), std::nullopt);
  EXPECT_THROW(parse_params("formalism"), Error);
}

TEST(Params, UnregisteredValueIsInvalid) {
  Registry r = bundled_registry();
  r.storages = {StorageMode::None};
  EXPECT_FALSE(r.valid(parse_params("storage=cooper")));
  EXPECT_EQ(r.enumerate_valid().size(), 108u / 3);
}

TEST(Params, CompatTableRoundTrip) {
  CompatTable back = parse_compat(to_string(reg().compat));
  EXPECT_EQ(back.allows, reg().compat.allows);
  EXPECT_THROW(parse_compat("permit parser=chart\n"), Error);
  CompatTable free = parse_compat("allow\n");
  EXPECT_TRUE(free.allowed(parse_params("parser=incremental grammar=simple-psg")));
}

TEST(Params, ResolveHandsOutCollaborators) {
  Collaborators c = reg().resolve(parse_params("formalism=lgq grammar=cg parser=incremental mapping=template"));
  EXPECT_EQ(c.grammar->name, "cg");
  EXPECT_EQ(c.formalism, Formalism::LGQ);
  EXPECT_EQ(c.mapping_kind, MappingKind::Template);
  EXPECT_THROW(reg().resolve(parse_params("grammar=cg")), Error);
}

}  // namespace

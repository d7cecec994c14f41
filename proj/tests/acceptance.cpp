// Acceptance run: one PASS/FAIL line per headline criterion, each with its
// measured value and pinned limit. Exits nonzero when any line fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace semwb;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  std::string name;
  double limit_s;  // 0: no time limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Engine& engine() { return bundled_engine(); }

Outcome anna_laughs() {
  DerivationSession il = engine().open_session(tokenize("Anna laughs."), parse_params("formalism=il"));
  Term a = engine().derive(il);
  DerivationSession ldrt = engine().open_session(tokenize("Anna laughs."), parse_params("formalism=ldrt"));
  Term b = engine().derive(ldrt);
  bool ok_il = alpha_eq(a, parse_term("laugh:<e,t>(anna)"));
  bool ok_ldrt = alpha_eq(b, parse_term("drs([x],[eq(x,anna),laugh(x)])"));
  return {ok_il && ok_ldrt, "il=" + to_string(a) + " ldrt=" + to_string(b)};
}

Outcome reducer_equivalence() {
  tests::TermGen gen(2024);
  int n = 0, bad = 0, redexes = 0;
  for (; n < 300; ++n) {
    Term t = gen.of(gen.some_type(), 6);
    Normalized s = normalize(t, ReducerKind::Substitution);
    Normalized m = normalize(t, ReducerKind::Metavariable);
    redexes += !s.trace.steps.empty();
    if (!alpha_eq(s.term, m.term) || !(type_of(s.term) == type_of(t)) || !(type_of(m.term) == type_of(t))) ++bad;
  }
  return {bad == 0 && n >= 100, fmt("%d terms (depth<=6, %d with redexes), %d disagreements", n, redexes, bad)};
}

Outcome storage() {
  // the 2! retrieval orders, written out
  Term wide_every = parse_term("forall(x, man(x), exists(y, woman(y), love(x, y)))");
  Term wide_a = parse_term("exists(y, woman(y), forall(x, man(x), love(x, y)))");
  std::string detail;
  bool ok = true;
  for (const char* mode : {"cooper", "nested-cooper"}) {
    DerivationSession s = engine().open_session(tokenize("every man loves a woman"),
                                                parse_params(std::string("formalism=lgq storage=") + mode));
    ReadingSet rs = engine().readings(s);
    int hits = 0;
    for (const auto& r : rs.readings) hits += alpha_eq(r, wide_every) + alpha_eq(r, wide_a);
    ok = ok && rs.readings.size() == 2 && hits == 2;
    detail += fmt("%s=%zu readings, ", mode, rs.readings.size());
  }
  int sessions = 0, free_index = 0;
  for (const auto& sentence : tests::corpus())
    for (const char* f : {"il", "lgq", "ldrt"}) {
      DerivationSession s = engine().open_session(tokenize(sentence),
                                                  parse_params(std::string("storage=nested-cooper formalism=") + f));
      ReadingSet rs = engine().readings(s);
      ++sessions;
      free_index += static_cast<int>(rs.violations.size());
      for (const auto& r : rs.readings) free_index += contains_kind(r, TermKind::Index);
    }
  return {ok && free_index == 0, detail + fmt("nested over %d corpus sessions: %d readings with a free index", sessions,
                                              free_index)};
}

Outcome translation() {
  std::vector<Term> suite{
      parse_term("drs([],[implies(drs([x,y],[farmer(x),donkey(y),own(x,y)]),drs([],[beat(x,y)]))])"),
      parse_term("drs([x],[eq(x,anna),laugh(x)])"),
      parse_term("drs([],[])"),
  };
  tests::DrsGen gen(511);
  while (suite.size() < 24) suite.push_back(gen.drs(2));
  std::uint64_t models = 0;
  int bad = 0;
  for (const auto& d : suite) {
    Term f = drs_to_fol(d);
    if (!is_first_order(f)) ++bad;
    for (int n = 1; n <= 3; ++n) {
      ModelSpace space(signature_of(d), n);
      auto cd = CompiledEvaluator::drs(d, space);
      auto cf = CompiledEvaluator::fol(f, space);
      space.for_each([&](const PackedModel& pm) {
        ++models;
        if (cd(pm) != cf(pm)) ++bad;
      });
    }
  }
  return {bad == 0 && suite.size() >= 20,
          fmt("%zu DRSs incl. donkey, %llu models (domain 1..3), %d disagreements", suite.size(),
              static_cast<unsigned long long>(models), bad)};
}

Outcome merge_algebra() {
  tests::DrsGen gen(31);
  Term empty = Term::drs({}, {});
  int n = 0, bad = 0;
  for (; n < 250; ++n) {
    Term a = gen.drs(1), b = gen.drs(1), c = gen.drs(1);
    Term ab = drt::merge(a, b);
    bad += !drt::equivalent(ab, drt::merge(b, a));
    bad += !drt::equivalent(drt::merge(ab, c), drt::merge(a, drt::merge(b, c)));
    bad += !drt::equivalent(drt::merge(empty, a), a) || !drt::equivalent(drt::merge(a, empty), a);
    bad += ab.universe().size() != a.universe().size() + b.universe().size();
  }
  return {bad == 0 && n >= 200, fmt("%d triples, %d law violations", n, bad)};
}

Outcome grapher() {
  const char* text = R"({tree 
      {plain-text "S"} 
         {plain-text "NP"} 
         {plain-text "VP"}})";
  DescNode d = parse_desc(text);
  bool round = parse_desc(print_desc(d)) == d && parse_desc(print_desc(d, true)) == d;
  auto boxes = layout(d);
  tests::LayoutCheck c = tests::check_layout(d, boxes);
  std::string svg1 = render_svg(layout(parse_desc(text)));
  std::string svg2 = render_svg(layout(parse_desc(text)));
  bool ok = round && c.max_centering_error <= 0.5 && c.sibling_overlaps == 0 && svg1 == svg2 &&
            tests::xml_well_formed(svg1);
  return {ok, fmt("round-trip=%s centering error=%.3f sibling overlaps=%d svg stable=%s", round ? "yes" : "no",
                  c.max_centering_error, c.sibling_overlaps, svg1 == svg2 ? "yes" : "no")};
}

Outcome params() {
  const Registry& r = engine().registry();
  size_t product = r.formalisms.size() * r.reducers.size() * r.storages.size() * r.grammars.size() *
                   r.parsers.size() * r.mappings.size();
  // exclusions straight from the allow lines: a (parser, grammar) pair is
  // excluded unless some line names exactly that pair
  size_t allowed_pairs = 0;
  for (auto pa : r.parsers)
    for (const auto& g : r.grammars)
      for (const auto& line : r.compat.allows)
        if (line.at("parser") == to_string(pa) && line.at("grammar") == g.name) {
          ++allowed_pairs;
          break;
        }
  size_t pairs = r.parsers.size() * r.grammars.size();
  size_t expected = product / pairs * allowed_pairs;
  size_t count = r.enumerate_valid().size();
  return {count == expected && count >= 72,
          fmt("enumerated %zu, brute force %zu (product %zu minus %zu excluded)", count, expected, product,
              product - expected)};
}

Outcome parser_oracle() {
  const Registry& r = engine().registry();
  std::string detail;
  long mismatches = 0;
  auto chart_run = [&](const char* name, size_t len) {
    const Grammar& g = *r.find_grammar(name);
    ChartParser chart(g);
    tests::ExhaustiveRecognizer rec(g);
    long n = 0, in = 0;
    tests::for_each_prefix(
        tests::word_classes(g), len, [&](const std::string& w) { chart.push(w), rec.push(w); },
        [&](const std::vector<std::string>&) {
          bool b = rec.accepts();
          ++n, in += b, mismatches += chart.accepts() != b;
        },
        [&] { chart.pop(), rec.pop(); });
    detail += fmt("%s chart len<=%zu: %ld sequences, %ld sentences; ", name, len, n, in);
  };
  chart_run("simple-psg", 6);
  chart_run("feature-psg", 5);
  const Grammar& cg = *r.find_grammar("cg");
  tests::ExhaustiveRecognizer rec(cg);
  long n = 0, in = 0;
  tests::for_each_prefix(
      tests::word_classes(cg), 5, [&](const std::string& w) { rec.push(w); },
      [&](const std::vector<std::string>& words) {
        bool b = rec.accepts();
        ++n, in += b, mismatches += parse_all(words, cg, ParserKind::Incremental).empty() == b;
      },
      [&] { rec.pop(); });
  detail += fmt("cg incremental len<=5: %ld sequences, %ld sentences; %ld mismatches", n, in, mismatches);
  return {mismatches == 0, detail};
}

Outcome replay_determinism() {
  std::mt19937 rng(1);
  int sessions = 0, differ = 0;
  size_t events = 0;
  for (const auto& p : engine().registry().enumerate_valid())
    for (const auto& sentence : tests::corpus()) {
      DerivationSession s;
      try {
        s = engine().open_session(tokenize(sentence), p, "replay");
      } catch (const Error&) {
        continue;  // sentence outside this grammar
      }
      for (int i = 0; i < 30; ++i) {
        std::vector<std::pair<int, StepAction>> all;
        for (const auto& [id, n] : s.nodes)
          for (const auto& a : n.applicable) all.push_back({id, a});
        if (all.empty()) break;
        auto [node, a] = all[std::uniform_int_distribution<size_t>(0, all.size() - 1)(rng)];
        engine().apply_step(s, node, a);
      }
      ++sessions;
      events += s.log.size();
      differ += serialize(engine().replay(s.tokens, s.params, s.log, "replay")) != serialize(s);
    }
  return {differ == 0 && sessions > 0,
          fmt("%d sessions (corpus x all valid parameter sets), %zu events, %d differ", sessions, events, differ)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"anna-laughs-end-to-end", 1, anna_laughs},
      {"reducer-strategy-equivalence", 10, reducer_equivalence},
      {"storage-readings-and-keller-safety", 5, storage},
      {"translation-oracle", 30, translation},
      {"merge-algebra", 5, merge_algebra},
      {"grapher-tree-example", 0, grapher},
      {"parameter-registry-count", 0, params},
      {"parser-oracle", 60, parser_oracle},
      {"replay-determinism", 0, replay_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.limit_s == 0 || secs < c.limit_s;
    bool pass = o.pass && in_time;
    failed += !pass;
    std::string limit = c.limit_s == 0 ? "" : fmt(" < %.0fs", c.limit_s);
    std::printf("%s %s: %s [%.2fs%s%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs,
                limit.c_str(), in_time ? "" : " exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include "semwb/api.hpp"
#include "support.hpp"

using namespace semwb;

namespace {

struct CliRun {
  int status;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

CliRun cli(const std::vector<std::string>& args) {
  std::string cmd = quote(SEMWB_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("semwb_cli_" + std::to_string(::getpid()) + "_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

TEST(Cli, DeriveAnnaLaughs) {
  CliRun r = cli({"derive", "anna laughs", "--formalism", "il"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "laugh(anna)\n");
}

TEST(Cli, AllReadings) {
  CliRun r = cli({"derive", "every man loves a woman", "--formalism", "lgq", "--storage", "cooper", "--readings", "all"});
  EXPECT_EQ(r.status, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_NE(ls[0], ls[1]);
  CliRun first = cli({"derive", "every man loves a woman", "--formalism", "lgq", "--storage", "cooper"});
  EXPECT_EQ(lines(first.out).size(), 1u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"derive", "anna"}).status, 1);
  EXPECT_EQ(cli({"derive", "anna sings"}).status, 1);
  EXPECT_EQ(cli({"derive", "anna laughs", "--parser", "incremental"}).status, 2);
  EXPECT_EQ(cli({"derive", "anna laughs", "--formalism", "modal"}).status, 2);
  EXPECT_EQ(cli({"derive", "anna laughs", "--readings", "some"}).status, 2);
  EXPECT_EQ(cli({"frobnicate"}).status, 2);
  EXPECT_EQ(cli({"render", "/nonexistent/file"}).status, 3);
  EXPECT_EQ(cli({"derive", "anna laughs", "--display", "oops"}).status, 2);
}

TEST(Cli, ParamsList) {
  EXPECT_EQ(cli({"params", "list", "--count"}).out, "108\n");
  auto ls = lines(cli({"params", "list"}).out);
  ASSERT_EQ(ls.size(), 109u);
  EXPECT_EQ(ls.back(), "# 108 valid parameter sets");
  EXPECT_EQ(parse_params(ls[0]), bundled_engine().registry().enumerate_valid()[0]);
}

TEST(Cli, TraceAndDesc) {
  CliRun r = cli({"derive", "anna laughs", "--trace"});
  auto ls = lines(r.out);
  ASSERT_GE(ls.size(), 2u);
  for (size_t i = 0; i + 1 < ls.size(); ++i) EXPECT_EQ(ls[i][0], '#') << ls[i];
  EXPECT_EQ(ls.back(), "laugh(anna)");
  CliRun d = cli({"derive", "anna laughs", "--out", "desc"});
  EXPECT_EQ(parse_desc(d.out).tag, "tree");
  CliRun svg = cli({"derive", "anna laughs", "--out", "svg", "--display", "box-nodes=0"});
  EXPECT_TRUE(tests::xml_well_formed(svg.out));
  EXPECT_NE(svg.out.find("<rect"), std::string::npos);
}

TEST(Cli, RenderAndTranslate) {
  std::string desc = temp_file("tree.desc", R"({tree {plain-text "S"} {plain-text "NP"} {plain-text "VP"}})");
  CliRun svg = cli({"render", desc});
  EXPECT_EQ(svg.status, 0);
  EXPECT_EQ(svg.out, render_svg(layout(parse_desc(tests::read_file(desc)))) + "\n");
  CliRun ascii = cli({"render", desc, "--out", "ascii"});
  EXPECT_NE(ascii.out.find("NP"), std::string::npos);

  std::string term = temp_file("donkey.term",
                               "drs([],[implies(drs([x,y],[farmer(x),donkey(y),owns(x,y)]), drs([],[beats(x,y)]))])");
  std::string model = temp_file("m.model", "domain a b.\npred farmer = {a}.\npred donkey = {b}.\n"
                                           "pred owns = {(a,b)}.\npred beats = {}.\n");
  CliRun t = cli({"translate", term, "--model", model});
  EXPECT_EQ(t.status, 0);
  auto ls = lines(t.out);
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_TRUE(alpha_eq(parse_term(ls[0]), drs_to_fol(parse_term(tests::read_file(term)))));
  EXPECT_EQ(ls[1], "drs: false");
  EXPECT_EQ(ls[2], "fol: false");
  std::filesystem::remove(desc);
  std::filesystem::remove(term);
  std::filesystem::remove(model);
}

// The CLI and a client driving the HTTP API step by step reach the same
// final term for every corpus sentence.
TEST(Cli, AgreesWithApi) {
  Api api(bundled_engine());
  int compared = 0;
  for (const auto& f : {"il", "lgq", "ldrt"})
    for (const auto& sentence : tests::corpus()) {
      CliRun r = cli({"derive", sentence, "--formalism", f});
      ApiResponse created = api.handle(
          "POST", "/sessions", json{{"sentence", sentence}, {"params", {{"formalism", f}}}}.dump());
      if (r.status != 0) {
        EXPECT_NE(created.status, 201) << sentence;
        continue;
      }
      ASSERT_EQ(created.status, 201) << created.body;
      std::string id = created.as_json()["id"];
      // bottom-up: process every leaf first, then let the root finish
      json view = created.as_json();
      for (const auto& n : view["nodes"])
        if (n.contains("word"))
          api.handle("POST", "/sessions/" + id + "/nodes/" + std::to_string(n["id"].get<int>()) + "/step",
                     R"({"action":"annotate"})");
      ApiResponse done =
          api.handle("POST", "/sessions/" + id + "/nodes/0/step", R"({"action":"process-fully"})");
      ASSERT_EQ(done.status, 200) << done.body;
      std::string term = done.as_json()["report"]["after"];
      EXPECT_EQ(term, "st(" + lines(r.out).at(0) + ",[])") << sentence << " " << f;
      ++compared;
    }
  EXPECT_GE(compared, 30);
}

}  // namespace

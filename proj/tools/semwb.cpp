// semwb: batch front end and HTTP server for the workbench.
//
// Exit codes: 0 ok, 1 NoParse/UnknownWord, 2 InvalidParams or bad usage,
// 3 any other error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "semwb.hpp"
#include "semwb/api.hpp"

namespace {

using namespace semwb;

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoParse:
    case ErrorCode::UnknownWord: return 1;
    case ErrorCode::InvalidParams: return 2;
    default: return 3;
  }
}

std::string slurp(const std::string& file) {
  if (file == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct DeriveOpts {
  std::string sentence;
  std::map<std::string, std::string> dims;
  std::vector<std::string> display;
  std::string readings = "first";
  std::string out = "text";
  bool trace = false;
};

void print_trace(const DerivationSession& s, const SynTree& t, std::ostream& os) {
  for (const auto& c : t.children) print_trace(s, c, os);
  const NodeState& n = s.node(t.id);
  if (!n.current) return;
  os << "# node " << t.id << " " << t.category << ": " << to_string(n.trace.initial) << "\n";
  for (const auto& st : n.trace.steps) {
    std::string path;
    for (int i : st.path) path += (path.empty() ? "" : ".") + std::to_string(i);
    os << "#   " << to_string(st.rule) << " @" << (path.empty() ? "root" : path) << " => " << to_string(st.after)
       << "\n";
  }
}

int run_derive(const DeriveOpts& o) {
  ParamSet p;
  for (const auto& [k, v] : o.dims)
    if (!v.empty()) set_param(p, k, v);
  for (const auto& kv : o.display) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidParams, "--display expects key=value");
    p.display[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  const Engine& engine = bundled_engine();
  DerivationSession s = engine.open_session(tokenize(o.sentence), p, "cli");

  std::vector<Term> finals;
  if (o.readings == "all") {
    ReadingSet rs = engine.readings(s);
    finals = rs.readings;
    if (!rs.violations.empty())
      std::cerr << "warning: " << rs.violations.size() << " retrieval order(s) left a free store index\n";
    if (o.trace || o.out != "text") engine.derive(s);
  } else {
    finals.push_back(engine.derive(s));
  }

  if (o.trace) print_trace(s, s.tree, std::cout);
  if (o.out == "text") {
    for (const auto& t : finals) std::cout << to_string(t) << "\n";
    return 0;
  }
  DescNode d = session_to_desc(s);
  if (o.readings == "all") {
    std::vector<DescNode> rows;
    for (const auto& t : finals) rows.push_back(term_to_desc(t));
    d = DescNode::make("vbox", rows);
  }
  if (o.out == "desc") std::cout << print_desc(d, true) << "\n";
  else std::cout << render_svg(layout(d)) << "\n";
  return 0;
}

int run_render(const std::string& file, const std::string& out) {
  DescNode d = parse_desc(slurp(file));
  auto boxes = layout(d);
  std::cout << (out == "ascii" ? render_ascii(boxes) : render_svg(boxes)) << (out == "ascii" ? "" : "\n");
  return 0;
}

int run_translate(const std::string& file, const std::string& model_file) {
  Term d = parse_term(slurp(file));
  Term f = drs_to_fol(d);
  std::cout << to_string(f) << "\n";
  if (!model_file.empty()) {
    FiniteModel m = parse_model(slurp(model_file));
    std::cout << "drs: " << (eval_drs(d, m) ? "true" : "false") << "\n";
    std::cout << "fol: " << (eval_fol(f, m) ? "true" : "false") << "\n";
  }
  return 0;
}

int run_params(bool count_only) {
  auto all = bundled_engine().registry().enumerate_valid();
  if (!count_only)
    for (const auto& p : all) std::cout << to_string(p) << "\n";
  std::cout << (count_only ? "" : "# ") << all.size() << (count_only ? "\n" : " valid parameter sets\n");
  return 0;
}

int run_serve(int port, const std::string& host) {
  Api api(bundled_engine());
  httplib::Server server;
  auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
    std::string target = req.path;
    if (!req.params.empty()) {
      std::string q;
      for (const auto& [k, v] : req.params) q += (q.empty() ? "?" : "&") + k + "=" + v;
      target += q;
    }
    ApiResponse r = api.handle(req.method, target, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
    res.set_header("Access-Control-Allow-Origin", "*");
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Delete(".*", handler);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  std::cerr << "semwb listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semwb: computational semantics workbench"};
  app.require_subcommand(1);

  DeriveOpts d;
  auto* derive = app.add_subcommand("derive", "Derive the meaning of a sentence (process-fully at the root)");
  derive->add_option("sentence", d.sentence, "The sentence")->required();
  for (const auto& dim : param_dimensions()) derive->add_option("--" + dim, d.dims[dim], "Parameter " + dim);
  derive->add_option("--display", d.display, "Display option key=value (repeatable)");
  derive->add_option("--readings", d.readings, "all|first")->check(CLI::IsMember({"all", "first"}));
  derive->add_option("--out", d.out, "text|desc|svg")->check(CLI::IsMember({"text", "desc", "svg"}));
  derive->add_flag("--trace", d.trace, "Print every node's reduction steps (lines starting with #)");

  std::string render_file, render_out = "svg";
  auto* render = app.add_subcommand("render", "Lay out a description string");
  render->add_option("desc-file", render_file, "Description string file, - for stdin")->required();
  render->add_option("--out", render_out, "svg|ascii")->check(CLI::IsMember({"svg", "ascii"}));

  std::string term_file, target = "fol", model_file;
  auto* translate = app.add_subcommand("translate", "Translate a DRS to first-order logic");
  translate->add_option("term-file", term_file, "Term file, - for stdin")->required();
  translate->add_option("--to", target, "Target logic")->check(CLI::IsMember({"fol"}));
  translate->add_option("--model", model_file, "Also evaluate both forms in this model");

  bool count_only = false;
  auto* params = app.add_subcommand("params", "Parameter registry");
  auto* list = params->add_subcommand("list", "List every valid parameter set");
  list->add_flag("--count", count_only, "Print only the count");
  params->require_subcommand(1);

  int port = 8080;
  if (const char* env = std::getenv("SEMWB_PORT")) port = std::atoi(env);
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--port", port, "Port (default $SEMWB_PORT or 8080)");
  serve->add_option("--host", host, "Address to bind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*derive) return run_derive(d);
    if (*render) return run_render(render_file, render_out);
    if (*translate) return run_translate(term_file, model_file);
    if (*params) return run_params(count_only);
    if (*serve) return run_serve(port, host);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

#pragma once

// JSON request/response layer over the engine. Transport-free: a request is
// (method, target, body) and the answer is a status, content type and body,
// so the HTTP server in tools/ and the tests drive exactly the same code.
// Wire format: docs/protocol.md.

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include <json.hpp>  // nlohmann, vendored

#include "display.hpp"
#include "engine.hpp"
#include "grapher.hpp"

namespace semwb {

inline constexpr const char* kProtocolSchema = "semwb/1";

using json = nlohmann::ordered_json;

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;

  json as_json() const { return json::parse(body); }
};

inline int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownNode: return 404;
    case ErrorCode::NotApplicable: return 409;
    default: return 400;
  }
}

// JSON projections

inline json params_json(const ParamSet& p) {
  json j = json::object();
  for (const auto& [k, v] : p.core()) j[k] = v;
  if (!p.display.empty()) {
    json d = json::object();
    for (const auto& [k, v] : p.display) d[k] = v;
    j["display"] = d;
  }
  return j;
}

inline ParamSet params_from_json(const json& j) {
  ParamSet p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error(ErrorCode::InvalidParams, "params must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "display") {
      if (!v.is_object()) throw Error(ErrorCode::InvalidParams, "display must be an object");
      for (const auto& [dk, dv] : v.items()) p.display[dk] = dv.is_string() ? dv.get<std::string>() : dv.dump();
      continue;
    }
    if (!v.is_string()) throw Error(ErrorCode::InvalidParams, "value of " + k + " must be a string");
    set_param(p, k, v.get<std::string>());
  }
  return p;
}

inline json error_json(const Error& e) {
  std::string msg = e.what();
  std::string prefix = std::string(to_string(e.code())) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  return {{"error", {{"code", to_string(e.code())}, {"message", msg}}}};
}

inline json node_json(const DerivationSession& s, const SynTree& t) {
  const NodeState& n = s.node(t.id);
  json j;
  j["id"] = t.id;
  j["phase"] = to_string(n.phase);
  j["category"] = t.category;
  j["span"] = {t.start, t.end};
  if (t.is_leaf()) j["word"] = t.word;
  else j["rule"] = t.rule;
  json kids = json::array();
  for (const auto& c : t.children) kids.push_back(c.id);
  j["children"] = kids;
  j["term"] = n.current ? json(to_string(*n.current)) : json(nullptr);
  j["fol"] = n.fol ? json(to_string(*n.fol)) : json(nullptr);
  j["trace_length"] = n.trace.steps.size();
  json acts = json::array();
  for (const auto& a : n.applicable) acts.push_back(to_string(a));
  j["applicable"] = acts;
  return j;
}

inline void collect_nodes(const DerivationSession& s, const SynTree& t, json& out) {
  out.push_back(node_json(s, t));
  for (const auto& c : t.children) collect_nodes(s, c, out);
}

inline json log_json(const std::vector<Event>& log) {
  json j = json::array();
  for (const auto& e : log) j.push_back({{"node", e.node}, {"action", to_string(e.action)}});
  return j;
}

inline std::vector<Event> log_from_json(const json& j) {
  std::vector<Event> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw Error(ErrorCode::BadRequest, "log must be an array");
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("node") || !e["node"].is_number_integer() || !e.contains("action") ||
        !e["action"].is_string())
      throw Error(ErrorCode::BadRequest, "log entries need an integer node and a string action");
    out.push_back({e["node"].get<int>(), parse_action(e["action"].get<std::string>())});
  }
  return out;
}

/// The ApiSessionView: everything a client needs to draw the session and
/// offer its menus.
inline json session_view(const DerivationSession& s, bool with_desc = false) {
  json j;
  j["schema"] = kProtocolSchema;
  j["id"] = s.id;
  j["sentence"] = s.tokens;
  j["params"] = params_json(s.params);
  j["root"] = s.root();
  json nodes = json::array();
  collect_nodes(s, s.tree, nodes);
  j["nodes"] = nodes;
  j["log"] = log_json(s.log);
  if (with_desc) j["desc"] = print_desc(session_to_desc(s));
  return j;
}

inline json report_json(const StepReport& r) {
  return {{"node", r.node},
          {"action", to_string(r.action)},
          {"before", r.before ? json(to_string(*r.before)) : json(nullptr)},
          {"after", r.after ? json(to_string(*r.after)) : json(nullptr)},
          {"trace_added", r.trace_added}};
}

/// In-memory sessions. Steps on one session are serialized by its own
/// mutex; readers copy an immutable snapshot pointer and never wait for a
/// step in progress.
class SessionManager {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit SessionManager(std::chrono::seconds idle = std::chrono::hours(1),
                          Clock clock = [] { return std::chrono::steady_clock::now(); })
      : idle_(idle), clock_(std::move(clock)) {}

  /// Fresh id that no live session (imported ones included) is using.
  std::string next_id() {
    std::unique_lock lk(mu_);
    std::string id;
    do id = "s" + std::to_string(++counter_);
    while (map_.count(id));
    return id;
  }

  void put(DerivationSession s) {
    auto e = std::make_shared<Entry>();
    e->snap = std::make_shared<const DerivationSession>(std::move(s));
    e->touched = clock_();
    std::string id = e->snap->id;
    std::unique_lock lk(mu_);
    sweep_locked();
    map_[id] = std::move(e);
  }

  std::shared_ptr<const DerivationSession> get(const std::string& id) {
    auto e = entry(id);
    return e->snapshot();
  }

  /// Runs f on a private copy under the session's step lock and publishes
  /// the result only if f returns normally.
  template <class F>
  auto update(const std::string& id, F&& f) {
    auto e = entry(id);
    std::lock_guard step(e->step_mu);
    DerivationSession copy = *e->snapshot();
    auto result = f(copy);
    e->publish(std::make_shared<const DerivationSession>(std::move(copy)));
    return result;
  }

  bool erase(const std::string& id) {
    std::unique_lock lk(mu_);
    return map_.erase(id) > 0;
  }

  size_t size() {
    std::unique_lock lk(mu_);
    sweep_locked();
    return map_.size();
  }

 private:
  struct Entry {
    std::mutex step_mu;
    std::mutex snap_mu;  // guards only the pointer swap
    std::shared_ptr<const DerivationSession> snap;
    std::chrono::steady_clock::time_point touched;

    std::shared_ptr<const DerivationSession> snapshot() {
      std::lock_guard lk(snap_mu);
      return snap;
    }
    void publish(std::shared_ptr<const DerivationSession> s) {
      std::lock_guard lk(snap_mu);
      snap = std::move(s);
    }
  };

  std::shared_ptr<Entry> entry(const std::string& id) {
    std::unique_lock lk(mu_);
    sweep_locked();
    auto it = map_.find(id);
    if (it == map_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
    it->second->touched = clock_();
    return it->second;
  }

  void sweep_locked() {
    auto now = clock_();
    for (auto it = map_.begin(); it != map_.end();)
      it = now - it->second->touched > idle_ ? map_.erase(it) : std::next(it);
  }

  std::chrono::seconds idle_;
  Clock clock_;
  std::mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> map_;
  std::atomic<long> counter_{0};
};

class Api {
 public:
  explicit Api(const Engine& engine, std::chrono::seconds idle = std::chrono::hours(1),
               SessionManager::Clock clock = [] { return std::chrono::steady_clock::now(); })
      : engine_(engine), sessions_(idle, std::move(clock)) {}

  SessionManager& sessions() { return sessions_; }

  ApiResponse handle(std::string_view method, std::string_view target, std::string_view body = {}) {
    try {
      return route(std::string(method), std::string(target), body);
    } catch (const Error& e) {
      return {http_status(e.code()), "application/json", error_json(e).dump()};
    } catch (const json::exception& e) {
      return {400, "application/json", error_json(Error(ErrorCode::BadRequest, e.what())).dump()};
    }
  }

 private:
  struct Target {
    std::vector<std::string> segments;
    std::map<std::string, std::string> query;
  };

  static Target split_target(const std::string& target) {
    Target t;
    std::string path = target, q;
    auto qm = target.find('?');
    if (qm != std::string::npos) path = target.substr(0, qm), q = target.substr(qm + 1);
    std::istringstream ps(path);
    std::string seg;
    while (std::getline(ps, seg, '/'))
      if (!seg.empty()) t.segments.push_back(seg);
    std::istringstream qs(q);
    while (std::getline(qs, seg, '&')) {
      auto eq = seg.find('=');
      t.query[seg.substr(0, eq)] = eq == std::string::npos ? "" : seg.substr(eq + 1);
    }
    return t;
  }

  static json body_json(std::string_view body) {
    if (body.empty()) return json::object();
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
    return j;
  }

  static std::vector<std::string> sentence_of(const json& j) {
    if (!j.contains("sentence")) throw Error(ErrorCode::BadRequest, "missing 'sentence'");
    const json& s = j["sentence"];
    if (s.is_string()) return tokenize(s.get<std::string>());
    if (s.is_array()) {
      std::vector<std::string> out;
      for (const auto& w : s) {
        if (!w.is_string()) throw Error(ErrorCode::BadRequest, "sentence tokens must be strings");
        out.push_back(w.get<std::string>());
      }
      return out;
    }
    throw Error(ErrorCode::BadRequest, "'sentence' must be a string or a token list");
  }

  static int node_id(const std::string& seg) {
    if (seg.empty() || seg.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorCode::UnknownNode, "bad node id '" + seg + "'");
    return std::stoi(seg);
  }

  static ApiResponse ok(const json& j, int status = 200) { return {status, "application/json", j.dump()}; }

  static void not_found(const std::string& method, const std::string& target) {
    throw Error(ErrorCode::BadRequest, "no route for " + method + " " + target);
  }

  ApiResponse route(const std::string& method, const std::string& target, std::string_view body) {
    Target t = split_target(target);
    const auto& seg = t.segments;
    bool with_desc = t.query.count("desc") && t.query["desc"] != "0" && t.query["desc"] != "false";

    if (seg.size() == 1 && seg[0] == "params" && method == "GET") return ok(params_doc());
    if (seg.size() == 1 && seg[0] == "translate" && method == "POST") return ok(translate(body_json(body)));
    if (seg.size() == 1 && seg[0] == "compare" && method == "POST") return ok(compare(body_json(body), with_desc));
    if (seg.size() == 1 && seg[0] == "sessions" && method == "POST") {
      json j = body_json(body);
      ParamSet p = params_from_json(j.value("params", json()));
      DerivationSession s = engine_.open_session(sentence_of(j), p, sessions_.next_id());
      json view = session_view(s, with_desc);
      sessions_.put(std::move(s));
      return ok(view, 201);
    }
    if (seg.size() == 2 && seg[0] == "sessions" && seg[1] == "import" && method == "POST") {
      json j = body_json(body);
      ParamSet p = params_from_json(j.value("params", json()));
      std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : sessions_.next_id();
      DerivationSession s = engine_.replay(sentence_of(j), p, log_from_json(j.value("log", json())), id);
      json view = session_view(s, with_desc);
      sessions_.put(std::move(s));
      return ok(view, 201);
    }
    if (seg.size() >= 2 && seg[0] == "sessions") {
      const std::string& id = seg[1];
      if (seg.size() == 2 && method == "GET") return ok(session_view(*sessions_.get(id), with_desc));
      if (seg.size() == 2 && method == "DELETE") {
        if (!sessions_.erase(id)) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
        return ok({{"deleted", id}});
      }
      if (seg.size() == 3 && seg[2] == "export" && method == "GET") {
        auto s = sessions_.get(id);
        return ok({{"schema", kProtocolSchema},
                   {"id", s->id},
                   {"sentence", s->tokens},
                   {"params", params_json(s->params)},
                   {"log", log_json(s->log)}});
      }
      if (seg.size() == 3 && seg[2] == "undo" && method == "POST") {
        json view = sessions_.update(id, [&](DerivationSession& s) {
          engine_.undo(s);
          return session_view(s, with_desc);
        });
        return ok(view);
      }
      if (seg.size() == 3 && seg[2] == "render" && method == "GET") {
        auto s = sessions_.get(id);
        std::string format = t.query.count("format") ? t.query["format"] : "desc";
        return render(*s, format);
      }
      if (seg.size() == 5 && seg[2] == "nodes" && seg[4] == "step" && method == "POST") {
        int n = node_id(seg[3]);
        json j = body_json(body);
        if (!j.contains("action") || !j["action"].is_string()) throw Error(ErrorCode::BadRequest, "missing 'action'");
        StepAction a = parse_action(j["action"].get<std::string>());
        json out = sessions_.update(id, [&](DerivationSession& s) {
          StepReport r = engine_.apply_step(s, n, a);
          return json{{"session", session_view(s, with_desc)}, {"report", report_json(r)}};
        });
        return ok(out);
      }
    }
    not_found(method, target);
    return {};
  }

  static ApiResponse render(const DerivationSession& s, const std::string& format) {
    DescNode d = session_to_desc(s);
    if (format == "desc") return {200, "text/plain; charset=utf-8", print_desc(d)};
    if (format == "svg") return {200, "image/svg+xml", render_svg(layout(d))};
    if (format == "ascii") return {200, "text/plain; charset=utf-8", render_ascii(layout(d))};
    throw Error(ErrorCode::BadRequest, "unknown render format '" + format + "'");
  }

  json params_doc() const {
    const Registry& r = engine_.registry();
    json dims;
    auto names = [](const auto& list) {
      json a = json::array();
      for (const auto& v : list) a.push_back(to_string(v));
      return a;
    };
    dims["formalism"] = names(r.formalisms);
    dims["reducer"] = names(r.reducers);
    dims["storage"] = names(r.storages);
    json gs = json::array();
    for (const auto& g : r.grammars) gs.push_back(g.name);
    dims["grammar"] = gs;
    dims["parser"] = names(r.parsers);
    dims["mapping"] = names(r.mappings);
    json valid = json::array();
    for (const auto& p : r.enumerate_valid()) valid.push_back(params_json(p));
    return {{"schema", kProtocolSchema},
            {"dimensions", dims},
            {"display", {{"stack-reductions", "true|false"}, {"box-nodes", "comma-separated node ids"},
                         {"show-terms", "true|false"}}},
            {"compat", to_string(r.compat)},
            {"count", valid.size()},
            {"valid", valid}};
  }

  static json translate(const json& j) {
    if (!j.contains("term") || !j["term"].is_string()) throw Error(ErrorCode::BadRequest, "missing 'term'");
    std::string to = j.value("to", "fol");
    if (to != "fol") throw Error(ErrorCode::BadRequest, "can only translate to fol");
    Term d = parse_term(j["term"].get<std::string>());
    if (!d.is(TermKind::Drs)) throw Error(ErrorCode::BadRequest, "'term' must be a DRS");
    Term f = drs_to_fol(d);
    return {{"term", to_string(f)}, {"pretty", pretty(f)}};
  }

  json compare(const json& j, bool with_desc) const {
    if (!j.contains("params") || !j["params"].is_array()) throw Error(ErrorCode::BadRequest, "'params' must be a list");
    std::vector<ParamSet> ps;
    for (const auto& p : j["params"]) ps.push_back(params_from_json(p));
    json out = json::array();
    for (const auto& e : engine_.compare_sessions(sentence_of(j), ps)) {
      if (e.session) out.push_back(session_view(*e.session, with_desc));
      else out.push_back({{"params", params_json(e.params)}, {"error", error_json(*e.error)["error"]}});
    }
    return {{"sessions", out}};
  }

  const Engine& engine_;
  SessionManager sessions_;
};

}  // namespace semwb

#pragma once

// Text serialisation of terms and types.
//
//   var(x)  const(anna)  lam(x, B)  app(F, A)  up(B)  down(B)
//   forall(x, R, S)  exists(x, R, S)  forall(x, S)  exists(x, S)
//   and(A, B, ...)  or(A, B, ...)  not(A)  implies(A, B)  eq(A, B)  true
//   drs([x, y], [C1, C2])  merge(A, B)  idx(3)
//
// A bare identifier denotes the innermost binder of that name (lambda,
// quantifier or DRS referent, including referents exported through merge
// and implication) and otherwise a constant; `f(a, b)` abbreviates
// app(app(f, a), b). Any identifier may carry a type annotation `x:<e,t>`.
// Omitted types are inferred; whatever stays unconstrained defaults to e.

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "term.hpp"
#include "term_ops.hpp"

namespace semwb {

using Signature = std::map<std::string, Type>;

namespace io {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}

/// Character cursor with line/column tracking, shared by every text format
/// in the project.
class Cursor {
 public:
  explicit Cursor(std::string_view text, size_t pos = 0) : text_(text), pos_(pos) {}

  size_t pos() const { return pos_; }
  void seek(size_t p) { pos_ = p; }
  bool at_end() { skip_ws(); return pos_ >= text_.size(); }
  std::string_view text() const { return text_; }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '%' && comments_) {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  void set_comments(bool on) { comments_ = on; }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool peek_str(std::string_view s) {
    skip_ws();
    return text_.substr(pos_, s.size()) == s;
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_str(std::string_view s) {
    if (peek_str(s)) {
      pos_ += s.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }
  void expect_str(std::string_view s) {
    if (!accept_str(s)) fail("'" + std::string(s) + "'");
  }
  bool peek_ident() { return is_ident_start(peek()); }
  std::string ident() {
    if (!peek_ident()) fail("identifier");
    size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  /// Identifier that may also contain '-' (tags, parameter values).
  std::string word() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && (is_ident_char(text_[pos_]) || text_[pos_] == '-')) ++pos_;
    if (start == pos_) fail("name");
    return std::string(text_.substr(start, pos_ - start));
  }
  int number() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("number");
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
  }

  std::pair<int, int> line_col(size_t p) const {
    int line = 1, col = 1;
    for (size_t i = 0; i < p && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }
  std::string where() {
    skip_ws();
    auto [l, c] = line_col(pos_);
    return std::to_string(l) + ":" + std::to_string(c);
  }
  [[noreturn]] void fail(const std::string& expected) {
    skip_ws();
    std::string found = pos_ < text_.size() ? std::string("'") + text_[pos_] + "'" : "end of input";
    throw Error(ErrorCode::SyntaxError, "line " + where() + ": expected " + expected + ", found " + found);
  }

 private:
  std::string_view text_;
  size_t pos_;
  bool comments_ = false;
};

}  // namespace io

// ---------------------------------------------------------------------------
// Types

inline Type parse_type(io::Cursor& cur) {
  if (cur.accept('<')) {
    Type a = parse_type(cur);
    cur.expect(',');
    Type b = parse_type(cur);
    cur.expect('>');
    return Type::fn(a, b);
  }
  char c = cur.peek();
  if (c == 'e' || c == 't' || c == 's') {
    size_t save = cur.pos();
    std::string id = cur.ident();
    if (id == "e") return Type::e();
    if (id == "t") return Type::t();
    if (id == "s") return Type::s();
    cur.seek(save);
  }
  cur.fail("type");
}

inline Type parse_type(std::string_view text) {
  io::Cursor cur(text);
  Type ty = parse_type(cur);
  if (!cur.at_end()) cur.fail("end of type");
  return ty;
}

// ---------------------------------------------------------------------------
// Raw syntax

namespace io {

struct RawTerm {
  enum class Kind { Ident, Call, List, Number } kind = Kind::Ident;
  std::string name;
  std::optional<Type> annotation;
  std::vector<RawTerm> args;
  int number = 0;
  size_t pos = 0;
};

inline RawTerm parse_raw(Cursor& cur) {
  RawTerm r;
  char c = cur.peek();
  r.pos = cur.pos();
  if (c == '[') {
    cur.expect('[');
    r.kind = RawTerm::Kind::List;
    if (!cur.accept(']')) {
      do r.args.push_back(parse_raw(cur));
      while (cur.accept(','));
      cur.expect(']');
    }
    return r;
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    r.kind = RawTerm::Kind::Number;
    r.number = cur.number();
    if (cur.accept(':')) r.annotation = parse_type(cur);
    return r;
  }
  r.name = cur.ident();
  if (cur.peek() == ':') {
    // Annotation only when a type follows; otherwise leave ':' to the caller.
    size_t save = cur.pos();
    cur.expect(':');
    char n = cur.peek();
    size_t after = cur.pos();
    bool is_type = n == '<';
    if (!is_type && (n == 'e' || n == 't' || n == 's')) {
      std::string_view rest = cur.text().substr(after + 1);
      is_type = rest.empty() || !is_ident_char(rest[0]);
    }
    if (is_type) {
      r.annotation = parse_type(cur);
    } else {
      cur.seek(save);
    }
  }
  if (cur.accept('(')) {
    r.kind = RawTerm::Kind::Call;
    if (!cur.accept(')')) {
      do r.args.push_back(parse_raw(cur));
      while (cur.accept(','));
      cur.expect(')');
    }
  }
  return r;
}

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"var", "const", "lam", "app", "up", "down", "forall", "exists", "and",
                                       "or", "not", "implies", "eq", "drs", "merge", "idx", "true"};
  return k;
}

/// Type inference by first-order unification over type variables.
class TypeSolver {
 public:
  Type fresh() { return Type::var(next_++); }

  Type resolve(const Type& t) const {
    if (t.is_variable()) {
      auto it = bound_.find(t.var_id());
      return it == bound_.end() ? t : resolve(it->second);
    }
    if (t.is_function()) return Type::fn(resolve(t.domain()), resolve(t.codomain()));
    return t;
  }
  /// Resolved type with leftover variables defaulted to e.
  Type finish(const Type& t) const {
    Type r = resolve(t);
    if (r.is_variable()) return Type::e();
    if (r.is_function()) return Type::fn(finish(r.domain()), finish(r.codomain()));
    return r;
  }

  bool unify(const Type& a0, const Type& b0) {
    Type a = resolve(a0), b = resolve(b0);
    if (a.is_variable() && b.is_variable() && a.var_id() == b.var_id()) return true;
    if (a.is_variable()) return bind(a.var_id(), b);
    if (b.is_variable()) return bind(b.var_id(), a);
    if (a.kind() != b.kind()) return false;
    if (a.is_function()) return unify(a.domain(), b.domain()) && unify(a.codomain(), b.codomain());
    return true;
  }

 private:
  bool occurs(int id, const Type& t) const {
    Type r = resolve(t);
    if (r.is_variable()) return r.var_id() == id;
    if (r.is_function()) return occurs(id, r.domain()) || occurs(id, r.codomain());
    return false;
  }
  bool bind(int id, const Type& t) {
    if (occurs(id, t)) return false;
    bound_[id] = t;
    return true;
  }
  std::map<int, Type> bound_;
  int next_ = 0;
};

class Elaborator {
 public:
  Elaborator(const Cursor& cur, const Signature* sig) : cur_(cur), sig_(sig) {}

  Term elaborate(const RawTerm& r, std::optional<Type> expected) {
    Term t = go(r);
    if (expected) require(r, t, *expected, "expected type " + expected->str());
    return finalize(t);
  }

 private:
  struct Scope {
    std::vector<std::pair<std::string, Type>> frames;
    const Type* find(const std::string& n) const {
      for (auto it = frames.rbegin(); it != frames.rend(); ++it)
        if (it->first == n) return &it->second;
      return nullptr;
    }
  };

  [[noreturn]] void fail(const RawTerm& r, ErrorCode code, const std::string& msg) const {
    auto [l, c] = cur_.line_col(r.pos);
    throw Error(code, "line " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg);
  }

  void require(const RawTerm& r, const Term& t, const Type& want, const std::string& what) {
    Type have = typeof_(t);
    if (!solver_.unify(have, want))
      fail(r, ErrorCode::IllTyped,
           what + " but term has type " + solver_.resolve(have).str() + " (wanted " + solver_.resolve(want).str() + ")");
  }

  Type typeof_(const Term& t) {
    auto it = memo_.find(&t.node());
    if (it != memo_.end()) return it->second;
    return Type::t();
  }

  Term record(Term t, Type ty) {
    memo_[&t.node()] = ty;
    keep_.push_back(t);
    return t;
  }

  void arity(const RawTerm& r, size_t lo, size_t hi) const {
    if (r.args.size() < lo || r.args.size() > hi)
      fail(r, ErrorCode::SyntaxError, r.name + " takes " + std::to_string(lo) +
                                          (hi != lo ? ".." + std::to_string(hi) : "") + " arguments, got " +
                                          std::to_string(r.args.size()));
  }

  Var binder(const RawTerm& r) {
    if (r.kind != RawTerm::Kind::Ident) fail(r, ErrorCode::SyntaxError, "expected a variable name");
    Type ty = r.annotation ? *r.annotation : solver_.fresh();
    return Var{r.name, ty};
  }

  Term symbol(const RawTerm& r, bool force_var, bool force_const) {
    if (!force_const) {
      if (const Type* bound = scope_.find(r.name)) {
        if (r.annotation && !solver_.unify(*bound, *r.annotation))
          fail(r, ErrorCode::IllTyped, "annotation on " + r.name + " contradicts its binder");
        return record(Term::var(r.name, *bound), *bound);
      }
      if (force_var) {
        auto it = free_vars_.find(r.name);
        if (it == free_vars_.end()) it = free_vars_.emplace(r.name, solver_.fresh()).first;
        if (r.annotation && !solver_.unify(it->second, *r.annotation))
          fail(r, ErrorCode::IllTyped, "conflicting annotation on variable " + r.name);
        return record(Term::var(r.name, it->second), it->second);
      }
    }
    auto it = consts_.find(r.name);
    if (it == consts_.end()) {
      Type ty = solver_.fresh();
      if (sig_) {
        auto s = sig_->find(r.name);
        if (s != sig_->end()) ty = s->second;
      }
      it = consts_.emplace(r.name, ty).first;
    }
    if (r.annotation && !solver_.unify(it->second, *r.annotation))
      fail(r, ErrorCode::IllTyped, "conflicting type for constant " + r.name);
    return record(Term::constant(r.name, it->second), it->second);
  }

  Term truth(const RawTerm& r) {
    Term t = go(r);
    require(r, t, Type::t(), "formula expected");
    return t;
  }

  Term go(const RawTerm& r) {
    using K = RawTerm::Kind;
    if (r.kind == K::Number || r.kind == K::List) fail(r, ErrorCode::SyntaxError, "expected a term");
    if (r.kind == K::Ident) {
      if (r.name == "true" && !scope_.find("true")) return record(Term::verum(), Type::t());
      return symbol(r, false, false);
    }
    const std::string& f = r.name;
    if (f == "var" || f == "const") {
      arity(r, 1, 1);
      if (r.args[0].kind != K::Ident) fail(r.args[0], ErrorCode::SyntaxError, "expected a name");
      return symbol(r.args[0], f == "var", f == "const");
    }
    if (f == "lam") {
      arity(r, 2, 2);
      Var v = binder(r.args[0]);
      scope_.frames.emplace_back(v.name, v.type);
      Term body = go(r.args[1]);
      scope_.frames.pop_back();
      Type ty = Type::fn(v.type, typeof_(body));
      return record(Term::lam(v, body), ty);
    }
    if (f == "app") {
      arity(r, 2, 2);
      Term fn = go(r.args[0]);
      Term arg = go(r.args[1]);
      return apply_(r, fn, arg);
    }
    if (f == "up") {
      arity(r, 1, 1);
      Term b = go(r.args[0]);
      return record(Term::up(b), Type::fn(Type::s(), typeof_(b)));
    }
    if (f == "down") {
      arity(r, 1, 1);
      Term b = go(r.args[0]);
      Type res = solver_.fresh();
      require(r.args[0], b, Type::fn(Type::s(), res), "extension of a non-intension");
      return record(Term::down(b), res);
    }
    if (f == "forall" || f == "exists") {
      arity(r, 2, 3);
      Var v = binder(r.args[0]);
      scope_.frames.emplace_back(v.name, v.type);
      QuantKind q = f == "forall" ? QuantKind::Forall : QuantKind::Exists;
      Term out;
      if (r.args.size() == 3) {
        Term restr = truth(r.args[1]);
        Term body = truth(r.args[2]);
        out = Term::quant(q, v, restr, body);
      } else {
        out = Term::quant(q, v, truth(r.args[1]));
      }
      scope_.frames.pop_back();
      return record(out, Type::t());
    }
    if (f == "and" || f == "or") {
      if (r.args.size() < 2) fail(r, ErrorCode::SyntaxError, f + " takes at least two arguments");
      std::vector<Term> args;
      for (const auto& a : r.args) args.push_back(truth(a));
      return record(Term::conn(f == "and" ? ConnKind::And : ConnKind::Or, args), Type::t());
    }
    if (f == "not") {
      arity(r, 1, 1);
      return record(Term::conn(ConnKind::Not, {truth(r.args[0])}), Type::t());
    }
    if (f == "implies" || f == "merge") {
      arity(r, 2, 2);
      Term a = truth(r.args[0]);
      size_t depth = scope_.frames.size();
      for (const auto& d : declared_referents(a)) scope_.frames.emplace_back(d, Type::e());
      Term b = truth(r.args[1]);
      scope_.frames.resize(depth);
      Term out = f == "merge" ? Term::merge(a, b) : Term::conn(ConnKind::Implies, {a, b});
      return record(out, Type::t());
    }
    if (f == "eq") {
      arity(r, 2, 2);
      Term a = go(r.args[0]);
      Term b = go(r.args[1]);
      if (!solver_.unify(typeof_(a), typeof_(b))) fail(r, ErrorCode::IllTyped, "eq operands have different types");
      return record(Term::conn(ConnKind::Eq, {a, b}), Type::t());
    }
    if (f == "drs") {
      arity(r, 2, 2);
      if (r.args[0].kind != K::List || r.args[1].kind != K::List)
        fail(r, ErrorCode::SyntaxError, "drs expects a referent list and a condition list");
      std::vector<Var> universe;
      for (const auto& u : r.args[0].args) {
        Var v = binder(u);
        if (!solver_.unify(v.type, Type::e())) fail(u, ErrorCode::IllTyped, "referents must have type e");
        v.type = Type::e();
        for (const auto& w : universe)
          if (w.name == v.name) fail(u, ErrorCode::SyntaxError, "duplicate referent " + v.name);
        universe.push_back(v);
      }
      size_t depth = scope_.frames.size();
      for (const auto& v : universe) scope_.frames.emplace_back(v.name, v.type);
      std::vector<Term> conds;
      for (const auto& c : r.args[1].args) conds.push_back(truth(c));
      scope_.frames.resize(depth);
      return record(Term::drs(universe, conds), Type::t());
    }
    if (f == "idx") {
      arity(r, 1, 1);
      if (r.args[0].kind != K::Number || r.args[0].number <= 0)
        fail(r, ErrorCode::SyntaxError, "idx expects a positive integer");
      Type ty = r.args[0].annotation ? *r.args[0].annotation : solver_.fresh();
      return record(Term::index(r.args[0].number, ty), ty);
    }
    // f(a1, ..., an)
    RawTerm head = r;
    head.kind = K::Ident;
    head.args.clear();
    Term fn = symbol(head, false, false);
    if (r.args.empty()) fail(r, ErrorCode::SyntaxError, "application needs arguments");
    for (const auto& a : r.args) fn = apply_(a, fn, go(a));
    return fn;
  }

  Term apply_(const RawTerm& r, const Term& fn, const Term& arg) {
    Type res = solver_.fresh();
    if (!solver_.unify(typeof_(fn), Type::fn(typeof_(arg), res)))
      fail(r, ErrorCode::IllTyped,
           "cannot apply " + solver_.resolve(typeof_(fn)).str() + " to " + solver_.resolve(typeof_(arg)).str());
    return record(Term::app(fn, arg), res);
  }

  Term finalize(const Term& t) {
    switch (t.kind()) {
      case TermKind::Var:
      case TermKind::Const:
      case TermKind::Index:
        return t.with_type(solver_.finish(t.type()));
      case TermKind::Lam:
      case TermKind::Quant: {
        std::vector<Term> kids;
        for (const auto& k : t.kids()) kids.push_back(finalize(k));
        return t.with_type(solver_.finish(t.type())).with_kids(std::move(kids));
      }
      default: {
        std::vector<Term> kids;
        for (const auto& k : t.kids()) kids.push_back(finalize(k));
        return t.kids().empty() ? t : t.with_kids(std::move(kids));
      }
    }
  }

  const Cursor& cur_;
  const Signature* sig_;
  TypeSolver solver_;
  Scope scope_;
  std::map<std::string, Type> consts_;
  std::map<std::string, Type> free_vars_;
  std::map<const Term::Node*, Type> memo_;
  std::vector<Term> keep_;
};

}  // namespace io

/// Parses one term starting at the cursor (leaves trailing text alone).
inline Term parse_term(io::Cursor& cur, const Signature* sig = nullptr, std::optional<Type> expected = {}) {
  io::RawTerm raw = io::parse_raw(cur);
  io::Elaborator el(cur, sig);
  return el.elaborate(raw, expected);
}

inline Term parse_term(std::string_view text, const Signature* sig = nullptr, std::optional<Type> expected = {}) {
  io::Cursor cur(text);
  Term t = parse_term(cur, sig, expected);
  if (!cur.at_end()) cur.fail("end of term");
  return t;
}

// ---------------------------------------------------------------------------
// Printing

struct PrintOptions {
  bool types = false;  // annotate binders, constants, free variables
};

namespace io {

class Printer {
 public:
  explicit Printer(PrintOptions opt) : opt_(opt) {}

  void print(const Term& t, std::ostream& os) {
    switch (t.kind()) {
      case TermKind::Var:
        if (bound(t.name())) {
          os << t.name();
        } else {
          os << "var(" << t.name() << annot(t.type()) << ")";
        }
        return;
      case TermKind::Const:
        if (bound(t.name()) || t.name() == "true") {
          os << "const(" << t.name() << annot(t.type()) << ")";
        } else {
          os << t.name() << annot(t.type());
        }
        return;
      case TermKind::Index:
        os << "idx(" << t.index() << annot(t.type()) << ")";
        return;
      case TermKind::Lam:
        os << "lam(" << t.name() << annot(t.type()) << ",";
        push(t.name());
        print(t.kid(0), os);
        pop(1);
        os << ")";
        return;
      case TermKind::App: {
        std::vector<const Term*> args;
        const Term* head = &t;
        while (head->is(TermKind::App)) {
          args.push_back(&head->kid(1));
          head = &head->kid(0);
        }
        bool named_head = (head->is(TermKind::Const) && !bound(head->name()) && head->name() != "true") ||
                          (head->is(TermKind::Var) && bound(head->name()));
        if (named_head && !keywords().count(head->name())) {
          os << head->name();
          if (head->is(TermKind::Const)) os << annot(head->type());
          os << "(";
          for (size_t i = args.size(); i-- > 0;) {
            print(*args[i], os);
            if (i) os << ",";
          }
          os << ")";
          return;
        }
        os << "app(";
        print(t.kid(0), os);
        os << ",";
        print(t.kid(1), os);
        os << ")";
        return;
      }
      case TermKind::Up:
      case TermKind::Down:
        os << (t.is(TermKind::Up) ? "up(" : "down(");
        print(t.kid(0), os);
        os << ")";
        return;
      case TermKind::Quant:
        os << to_string(t.quant_kind()) << "(" << t.name() << annot(t.type());
        push(t.name());
        for (const auto& k : t.kids()) {
          os << ",";
          print(k, os);
        }
        pop(1);
        os << ")";
        return;
      case TermKind::Conn: {
        if (t.conn_kind() == ConnKind::Verum) {
          os << "true";
          return;
        }
        os << to_string(t.conn_kind()) << "(";
        if (t.conn_kind() == ConnKind::Implies) {
          dynamic(t, os);
        } else {
          for (size_t i = 0; i < t.kids().size(); ++i) {
            if (i) os << ",";
            print(t.kid(i), os);
          }
        }
        os << ")";
        return;
      }
      case TermKind::Drs: {
        os << "drs([";
        for (size_t i = 0; i < t.universe().size(); ++i) {
          if (i) os << ",";
          os << t.universe()[i].name;
        }
        os << "],[";
        for (const auto& v : t.universe()) push(v.name);
        for (size_t i = 0; i < t.kids().size(); ++i) {
          if (i) os << ",";
          print(t.kid(i), os);
        }
        pop(t.universe().size());
        os << "])";
        return;
      }
      case TermKind::Merge:
        os << "merge(";
        dynamic(t, os);
        os << ")";
        return;
    }
  }

 private:
  void dynamic(const Term& t, std::ostream& os) {
    print(t.kid(0), os);
    os << ",";
    auto d = declared_referents(t.kid(0));
    for (const auto& n : d) push(n);
    print(t.kid(1), os);
    pop(d.size());
  }
  std::string annot(const Type& ty) const { return opt_.types ? ":" + ty.str() : ""; }
  bool bound(const std::string& n) const {
    for (const auto& s : scope_)
      if (s == n) return true;
    return false;
  }
  void push(const std::string& n) { scope_.push_back(n); }
  void pop(size_t k) { scope_.resize(scope_.size() - k); }

  PrintOptions opt_;
  std::vector<std::string> scope_;
};

}  // namespace io

/// Canonical, re-parseable text form.
inline std::string to_string(const Term& t, PrintOptions opt = {}) {
  std::ostringstream os;
  io::Printer(opt).print(t, os);
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

// ---------------------------------------------------------------------------
// Display form (not re-parseable)

namespace io {

inline void pretty(const Term& t, std::ostream& os, bool top = true) {
  auto wrap = [&](const Term& k) {
    bool simple = k.is(TermKind::Var) || k.is(TermKind::Const) || k.is(TermKind::Index) || k.is(TermKind::App) ||
                  k.is(TermKind::Drs) || k.is_conn(ConnKind::Verum) ||
                  ((k.is(TermKind::Up) || k.is(TermKind::Down)) &&
                   (k.kid(0).is(TermKind::Var) || k.kid(0).is(TermKind::Const)));
    if (!simple) os << "(";
    pretty(k, os, !simple);
    if (!simple) os << ")";
  };
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Const:
      os << t.name();
      return;
    case TermKind::Index:
      os << "idx" << t.index();
      return;
    case TermKind::Lam:
      os << "λ" << t.name() << ".";
      pretty(t.kid(0), os, false);
      return;
    case TermKind::App: {
      std::vector<const Term*> args;
      const Term* head = &t;
      while (head->is(TermKind::App)) {
        args.push_back(&head->kid(1));
        head = &head->kid(0);
      }
      if (head->is(TermKind::Const) || head->is(TermKind::Var)) {
        os << head->name();
      } else {
        wrap(*head);
      }
      os << "(";
      for (size_t i = args.size(); i-- > 0;) {
        pretty(*args[i], os, true);
        if (i) os << ",";
      }
      os << ")";
      return;
    }
    case TermKind::Up:
      os << "^";
      wrap(t.kid(0));
      return;
    case TermKind::Down:
      os << "v";
      wrap(t.kid(0));
      return;
    case TermKind::Quant:
      os << (t.quant_kind() == QuantKind::Forall ? "∀" : "∃") << t.name();
      if (t.has_restrictor()) {
        os << "(";
        pretty(t.kid(0), os, false);
        os << (t.quant_kind() == QuantKind::Forall ? " → " : " ∧ ");
        pretty(t.kid(1), os, false);
        os << ")";
      } else {
        wrap(t.kid(0));
      }
      return;
    case TermKind::Conn: {
      switch (t.conn_kind()) {
        case ConnKind::Verum: os << "⊤"; return;
        case ConnKind::Not: os << "¬"; wrap(t.kid(0)); return;
        case ConnKind::Eq:
          pretty(t.kid(0), os, false);
          os << "=";
          pretty(t.kid(1), os, false);
          return;
        default: break;
      }
      const char* op = t.conn_kind() == ConnKind::And ? " ∧ " : t.conn_kind() == ConnKind::Or ? " ∨ " : " → ";
      if (!top) os << "(";
      for (size_t i = 0; i < t.kids().size(); ++i) {
        if (i) os << op;
        wrap(t.kid(i));
      }
      if (!top) os << ")";
      return;
    }
    case TermKind::Drs: {
      os << "[";
      for (size_t i = 0; i < t.universe().size(); ++i) os << (i ? "," : "") << t.universe()[i].name;
      os << " | ";
      for (size_t i = 0; i < t.kids().size(); ++i) {
        if (i) os << ", ";
        pretty(t.kid(i), os, true);
      }
      os << "]";
      return;
    }
    case TermKind::Merge:
      wrap(t.kid(0));
      os << "⊗";
      wrap(t.kid(1));
      return;
  }
}

}  // namespace io

/// Display form: λx.laugh(x), A⊗B, ^E, vE.
inline std::string pretty(const Term& t) {
  std::ostringstream os;
  io::pretty(t, os);
  return os.str();
}

}  // namespace semwb

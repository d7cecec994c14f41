#pragma once

// Cooper storage and nested (Keller) storage.
//
// A StoredTerm is a body plus a store of indexed quantifier meanings. Each
// entry holds a StoredTerm of its own, so nested storage needs no separate
// structure: plain Cooper storage is the case where entries always have
// empty stores.

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "formalism.hpp"
#include "reducer.hpp"
#include "term.hpp"
#include "term_io.hpp"
#include "term_ops.hpp"

namespace semwb {

struct StoreEntry;

struct StoredTerm {
  Term body;
  std::vector<StoreEntry> store;

  StoredTerm() = default;
  StoredTerm(Term b) : body(std::move(b)) {}  // NOLINT: a bare term has an empty store
  StoredTerm(Term b, std::vector<StoreEntry> s);
};

struct StoreEntry {
  int index = 0;
  StoredTerm quantifier;
};

inline StoredTerm::StoredTerm(Term b, std::vector<StoreEntry> s) : body(std::move(b)), store(std::move(s)) {}

inline bool operator==(const StoredTerm& a, const StoredTerm& b);
inline bool operator==(const StoreEntry& a, const StoreEntry& b) {
  return a.index == b.index && a.quantifier == b.quantifier;
}
inline bool operator==(const StoredTerm& a, const StoredTerm& b) { return a.body == b.body && a.store == b.store; }

enum class StorageMode { None, Cooper, Nested };

inline const char* to_string(StorageMode m) {
  switch (m) {
    case StorageMode::None: return "none";
    case StorageMode::Cooper: return "cooper";
    case StorageMode::Nested: return "nested-cooper";
  }
  return "?";
}

/// Every index mentioned by an entry of the store, at any depth.
inline void store_indices(const StoredTerm& st, std::set<int>& out) {
  for (const auto& e : st.store) {
    out.insert(e.index);
    store_indices(e.quantifier, out);
  }
}

inline std::set<int> top_level_indices(const StoredTerm& st) {
  std::set<int> out;
  for (const auto& e : st.store) out.insert(e.index);
  return out;
}

/// Smallest index not used anywhere in the given stored terms.
inline int next_store_index(const std::vector<const StoredTerm*>& sts) {
  std::set<int> used;
  for (const auto* st : sts) {
    store_indices(*st, used);
    collect_indices(st->body, used);
  }
  int i = 1;
  while (used.count(i)) ++i;
  return i;
}

inline std::vector<StoreEntry> concat_stores(const std::vector<const StoredTerm*>& parts) {
  std::vector<StoreEntry> out;
  for (const auto* p : parts) out.insert(out.end(), p->store.begin(), p->store.end());
  return out;
}

/// Replaces the NP meaning by the placeholder λP.P(idx_i) (λP.vP(idx_i) for
/// intensional NP types) and parks it in the store under index i. In nested
/// mode the NP keeps its own store inside the new entry; in Cooper mode its
/// entries are moved up beside the new one.
inline StoredTerm store(const StoredTerm& np, int index, StorageMode mode = StorageMode::Nested) {
  Type ty = type_of(np.body);
  if (!is_quantifier_type(ty))
    throw Error(ErrorCode::TypeMismatch, "cannot store a term of type " + ty.str() + ": " + to_string(np.body));
  if (index <= 0) throw Error(ErrorCode::UnknownIndex, "store index must be positive");
  std::set<int> used;
  store_indices(np, used);
  if (used.count(index)) throw Error(ErrorCode::UnknownIndex, "index " + std::to_string(index) + " already in use");

  const Type& dom = ty.domain();
  Var p{"P", dom};
  Term idx = Term::index(index, Type::e());
  Term fun = dom.domain() == Type::s() ? Term::down(Term::var(p)) : Term::var(p);
  Term placeholder = Term::lam(p, Term::app(fun, idx));

  StoredTerm out{placeholder, {}};
  if (mode == StorageMode::Cooper) {
    out.store = np.store;
    out.store.push_back(StoreEntry{index, StoredTerm{np.body, {}}});
  } else {
    out.store.push_back(StoreEntry{index, np});
  }
  return out;
}

/// Discharges the top-level entry i: body becomes Q(λx.body[idx_i:=x]),
/// with ^ around the abstraction for IL. Q's own entries move to the top.
inline StoredTerm retrieve(const StoredTerm& st, int index, Formalism formalism) {
  auto it = std::find_if(st.store.begin(), st.store.end(), [&](const StoreEntry& e) { return e.index == index; });
  if (it == st.store.end()) {
    std::set<int> all;
    store_indices(st, all);
    if (all.count(index))
      throw Error(ErrorCode::NotRetrievable, "index " + std::to_string(index) + " is nested inside another entry");
    throw Error(ErrorCode::UnknownIndex, "no store entry with index " + std::to_string(index));
  }
  const StoredTerm& q = it->quantifier;
  NameSet avoid = var_names(st.body);
  for (const auto& n : var_names(q.body)) avoid.insert(n);
  Var x{fresh_name("x", avoid), Type::e()};
  Term abstraction = Term::lam(x, replace_index(st.body, index, Term::var(x)));
  if (is_intensional(formalism)) abstraction = Term::up(abstraction);

  StoredTerm out{Term::app(q.body, abstraction), {}};
  for (const auto& e : st.store)
    if (e.index != index) out.store.push_back(e);
  out.store.insert(out.store.end(), q.store.begin(), q.store.end());
  return out;
}

struct ReadingSet {
  std::vector<Term> readings;
  /// Readings that still contain a store index (over-generation).
  std::vector<Term> violations;
  /// Retrieval order that produced each reading, parallel to `readings`.
  std::vector<std::vector<int>> orders;
};

namespace storage_detail {

inline void enumerate(const StoredTerm& st, Formalism f, ReducerKind kind, std::vector<int>& order, ReadingSet& out) {
  if (st.store.empty()) {
    Term nf = normalize(st.body, kind).term;
    bool bad = contains_kind(nf, TermKind::Index);
    auto& bucket = bad ? out.violations : out.readings;
    for (const auto& r : bucket)
      if (alpha_eq(r, nf)) return;
    bucket.push_back(nf);
    if (!bad) out.orders.push_back(order);
    return;
  }
  std::vector<int> idx;
  for (const auto& e : st.store) idx.push_back(e.index);
  std::sort(idx.begin(), idx.end());
  for (int i : idx) {
    order.push_back(i);
    enumerate(retrieve(st, i, f), f, kind, order, out);
    order.pop_back();
  }
}

}  // namespace storage_detail

/// Every retrieval order over the top-level store (hosts before their nested
/// entries), normalised and deduplicated up to alpha-equivalence. Readings
/// with a leftover store index are reported separately.
inline ReadingSet enumerate_readings(const StoredTerm& st, Formalism f, ReducerKind kind = ReducerKind::Substitution) {
  ReadingSet out;
  std::vector<int> order;
  storage_detail::enumerate(st, f, kind, order, out);
  return out;
}

/// As enumerate_readings, but an over-generating configuration is an error.
inline std::vector<Term> all_readings(const StoredTerm& st, Formalism f, ReducerKind kind = ReducerKind::Substitution) {
  ReadingSet rs = enumerate_readings(st, f, kind);
  if (!rs.violations.empty())
    throw Error(ErrorCode::FreeIndexRemaining, "reading with a free store index: " + to_string(rs.violations.front()));
  return rs.readings;
}

// Serialization: st(Body, [entry(I, ST), ...])

inline void print_stored(const StoredTerm& st, std::ostream& os, PrintOptions opt = {}) {
  os << "st(" << to_string(st.body, opt) << ",[";
  for (size_t i = 0; i < st.store.size(); ++i) {
    if (i) os << ",";
    os << "entry(" << st.store[i].index << ",";
    print_stored(st.store[i].quantifier, os, opt);
    os << ")";
  }
  os << "])";
}

inline std::string to_string(const StoredTerm& st, PrintOptions opt = {}) {
  std::ostringstream os;
  print_stored(st, os, opt);
  return os.str();
}

inline StoredTerm parse_stored(io::Cursor& cur, const Signature* sig = nullptr) {
  cur.expect_str("st");
  cur.expect('(');
  StoredTerm out{parse_term(cur, sig)};
  cur.expect(',');
  cur.expect('[');
  if (!cur.accept(']')) {
    do {
      cur.expect_str("entry");
      cur.expect('(');
      int i = cur.number();
      cur.expect(',');
      StoredTerm q = parse_stored(cur, sig);
      cur.expect(')');
      out.store.push_back(StoreEntry{i, std::move(q)});
    } while (cur.accept(','));
    cur.expect(']');
  }
  cur.expect(')');
  return out;
}

inline StoredTerm parse_stored(std::string_view text, const Signature* sig = nullptr) {
  io::Cursor cur(text);
  StoredTerm st = parse_stored(cur, sig);
  if (!cur.at_end()) cur.fail("end of input");
  return st;
}

}  // namespace semwb

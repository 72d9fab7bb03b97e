#include "finimod/kernel.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace finimod {

TermManager::TermManager() {
  d_boolSort = static_cast<SortId>(d_sorts.size());
  d_sorts.push_back({d_boolSort, "Bool", SortKind::Boolean});

  FuncId ft = static_cast<FuncId>(d_funcs.size());
  d_funcs.push_back({ft, "true", FuncKind::True, {}, d_boolSort});
  FuncId ff = static_cast<FuncId>(d_funcs.size());
  d_funcs.push_back({ff, "false", FuncKind::False, {}, d_boolSort});
  d_true = mkApp(ft, {});
  d_false = mkApp(ff, {});
}

SortId TermManager::mkSort(const std::string& name) {
  SortId id = static_cast<SortId>(d_sorts.size());
  d_sorts.push_back({id, name, SortKind::Uninterpreted});
  return id;
}

std::vector<SortId> TermManager::uninterpretedSorts() const {
  std::vector<SortId> out;
  for (const Sort& s : d_sorts) {
    if (s.kind == SortKind::Uninterpreted) out.push_back(s.id);
  }
  return out;
}

FuncId TermManager::mkFunc(const std::string& name,
                           std::vector<SortId> argSorts, SortId retSort) {
  FuncId id = static_cast<FuncId>(d_funcs.size());
  d_funcs.push_back(
      {id, name, FuncKind::Uninterpreted, std::move(argSorts), retSort});
  return id;
}

FuncId TermManager::eqDecl(SortId argSort) {
  auto it = d_eqDecls.find(argSort);
  if (it != d_eqDecls.end()) return it->second;
  FuncId id = static_cast<FuncId>(d_funcs.size());
  d_funcs.push_back({id, "=", FuncKind::Eq, {argSort, argSort}, d_boolSort});
  d_eqDecls.emplace(argSort, id);
  return id;
}

FuncId TermManager::notDecl() {
  if (d_notDecl == kNone) {
    d_notDecl = static_cast<FuncId>(d_funcs.size());
    d_funcs.push_back(
        {d_notDecl, "not", FuncKind::Not, {d_boolSort}, d_boolSort});
  }
  return d_notDecl;
}

FuncId TermManager::andDecl(size_t arity) {
  auto it = d_andDecls.find(arity);
  if (it != d_andDecls.end()) return it->second;
  FuncId id = static_cast<FuncId>(d_funcs.size());
  d_funcs.push_back({id, "and", FuncKind::And,
                     std::vector<SortId>(arity, d_boolSort), d_boolSort});
  d_andDecls.emplace(arity, id);
  return id;
}

FuncId TermManager::orDecl(size_t arity) {
  auto it = d_orDecls.find(arity);
  if (it != d_orDecls.end()) return it->second;
  FuncId id = static_cast<FuncId>(d_funcs.size());
  d_funcs.push_back({id, "or", FuncKind::Or,
                     std::vector<SortId>(arity, d_boolSort), d_boolSort});
  d_orDecls.emplace(arity, id);
  return id;
}

FuncId TermManager::impliesDecl() {
  if (d_impliesDecl == kNone) {
    d_impliesDecl = static_cast<FuncId>(d_funcs.size());
    d_funcs.push_back({d_impliesDecl, "=>", FuncKind::Implies,
                       {d_boolSort, d_boolSort}, d_boolSort});
  }
  return d_impliesDecl;
}

FuncId TermManager::iffDecl() {
  if (d_iffDecl == kNone) {
    d_iffDecl = static_cast<FuncId>(d_funcs.size());
    d_funcs.push_back({d_iffDecl, "iff", FuncKind::Iff,
                       {d_boolSort, d_boolSort}, d_boolSort});
  }
  return d_iffDecl;
}

FuncId TermManager::cardSortDecl(SortId s, uint32_t bound) {
  assert(bound >= 1);
  auto key = std::make_pair(s, bound);
  auto it = d_cardSortDecls.find(key);
  if (it != d_cardSortDecls.end()) return it->second;
  FuncId id = static_cast<FuncId>(d_funcs.size());
  FuncDecl d{id,
             "card[" + sort(s).name + "," + std::to_string(bound) + "]",
             FuncKind::CardSort,
             {},
             d_boolSort};
  d.cardSort = s;
  d.cardBound = bound;
  d_funcs.push_back(std::move(d));
  d_cardSortDecls.emplace(key, id);
  return id;
}

FuncId TermManager::cardSigDecl(uint32_t bound) {
  assert(bound >= 1);
  auto it = d_cardSigDecls.find(bound);
  if (it != d_cardSigDecls.end()) return it->second;
  FuncId id = static_cast<FuncId>(d_funcs.size());
  FuncDecl d{id,
             "card[Sigma," + std::to_string(bound) + "]",
             FuncKind::CardSig,
             {},
             d_boolSort};
  d.cardBound = bound;
  d_funcs.push_back(std::move(d));
  d_cardSigDecls.emplace(bound, id);
  return id;
}

TermId TermManager::intern(TermData&& data) {
  // Structural key; children are already interned ids.
  std::string key;
  key.reserve(16 + data.children.size() * 8);
  switch (data.kind) {
    case TermKind::Var:
      key = "v" + std::to_string(data.sort) + ":" + data.varName;
      break;
    case TermKind::App:
      key = "a" + std::to_string(data.func);
      break;
    case TermKind::Forall:
      key = "q";
      break;
  }
  for (TermId c : data.children) {
    key += ",";
    key += std::to_string(c);
  }
  auto it = d_termTable.find(key);
  if (it != d_termTable.end()) return it->second;
  TermId id = static_cast<TermId>(d_terms.size());
  d_terms.push_back(std::move(data));
  d_termTable.emplace(std::move(key), id);
  return id;
}

TermId TermManager::mkVar(const std::string& name, SortId sort) {
  TermData d;
  d.kind = TermKind::Var;
  d.sort = sort;
  d.varName = name;
  return intern(std::move(d));
}

TermId TermManager::mkApp(FuncId f, const std::vector<TermId>& args) {
  const FuncDecl& decl = d_funcs.at(f);
  if (args.size() != decl.arity()) {
    throw KernelError("arity mismatch applying " + decl.name + ": expected " +
                      std::to_string(decl.arity()) + " arguments, got " +
                      std::to_string(args.size()));
  }
  for (size_t i = 0; i < args.size(); ++i) {
    if (sortOf(args[i]) != decl.argSorts[i]) {
      throw KernelError("sort mismatch applying " + decl.name +
                        " at argument " + std::to_string(i + 1) + ": expected " +
                        sort(decl.argSorts[i]).name + ", got " +
                        sort(sortOf(args[i])).name);
    }
  }
  TermData d;
  d.kind = TermKind::App;
  d.sort = decl.retSort;
  d.func = f;
  d.children = args;
  return intern(std::move(d));
}

TermId TermManager::mkForall(const std::vector<TermId>& vars, TermId body) {
  if (vars.empty()) throw KernelError("forall with no bound variables");
  for (TermId v : vars) {
    if (!isVar(v)) throw KernelError("forall binder is not a variable");
    if (sortOf(v) == d_boolSort) {
      throw KernelError("quantified variable " + varName(v) +
                        " has Boolean sort");
    }
  }
  if (sortOf(body) != d_boolSort) {
    throw KernelError("forall body is not a formula");
  }
  TermData d;
  d.kind = TermKind::Forall;
  d.sort = d_boolSort;
  d.children = vars;
  d.children.push_back(body);
  return intern(std::move(d));
}

TermId TermManager::mkEq(TermId a, TermId b) {
  if (sortOf(a) != sortOf(b)) {
    throw KernelError("equality between different sorts: " +
                      sort(sortOf(a)).name + " vs " + sort(sortOf(b)).name);
  }
  return mkApp(eqDecl(sortOf(a)), {a, b});
}

TermId TermManager::mkNot(TermId f) { return mkApp(notDecl(), {f}); }

TermId TermManager::mkAnd(const std::vector<TermId>& fs) {
  if (fs.empty()) return d_true;
  if (fs.size() == 1) return fs[0];
  return mkApp(andDecl(fs.size()), fs);
}

TermId TermManager::mkOr(const std::vector<TermId>& fs) {
  if (fs.empty()) return d_false;
  if (fs.size() == 1) return fs[0];
  return mkApp(orDecl(fs.size()), fs);
}

FuncKind TermManager::funcKindOf(TermId t) const {
  if (!isApp(t)) return FuncKind::Uninterpreted;
  return d_funcs[d_terms[t].func].kind;
}

std::span<const TermId> TermManager::children(TermId t) const {
  const TermData& d = d_terms[t];
  if (d.kind == TermKind::App) return {d.children.data(), d.children.size()};
  return {};
}

std::span<const TermId> TermManager::boundVars(TermId t) const {
  const TermData& d = d_terms[t];
  assert(d.kind == TermKind::Forall);
  return {d.children.data(), d.children.size() - 1};
}

TermId TermManager::forallBody(TermId t) const {
  const TermData& d = d_terms[t];
  assert(d.kind == TermKind::Forall);
  return d.children.back();
}

bool TermManager::isGround(TermId t) const {
  switch (kind(t)) {
    case TermKind::Var:
      return false;
    case TermKind::Forall:
      return false;  // quantified, not ground in the clause sense
    case TermKind::App:
      for (TermId c : children(t)) {
        if (!isGround(c)) return false;
      }
      return true;
  }
  return false;
}

bool TermManager::containsQuantifier(TermId t) const {
  if (isForall(t)) return true;
  for (TermId c : children(t)) {
    if (containsQuantifier(c)) return true;
  }
  return false;
}

namespace {
void collectFreeVars(const TermManager& tm, TermId t,
                     std::vector<TermId>& bound, std::vector<TermId>& out) {
  switch (tm.kind(t)) {
    case TermKind::Var:
      if (std::find(bound.begin(), bound.end(), t) == bound.end() &&
          std::find(out.begin(), out.end(), t) == out.end()) {
        out.push_back(t);
      }
      break;
    case TermKind::App:
      for (TermId c : tm.children(t)) collectFreeVars(tm, c, bound, out);
      break;
    case TermKind::Forall: {
      size_t n = bound.size();
      for (TermId v : tm.boundVars(t)) bound.push_back(v);
      collectFreeVars(tm, tm.forallBody(t), bound, out);
      bound.resize(n);
      break;
    }
  }
}
}  // namespace

std::vector<TermId> TermManager::freeVars(TermId t) const {
  std::vector<TermId> bound, out;
  collectFreeVars(*this, t, bound, out);
  return out;
}

size_t TermManager::termSize(TermId t) const {
  std::set<TermId> seen;
  std::vector<TermId> stack{t};
  while (!stack.empty()) {
    TermId u = stack.back();
    stack.pop_back();
    if (!seen.insert(u).second) continue;
    if (isApp(u)) {
      for (TermId c : children(u)) stack.push_back(c);
    } else if (isForall(u)) {
      stack.push_back(forallBody(u));
    }
  }
  return seen.size();
}

void Substitution::bind(TermId var, TermId to) { d_map[var] = to; }

TermId Substitution::lookup(TermId var) const {
  auto it = d_map.find(var);
  return it == d_map.end() ? var : it->second;
}

TermId TermManager::applySubst(TermId t, const Substitution& sigma) {
  switch (kind(t)) {
    case TermKind::Var:
      return sigma.lookup(t);
    case TermKind::App: {
      const TermData& d = d_terms[t];
      bool changed = false;
      std::vector<TermId> args;
      args.reserve(d.children.size());
      for (TermId c : d.children) {
        TermId c2 = applySubst(c, sigma);
        changed |= (c2 != c);
        args.push_back(c2);
      }
      if (!changed) return t;
      return mkApp(d.func, args);
    }
    case TermKind::Forall: {
      // Bound variables shadow outer bindings.
      Substitution inner;
      bool any = false;
      auto bvs = boundVars(t);
      for (auto& [v, to] : sigma.map()) {
        if (std::find(bvs.begin(), bvs.end(), v) == bvs.end()) {
          inner.bind(v, to);
          any = true;
        }
      }
      if (!any) return t;
      TermId body2 = applySubst(forallBody(t), inner);
      if (body2 == forallBody(t)) return t;
      return mkForall(std::vector<TermId>(bvs.begin(), bvs.end()), body2);
    }
  }
  return t;
}

namespace {
// Resolves a term under the current bindings until it is a non-bound
// variable or an application.
TermId walk(const TermManager& tm, TermId t, const Substitution& s) {
  while (tm.isVar(t) && s.binds(t)) t = s.lookup(t);
  return t;
}

bool occurs(const TermManager& tm, TermId var, TermId t,
            const Substitution& s) {
  t = walk(tm, t, s);
  if (t == var) return true;
  for (TermId c : tm.children(t)) {
    if (occurs(tm, var, c, s)) return true;
  }
  return false;
}

bool unify(TermManager& tm, TermId a, TermId b, Substitution& s) {
  a = walk(tm, a, s);
  b = walk(tm, b, s);
  if (a == b) return true;
  if (tm.isVar(a)) {
    if (occurs(tm, a, b, s)) return false;
    s.bind(a, b);
    return true;
  }
  if (tm.isVar(b)) {
    if (occurs(tm, b, a, s)) return false;
    s.bind(b, a);
    return true;
  }
  if (!tm.isApp(a) || !tm.isApp(b)) return false;
  if (tm.funcOf(a) != tm.funcOf(b)) return false;
  auto ca = tm.children(a);
  auto cb = tm.children(b);
  for (size_t i = 0; i < ca.size(); ++i) {
    if (!unify(tm, ca[i], cb[i], s)) return false;
  }
  return true;
}
}  // namespace

std::optional<Substitution> mgu(TermManager& tm, TermId t1, TermId t2) {
  if (tm.sortOf(t1) != tm.sortOf(t2)) return std::nullopt;
  Substitution bindings;
  if (!unify(tm, t1, t2, bindings)) return std::nullopt;
  // Flatten chains so every binding maps directly to its final term.
  Substitution out;
  for (auto& [v, _] : bindings.map()) {
    TermId resolved = tm.applySubst(walk(tm, v, bindings), bindings);
    // One more pass handles bindings discovered out of order.
    TermId prev = kNone;
    while (resolved != prev) {
      prev = resolved;
      resolved = tm.applySubst(resolved, bindings);
    }
    if (resolved != v) out.bind(v, resolved);
  }
  return out;
}

Literal mkLiteral(const TermManager& tm, TermId a, TermId b, bool positive) {
  if (tm.sortOf(a) != tm.sortOf(b)) {
    throw KernelError("literal between different sorts");
  }
  if (a > b) std::swap(a, b);
  return {a, b, positive};
}

Literal mkBoolLiteral(const TermManager& tm, TermId t, bool positive) {
  return mkLiteral(tm, t, tm.trueTerm(), positive);
}

std::string TermManager::toString(TermId t) const {
  switch (kind(t)) {
    case TermKind::Var:
      return varName(t);
    case TermKind::App: {
      const FuncDecl& f = func(funcOf(t));
      if (f.arity() == 0) return f.name;
      std::string s = "(" + f.name;
      for (TermId c : children(t)) s += " " + toString(c);
      return s + ")";
    }
    case TermKind::Forall: {
      std::string s = "(forall (";
      bool first = true;
      for (TermId v : boundVars(t)) {
        if (!first) s += " ";
        first = false;
        s += "(" + varName(v) + " " + sort(sortOf(v)).name + ")";
      }
      return s + ") " + toString(forallBody(t)) + ")";
    }
  }
  return "?";
}

std::string toString(const TermManager& tm, const Literal& l) {
  std::string core;
  if (l.rhs == tm.trueTerm() || l.lhs == tm.trueTerm()) {
    TermId t = l.lhs == tm.trueTerm() ? l.rhs : l.lhs;
    if (t != tm.trueTerm() && t != tm.falseTerm()) {
      core = tm.toString(t);
      return l.positive ? core : "(not " + core + ")";
    }
  }
  core = "(= " + tm.toString(l.lhs) + " " + tm.toString(l.rhs) + ")";
  return l.positive ? core : "(not " + core + ")";
}

Clause mkClause(std::vector<Literal> lits) {
  Clause c;
  for (const Literal& l : lits) {
    if (std::find(c.lits.begin(), c.lits.end(), l) == c.lits.end()) {
      c.lits.push_back(l);
    }
  }
  return c;
}

std::string toString(const TermManager& tm, const Clause& c) {
  if (c.lits.empty()) return "false";
  std::string s = "(or";
  for (const Literal& l : c.lits) s += " " + toString(tm, l);
  return s + ")";
}

}  // namespace finimod

#include "finimod/purifier.hpp"

#include <algorithm>
#include <cassert>

namespace finimod {

Purifier::Purifier(TermManager& tm) : d_tm(tm) {}

TermId Purifier::freshSkolem(SortId sort) {
  FuncId f = d_tm.mkFunc("sk!" + std::to_string(d_nextSkolem++), {}, sort);
  d_problem.skolems.push_back(f);
  return d_tm.mkConst(f);
}

// Negation normal form. Negations end up only on atoms and on quantified
// subformulas (kept as not(forall ...) and skolemized by the clausifier).
// Consecutive universal binders are merged into one maximal prefix.
TermId Purifier::nnf(TermId f, bool positive) {
  TermManager& tm = d_tm;
  switch (tm.kind(f)) {
    case TermKind::Var:
      throw KernelError("free variable " + tm.varName(f) + " in assertion");
    case TermKind::Forall: {
      std::vector<TermId> vars(tm.boundVars(f).begin(),
                               tm.boundVars(f).end());
      TermId body = nnf(tm.forallBody(f), true);
      while (tm.isForall(body)) {
        for (TermId v : tm.boundVars(body)) {
          if (std::find(vars.begin(), vars.end(), v) != vars.end()) {
            throw KernelError("variable " + tm.varName(v) +
                              " bound twice in nested quantifiers");
          }
          vars.push_back(v);
        }
        body = tm.forallBody(body);
      }
      TermId q = tm.mkForall(vars, body);
      return positive ? q : tm.mkNot(q);
    }
    case TermKind::App:
      break;
  }
  auto cs = tm.children(f);
  switch (tm.funcKindOf(f)) {
    case FuncKind::True:
      return positive ? tm.trueTerm() : tm.falseTerm();
    case FuncKind::False:
      return positive ? tm.falseTerm() : tm.trueTerm();
    case FuncKind::Not:
      return nnf(cs[0], !positive);
    case FuncKind::And:
    case FuncKind::Or: {
      bool isAnd = (tm.funcKindOf(f) == FuncKind::And) == positive;
      std::vector<TermId> parts;
      parts.reserve(cs.size());
      for (TermId c : cs) parts.push_back(nnf(c, positive));
      return isAnd ? tm.mkAnd(parts) : tm.mkOr(parts);
    }
    case FuncKind::Implies:
      if (positive) return tm.mkOr({nnf(cs[0], false), nnf(cs[1], true)});
      return tm.mkAnd({nnf(cs[0], true), nnf(cs[1], false)});
    case FuncKind::Iff:
      if (positive) {
        return tm.mkAnd({tm.mkOr({nnf(cs[0], false), nnf(cs[1], true)}),
                         tm.mkOr({nnf(cs[1], false), nnf(cs[0], true)})});
      }
      return tm.mkOr({tm.mkAnd({nnf(cs[0], true), nnf(cs[1], false)}),
                      tm.mkAnd({nnf(cs[1], true), nnf(cs[0], false)})});
    case FuncKind::Eq:
      if (tm.sortOf(cs[0]) == tm.boolSort()) {
        // Boolean equality is an iff unless both sides are atomic terms.
        auto atomic = [&](TermId t) {
          return tm.isApp(t) &&
                 (tm.funcKindOf(t) == FuncKind::Uninterpreted ||
                  tm.funcKindOf(t) == FuncKind::True ||
                  tm.funcKindOf(t) == FuncKind::False);
        };
        if (!atomic(cs[0]) || !atomic(cs[1])) {
          return nnf(tm.mkApp(tm.iffDecl(), {cs[0], cs[1]}), positive);
        }
      }
      return positive ? f : tm.mkNot(f);
    case FuncKind::Uninterpreted:
    case FuncKind::CardSort:
    case FuncKind::CardSig:
      if (tm.sortOf(f) != tm.boolSort()) {
        throw KernelError("term of sort " + tm.sort(tm.sortOf(f)).name +
                          " used as a formula");
      }
      return positive ? f : tm.mkNot(f);
  }
  return f;
}

TermId Purifier::proxyFor(TermId forallTerm) {
  auto it = d_proxyCache.find(forallTerm);
  if (it != d_proxyCache.end()) return it->second;
  TermManager& tm = d_tm;
  FuncId pf =
      tm.mkFunc("q!" + std::to_string(d_nextProxy++), {}, tm.boolSort());
  TermId proxy = tm.mkConst(pf);
  QuantRecord rec;
  rec.proxyFunc = pf;
  rec.proxy = proxy;
  rec.vars.assign(tm.boundVars(forallTerm).begin(),
                  tm.boundVars(forallTerm).end());
  rec.body = tm.forallBody(forallTerm);
  d_problem.quantRecords.push_back(std::move(rec));
  d_proxyCache.emplace(forallTerm, proxy);
  return proxy;
}

namespace {
// literal-shaped NNF formulas: an atom or a negated atom
bool isAtomTerm(const TermManager& tm, TermId t) {
  if (!tm.isApp(t)) return false;
  switch (tm.funcKindOf(t)) {
    case FuncKind::Eq:
    case FuncKind::Uninterpreted:
    case FuncKind::CardSort:
    case FuncKind::CardSig:
      return tm.sortOf(t) == tm.boolSort();
    default:
      return false;
  }
}

Literal toLiteral(const TermManager& tm, TermId t, bool positive) {
  if (tm.funcKindOf(t) == FuncKind::Eq) {
    auto cs = tm.children(t);
    if (tm.sortOf(cs[0]) != tm.boolSort()) {
      return mkLiteral(tm, cs[0], cs[1], positive);
    }
    if (cs[1] == tm.trueTerm()) return mkBoolLiteral(tm, cs[0], positive);
    if (cs[0] == tm.trueTerm()) return mkBoolLiteral(tm, cs[1], positive);
    if (cs[1] == tm.falseTerm()) return mkBoolLiteral(tm, cs[0], !positive);
    if (cs[0] == tm.falseTerm()) return mkBoolLiteral(tm, cs[1], !positive);
    return mkLiteral(tm, cs[0], cs[1], positive);
  }
  return mkBoolLiteral(tm, t, positive);
}
}  // namespace

void Purifier::emitClause(std::vector<TermId> disjuncts,
                          std::vector<Clause>& out) {
  TermManager& tm = d_tm;
  std::vector<Literal> lits;
  // Worklist over pending disjuncts; trailing elements processed first.
  std::reverse(disjuncts.begin(), disjuncts.end());
  while (!disjuncts.empty()) {
    TermId d = disjuncts.back();
    disjuncts.pop_back();
    bool positive = true;
    while (tm.isApp(d) && tm.funcKindOf(d) == FuncKind::Not) {
      positive = !positive;
      d = tm.children(d)[0];
    }
    if (d == tm.trueTerm()) {
      if (positive) return;  // tautological clause
      continue;
    }
    if (d == tm.falseTerm()) {
      if (!positive) return;
      continue;
    }
    if (tm.isForall(d)) {
      if (positive) {
        lits.push_back(mkBoolLiteral(tm, proxyFor(d), true));
      } else {
        // Skolemize ¬∀x̄ φ with fresh constants; the resulting formula
        // is ground at this level and re-enters the worklist.
        Substitution sk;
        for (TermId v : tm.boundVars(d)) {
          sk.bind(v, freshSkolem(tm.sortOf(v)));
        }
        TermId negBody = nnf(tm.mkNot(tm.forallBody(d)), true);
        disjuncts.push_back(tm.applySubst(negBody, sk));
      }
      continue;
    }
    if (isAtomTerm(tm, d)) {
      Literal l = toLiteral(tm, d, positive);
      if (std::find(lits.begin(), lits.end(), l.negate()) != lits.end()) {
        return;  // p ∨ ¬p
      }
      if (std::find(lits.begin(), lits.end(), l) == lits.end()) {
        lits.push_back(l);
      }
      continue;
    }
    FuncKind k = tm.funcKindOf(d);
    assert(positive && "nnf leaves negations only on atoms and quantifiers");
    if (k == FuncKind::Or) {
      auto cs = tm.children(d);
      for (size_t i = cs.size(); i-- > 0;) disjuncts.push_back(cs[i]);
      continue;
    }
    if (k == FuncKind::And) {
      // Definitional literal for a conjunction under a disjunction.
      auto it = d_defCache.find(d);
      TermId def;
      if (it != d_defCache.end()) {
        def = it->second;
      } else {
        FuncId df =
            tm.mkFunc("t!" + std::to_string(d_nextDef++), {}, tm.boolSort());
        def = tm.mkConst(df);
        d_defCache.emplace(d, def);
        for (TermId c : tm.children(d)) {
          emitClause({tm.mkNot(def), c}, out);
        }
      }
      disjuncts.push_back(def);
      continue;
    }
    throw KernelError("unexpected formula shape in clausifier: " +
                      tm.toString(d));
  }
#ifndef NDEBUG
  for (const Literal& l : lits) {
    assert(tm.isGround(l.lhs) && tm.isGround(l.rhs));
  }
#endif
  out.push_back(Clause{std::move(lits)});
}

void Purifier::emitFormula(TermId f, std::vector<Clause>& out) {
  if (d_tm.isApp(f) && d_tm.funcKindOf(f) == FuncKind::And) {
    for (TermId c : d_tm.children(f)) emitFormula(c, out);
    return;
  }
  emitClause({f}, out);
}

void Purifier::addAssertion(TermId psi) {
  if (d_tm.sortOf(psi) != d_tm.boolSort()) {
    throw KernelError("assertion is not a formula");
  }
  TermId n = nnf(psi, true);
  std::vector<Clause> clauses;
  emitFormula(n, clauses);
  for (Clause& c : clauses) d_problem.clauses.push_back(std::move(c));
}

std::vector<Clause> Purifier::instantiate(size_t ri,
                                          const Substitution& sigma) {
  const QuantRecord& q = d_problem.quantRecords.at(ri);
  for (TermId v : q.vars) {
    if (!sigma.binds(v)) {
      throw KernelError("instantiation misses variable " + d_tm.varName(v));
    }
    if (!d_tm.isGround(sigma.lookup(v))) {
      throw KernelError("instantiation range is not ground");
    }
  }
  TermId inst = d_tm.applySubst(q.body, sigma);
  std::vector<Clause> out;
  emitClause({d_tm.mkNot(q.proxy), inst}, out);
  for (const Clause& c : out) d_problem.clauses.push_back(c);
  return out;
}

PurifiedProblem purify(TermManager& tm, TermId psi) {
  Purifier p(tm);
  p.addAssertion(psi);
  return std::move(p.problem());
}

}  // namespace finimod

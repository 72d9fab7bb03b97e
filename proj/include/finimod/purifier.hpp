/*
 * purifier.hpp
 *
 * Conversion of input formulas into the purified pair (F, A): a set F of
 * ground clauses plus a set A of proxy equivalences a ⇔ ∀x̄ φ. Positive
 * quantifier occurrences become proxy literals, negative ones are
 * skolemized with fresh constants. Nested quantifiers stay inside record
 * bodies and are purified lazily when instantiated.
 */

#ifndef FINIMOD_PURIFIER_HPP
#define FINIMOD_PURIFIER_HPP

#include <unordered_map>
#include <vector>

#include "finimod/kernel.hpp"

namespace finimod {

struct QuantRecord {
  FuncId proxyFunc;            // fresh Boolean constant a
  TermId proxy;                // the term a
  std::vector<TermId> vars;    // bound variables x̄, in binder order
  TermId body;                 // NNF body; may contain nested quantifiers
};

struct PurifiedProblem {
  std::vector<Clause> clauses;            // F
  std::vector<QuantRecord> quantRecords;  // A
  std::vector<FuncId> skolems;
};

/**
 * Stateful purifier: fresh-symbol counters and the proxy/definition
 * caches persist across calls so that instantiation during solving can
 * keep extending the same problem.
 */
class Purifier {
 public:
  explicit Purifier(TermManager& tm);

  /** Purify ψ and add the resulting clauses and records to the problem. */
  void addAssertion(TermId psi);

  /**
   * Purified clauses of ¬a ∨ (body)σ for record index ri. New records
   * created by nested quantifiers are appended to the problem; the
   * returned clauses are also appended to problem().clauses.
   */
  std::vector<Clause> instantiate(size_t ri, const Substitution& sigma);

  PurifiedProblem& problem() { return d_problem; }
  const PurifiedProblem& problem() const { return d_problem; }
  TermManager& termManager() { return d_tm; }

 private:
  TermId nnf(TermId f, bool positive);
  TermId freshSkolem(SortId sort);
  /** Proxy literal for an NNF forall term, creating the record once. */
  TermId proxyFor(TermId forallTerm);
  /** Clausify one disjunction of NNF formulas, appending to out. */
  void emitClause(std::vector<TermId> disjuncts, std::vector<Clause>& out);
  void emitFormula(TermId f, std::vector<Clause>& out);

  TermManager& d_tm;
  PurifiedProblem d_problem;
  std::unordered_map<TermId, TermId> d_proxyCache;  // forall term -> proxy
  std::unordered_map<TermId, TermId> d_defCache;    // subformula -> def const
  uint32_t d_nextProxy = 0;
  uint32_t d_nextSkolem = 0;
  uint32_t d_nextDef = 0;
};

/** One-shot helper used by tests and the oracle. */
PurifiedProblem purify(TermManager& tm, TermId psi);

}  // namespace finimod

#endif

/*
 * sat_core.hpp
 *
 * CDCL propositional engine over theory atoms: assignment trail with
 * decision points, two-watched-literal unit propagation, first-UIP
 * conflict analysis with clause learning, and backjumping. Atoms are
 * either term (dis)equalities or cardinality constraints; one shared
 * atom table serves both the SAT core and the theory solver.
 */

#ifndef FINIMOD_SAT_CORE_HPP
#define FINIMOD_SAT_CORE_HPP

#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "finimod/kernel.hpp"

namespace finimod {

using AtomId = uint32_t;

/** Atom with sign: index = atom*2 + (positive ? 1 : 0). */
struct Lit {
  uint32_t x = kNone;

  bool operator==(const Lit&) const = default;
};

inline Lit mkLit(AtomId a, bool positive) {
  return {a * 2 + (positive ? 1u : 0u)};
}
inline Lit neg(Lit l) { return {l.x ^ 1u}; }
inline AtomId atomOf(Lit l) { return l.x >> 1; }
inline bool isPos(Lit l) { return (l.x & 1u) != 0; }

enum class AtomKind { TermEq, CardSort, CardSig };

struct AtomInfo {
  AtomKind kind;
  // TermEq: canonically ordered term pair
  TermId lhs = kNone;
  TermId rhs = kNone;
  // CardSort / CardSig
  SortId cardSort = kNone;
  uint32_t cardBound = 0;
  // decision support
  bool inFormula = false;  // occurs in some clause of F
  bool phase = false;      // default decision polarity
};

class AtomTable {
 public:
  AtomId mkTermAtom(TermId a, TermId b);
  AtomId mkCardSortAtom(SortId s, uint32_t bound);
  AtomId mkCardSigAtom(uint32_t bound);
  std::optional<AtomId> findTermAtom(TermId a, TermId b) const;
  std::optional<AtomId> findCardSortAtom(SortId s, uint32_t bound) const;
  std::optional<AtomId> findCardSigAtom(uint32_t bound) const;

  const AtomInfo& info(AtomId a) const { return d_atoms[a]; }
  AtomInfo& info(AtomId a) { return d_atoms[a]; }
  size_t size() const { return d_atoms.size(); }

  /** Engine literal for a kernel literal (card terms become card atoms). */
  Lit toLit(const TermManager& tm, const Literal& l);
  /** Kernel literal for a TermEq engine literal. */
  Literal toLiteral(Lit l) const;
  std::string toString(const TermManager& tm, Lit l) const;

 private:
  std::vector<AtomInfo> d_atoms;
  std::unordered_map<uint64_t, AtomId> d_termIndex;
  std::unordered_map<uint64_t, AtomId> d_cardIndex;
};

enum class LBool { Undef, True, False };

enum class AddClauseResult { Added, Unit, Conflicting, Duplicate, Tautology };

class SatCore {
 public:
  explicit SatCore(AtomTable& atoms);

  /** Called with the new level after the trail was shrunk. */
  void setBackjumpListener(std::function<void(uint32_t)> f) {
    d_onBackjump = std::move(f);
  }
  /** Called for every newly registered clause (input or learned). */
  void setClauseListener(std::function<void(const std::vector<Lit>&)> f) {
    d_onClause = std::move(f);
  }

  bool hasClause(std::vector<Lit> lits) const;
  /**
   * Register a clause. Duplicates are rejected; tautologies are kept
   * (learning a ∨ ¬a is how the theory makes an atom decidable). When
   * the result is Unit or Conflicting the caller must propagate or
   * resolve the returned state before anything else.
   */
  AddClauseResult addClause(std::vector<Lit> lits, bool learned);
  /** Clause that addClause found falsified (valid after Conflicting). */
  const std::vector<Lit>& pendingConflict() const { return d_addConflict; }

  LBool value(Lit l) const;
  LBool valueAtom(AtomId a) const { return d_assign[a]; }
  uint32_t level() const {
    return static_cast<uint32_t>(d_levelStarts.size());
  }
  uint32_t levelOf(AtomId a) const { return d_levelOf[a]; }

  void decide(Lit l);
  void enqueue(Lit l, int reasonClause);
  void enqueueTheory(Lit l, std::function<std::vector<Lit>()> explain);

  /** Unit propagation to fixpoint; returns a falsified clause if any. */
  std::optional<std::vector<Lit>> propagateUnits();

  /**
   * First-UIP conflict analysis: learns an asserting clause, backjumps,
   * and enqueues the UIP literal. Returns false iff the conflict proves
   * unsatisfiability (no decision to undo).
   */
  bool analyzeAndBackjump(std::vector<Lit> conflict);

  void backjumpTo(uint32_t lvl);

  /** Lowest-index unassigned formula atom with its default phase. */
  std::optional<Lit> pickBranchLit() const;

  const std::vector<Lit>& trailLits() const { return d_trail; }
  size_t trailSize() const { return d_trail.size(); }
  Lit trailAt(size_t i) const { return d_trail[i]; }
  bool isDecision(size_t trailIdx) const;
  size_t numClauses() const { return d_clauses.size(); }
  const std::vector<Lit>& clause(size_t i) const { return d_clauses[i].lits; }

  // statistics
  uint64_t numDecisions() const { return d_decisions; }
  uint64_t numConflicts() const { return d_conflicts; }
  uint64_t numPropagations() const { return d_propagations; }

  /** Debug auditor for the trail invariants; throws on violation. */
  void checkTrailInvariants() const;

 private:
  struct ClauseRec {
    std::vector<Lit> lits;
    bool learned;
  };
  struct Reason {
    enum Kind { Decision, FromClause, Theory } kind = Decision;
    int clauseIdx = -1;
    int thunkIdx = -1;
  };

  void attachWatches(int ci);
  void pushAssign(Lit l, Reason r);
  std::vector<Lit> reasonLits(size_t trailIdx);

  AtomTable& d_atomTable;
  std::vector<ClauseRec> d_clauses;
  std::map<std::vector<uint32_t>, int> d_clauseIndex;  // normalized lits
  std::vector<std::vector<int>> d_watches;  // indexed by Lit.x
  std::vector<LBool> d_assign;              // per atom
  std::vector<uint32_t> d_levelOf;          // per atom
  std::vector<int> d_trailPos;              // per atom
  std::vector<Lit> d_trail;
  std::vector<Reason> d_reasons;            // parallel to trail
  std::vector<size_t> d_levelStarts;        // trail index of each decision
  std::vector<std::function<std::vector<Lit>()>> d_thunks;
  size_t d_qhead = 0;
  std::function<void(uint32_t)> d_onBackjump;
  std::function<void(const std::vector<Lit>&)> d_onClause;
  std::vector<Lit> d_addConflict;
  uint64_t d_decisions = 0;
  uint64_t d_conflicts = 0;
  uint64_t d_propagations = 0;
};

}  // namespace finimod

#endif

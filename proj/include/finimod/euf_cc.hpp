/*
 * euf_cc.hpp
 *
 * Congruence closure over ground terms with explanation generation.
 * Maintains cc(M) for the asserted (dis)equalities: equivalence classes
 * per sort, a congruence table, stored disequalities, and a proof forest
 * for explanations. All mutations are journaled so that rollback to a
 * checkpoint restores the state exactly; terms may only be registered at
 * the base level (no checkpoint outstanding).
 */

#ifndef FINIMOD_EUF_CC_HPP
#define FINIMOD_EUF_CC_HPP

#include <optional>
#include <unordered_map>
#include <vector>

#include "finimod/kernel.hpp"

namespace finimod {

/** Mutation callbacks consumed by the FCC solver's disequality graphs. */
class EGraphNotify {
 public:
  virtual ~EGraphNotify() = default;
  /** A fresh singleton class (root identifies the class). */
  virtual void onNewClass(TermId root, SortId sort) = 0;
  /** Class of `absorbed` was merged into class of `kept`. */
  virtual void onMerge(TermId kept, TermId absorbed, SortId sort) = 0;
  /** A disequality now links the two (distinct) classes. */
  virtual void onDiseq(TermId rootA, TermId rootB, SortId sort,
                       const Literal& src) = 0;
};

class EGraph {
 public:
  explicit EGraph(TermManager& tm);

  void setNotify(EGraphNotify* n) { d_notify = n; }

  /** Register t and its subterms. Only allowed at the base level. */
  void registerTerm(TermId t);
  bool isRegistered(TermId t) const { return d_nodeOf.count(t) != 0; }

  /** A set of asserted literals that is EUF-unsatisfiable. */
  using Conflict = std::vector<Literal>;

  /**
   * Assert a ground (dis)equality. Returns a conflict explanation when
   * the store becomes EUF-inconsistent; the caller is then expected to
   * roll back past the offending assertion.
   */
  std::optional<Conflict> assertLit(const Literal& l);

  /** Representative: the lowest-creation-index term of t's class. */
  TermId rep(TermId t) const;
  /** Union-find root term; stable only between mutations. */
  TermId rootTerm(TermId t) const;
  bool sameClass(TermId a, TermId b) const;
  /** True iff a stored disequality links the classes of s and t. */
  bool areDisequal(TermId s, TermId t) const;

  /** Representatives of all classes of sort s, in creation order. */
  std::vector<TermId> classesOfSort(SortId s) const;
  size_t numClassesOfSort(SortId s) const;
  std::vector<TermId> classMembers(TermId t) const;
  /** All registered terms in registration order. */
  const std::vector<TermId>& registeredTerms() const { return d_termOrder; }

  /**
   * Asserted literals entailing s ≈ t; each precedes the merge that
   * joined them. Requires sameClass(s, t).
   */
  std::vector<Literal> explainEq(TermId s, TermId t);

  size_t checkpoint() const { return d_undo.size(); }
  void rollback(size_t cp);

  /** Digest of the class partition and disequality store (tests). */
  uint64_t fingerprint() const;

 private:
  using Node = uint32_t;

  struct Just {
    enum Kind { Input, Builtin, Cong } kind;
    Literal lit{};      // Input
    TermId appA = kNone;  // Cong
    TermId appB = kNone;
  };

  struct DiseqEntry {
    TermId ta;
    TermId tb;
    Just src;  // Input or Builtin
  };

  struct NodeData {
    TermId term;
    Node parent;
    uint32_t size;
    TermId repTerm;  // lowest creation index in class; valid on roots
    std::vector<Node> members;     // valid on roots
    std::vector<Node> uses;        // app nodes whose signature mentions class
    std::vector<DiseqEntry> diseqs;  // valid on roots
    Node proofParent = kNone;
    Just proofJust{};
  };

  struct UndoOp {
    enum Kind { Union, ProofEdge, SigInsert, DiseqPush } kind;
    // Union
    Node absorbed = kNone;
    Node kept = kNone;
    uint32_t oldMembersLen = 0;
    uint32_t oldUsesLen = 0;
    uint32_t oldDiseqLen = 0;
    TermId oldRepTerm = kNone;
    // ProofEdge
    Node node = kNone;
    Node oldProofParent = kNone;
    Just oldProofJust{};
    // SigInsert / DiseqPush
    std::string sigKey;
    Node diseqRoot = kNone;
  };

  Node nodeOf(TermId t) const;
  Node find(Node n) const;
  std::string sigKeyOf(Node app) const;
  std::optional<Conflict> processPending();
  void reverseProofPath(Node n);
  void setProofEdge(Node n, Node parent, const Just& j);
  Conflict explainConflict(const DiseqEntry& e);
  void explainPair(TermId a, TermId b, std::vector<Literal>& out);

  TermManager& d_tm;
  EGraphNotify* d_notify = nullptr;
  std::vector<NodeData> d_nodes;
  std::unordered_map<TermId, Node> d_nodeOf;
  std::vector<TermId> d_termOrder;
  std::unordered_map<std::string, Node> d_sigTable;
  std::vector<UndoOp> d_undo;
  struct Pending {
    TermId a;
    TermId b;
    Just just;
  };
  std::vector<Pending> d_pending;
};

}  // namespace finimod

#endif

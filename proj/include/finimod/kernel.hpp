/*
 * kernel.hpp
 *
 * Sorted first-order term language: sorts, function declarations,
 * hash-consed terms, literals, clauses, substitutions and syntactic
 * unification. Everything downstream keys on term identity, so two
 * structurally equal terms are always the same TermId.
 */

#ifndef FINIMOD_KERNEL_HPP
#define FINIMOD_KERNEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace finimod {

using SortId = uint32_t;
using FuncId = uint32_t;
using TermId = uint32_t;

constexpr uint32_t kNone = 0xffffffffu;

/** Thrown on ill-sorted construction and misuse of the term API. */
class KernelError : public std::runtime_error {
 public:
  explicit KernelError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class SortKind { Uninterpreted, Boolean };

struct Sort {
  SortId id;
  std::string name;
  SortKind kind;
};

/**
 * Function symbols. Logical connectives, equality, the Boolean constants
 * and cardinality atoms are built-in declarations tagged by kind; user
 * symbols (including skolems and proxy variables) are Uninterpreted.
 */
enum class FuncKind {
  Uninterpreted,
  True,
  False,
  Eq,
  Not,
  And,
  Or,
  Implies,
  Iff,
  CardSort,  // card[S,k]: sort S has at most k elements
  CardSig,   // card[Sigma,k]: sum of all sort cardinalities is at most k
};

struct FuncDecl {
  FuncId id;
  std::string name;
  FuncKind kind;
  std::vector<SortId> argSorts;
  SortId retSort;
  // CardSort/CardSig payload
  SortId cardSort = kNone;
  uint32_t cardBound = 0;

  size_t arity() const { return argSorts.size(); }
};

enum class TermKind { Var, App, Forall };

struct TermData {
  TermKind kind;
  SortId sort;
  FuncId func = kNone;          // App
  std::string varName;          // Var
  std::vector<TermId> children; // App args; Forall: bound vars then body
};

class Substitution;

/**
 * Owns all sorts, declarations and terms of one problem instance.
 * Terms are immutable and interned: mkApp for the same declaration and
 * children always returns the same TermId.
 */
class TermManager {
 public:
  TermManager();

  // sorts
  SortId mkSort(const std::string& name);
  SortId boolSort() const { return d_boolSort; }
  const Sort& sort(SortId s) const { return d_sorts.at(s); }
  size_t numSorts() const { return d_sorts.size(); }
  /** Uninterpreted sorts in creation order. */
  std::vector<SortId> uninterpretedSorts() const;

  // declarations
  FuncId mkFunc(const std::string& name, std::vector<SortId> argSorts,
                SortId retSort);
  FuncId eqDecl(SortId argSort);
  FuncId notDecl();
  FuncId andDecl(size_t arity);
  FuncId orDecl(size_t arity);
  FuncId impliesDecl();
  FuncId iffDecl();
  FuncId cardSortDecl(SortId s, uint32_t bound);
  FuncId cardSigDecl(uint32_t bound);
  const FuncDecl& func(FuncId f) const { return d_funcs.at(f); }
  size_t numFuncs() const { return d_funcs.size(); }

  // terms
  TermId mkVar(const std::string& name, SortId sort);
  TermId mkApp(FuncId f, const std::vector<TermId>& args);
  TermId mkConst(FuncId f) { return mkApp(f, {}); }
  TermId mkForall(const std::vector<TermId>& vars, TermId body);
  TermId trueTerm() const { return d_true; }
  TermId falseTerm() const { return d_false; }

  // formula conveniences
  TermId mkEq(TermId a, TermId b);
  TermId mkNot(TermId f);
  TermId mkAnd(const std::vector<TermId>& fs);
  TermId mkOr(const std::vector<TermId>& fs);

  // accessors
  TermKind kind(TermId t) const { return d_terms[t].kind; }
  SortId sortOf(TermId t) const { return d_terms[t].sort; }
  FuncId funcOf(TermId t) const { return d_terms[t].func; }
  FuncKind funcKindOf(TermId t) const;
  const std::string& varName(TermId t) const { return d_terms[t].varName; }
  std::span<const TermId> children(TermId t) const;
  bool isVar(TermId t) const { return kind(t) == TermKind::Var; }
  bool isApp(TermId t) const { return kind(t) == TermKind::App; }
  bool isForall(TermId t) const { return kind(t) == TermKind::Forall; }
  /** Bound variables of a Forall term. */
  std::span<const TermId> boundVars(TermId t) const;
  TermId forallBody(TermId t) const;
  size_t numTerms() const { return d_terms.size(); }

  bool isGround(TermId t) const;
  bool containsQuantifier(TermId t) const;
  /** Free variables in order of first occurrence. */
  std::vector<TermId> freeVars(TermId t) const;
  /** Number of nodes in the term dag, counting shared subterms once. */
  size_t termSize(TermId t) const;

  TermId applySubst(TermId t, const Substitution& sigma);

  std::string toString(TermId t) const;

 private:
  TermId intern(TermData&& data);

  std::vector<Sort> d_sorts;
  std::vector<FuncDecl> d_funcs;
  std::vector<TermData> d_terms;
  std::unordered_map<std::string, TermId> d_termTable;  // structural key
  std::map<SortId, FuncId> d_eqDecls;
  std::map<size_t, FuncId> d_andDecls;
  std::map<size_t, FuncId> d_orDecls;
  std::map<std::pair<SortId, uint32_t>, FuncId> d_cardSortDecls;
  std::map<uint32_t, FuncId> d_cardSigDecls;
  SortId d_boolSort;
  FuncId d_notDecl = kNone;
  FuncId d_impliesDecl = kNone;
  FuncId d_iffDecl = kNone;
  TermId d_true;
  TermId d_false;
};

/** Finite, sort-preserving map from variables to terms. */
class Substitution {
 public:
  Substitution() = default;

  void bind(TermId var, TermId to);
  bool binds(TermId var) const { return d_map.count(var) != 0; }
  TermId lookup(TermId var) const;  // var itself when unbound
  size_t size() const { return d_map.size(); }
  bool empty() const { return d_map.empty(); }
  /** Bindings ordered by variable TermId. */
  const std::map<TermId, TermId>& map() const { return d_map; }

  bool operator==(const Substitution& o) const = default;

 private:
  std::map<TermId, TermId> d_map;
};

/**
 * Most general unifier of t1 and t2, or nullopt when the terms do not
 * unify. Syntactic unification with occurs check; the domain contains
 * only variables of t1 and t2.
 */
std::optional<Substitution> mgu(TermManager& tm, TermId t1, TermId t2);

/**
 * A literal is an oriented (dis)equality between two terms of the same
 * sort. The pair (lhs, rhs) is canonically ordered by term identity so
 * that a literal and its complement share one atom.
 */
struct Literal {
  TermId lhs;
  TermId rhs;
  bool positive;

  Literal negate() const { return {lhs, rhs, !positive}; }
  auto operator<=>(const Literal&) const = default;
};

Literal mkLiteral(const TermManager& tm, TermId a, TermId b, bool positive);
/** Atom t ≈ true for a Boolean-sorted term t. */
Literal mkBoolLiteral(const TermManager& tm, TermId t, bool positive);
std::string toString(const TermManager& tm, const Literal& l);

/** Duplicate-free disjunction of literals; empty represents ⊥. */
struct Clause {
  std::vector<Literal> lits;

  bool operator==(const Clause&) const = default;
};

Clause mkClause(std::vector<Literal> lits);
std::string toString(const TermManager& tm, const Clause& c);

}  // namespace finimod

#endif

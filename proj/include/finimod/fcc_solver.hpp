/*
 * fcc_solver.hpp
 *
 * Theory solver for EUF with finite cardinality constraints. Maintains a
 * disequality graph per uninterpreted sort whose vertices are congruence
 * classes, partitioned into k-regions with watched vertex sets for
 * incomplete clique detection. Implements the weak effort check (EUF
 * conflicts, cardinality contradictions, the fixed-cardinality ladder on
 * card[Sigma,k]/card[S,k] atoms, clique lemmas) and the strong effort
 * check (splitting lemmas guided by watched sets, region merging by
 * interregional edge density). All state is journaled for exact rollback.
 */

#ifndef FINIMOD_FCC_SOLVER_HPP
#define FINIMOD_FCC_SOLVER_HPP

#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "finimod/euf_cc.hpp"
#include "finimod/kernel.hpp"
#include "finimod/sat_core.hpp"

namespace finimod {

struct FccConfig {
  bool regions = true;                // false: one region per sort
  bool cliqueExplainConflict = false; // report cliques via Conflict_e
  bool ladder = false;                // fixed-cardinality strategy
  uint32_t maxSigCard = 0;            // resource bound, 0 = unlimited
};

enum class EffortResult { Clean, Applied, Conflict, ModelReady, Resource };

/**
 * The evolving disequality graph of one sort together with its
 * regionalization. Vertices are identified by dense indices; dead
 * vertices stay allocated so the journal can revive them.
 */
class DisequalityGraph {
 public:
  struct Vertex {
    TermId rootTerm;                 // key into the egraph at creation
    bool alive = true;
    uint32_t region = 0;
    std::map<uint32_t, uint32_t> adj;  // neighbor vid -> edge multiplicity
  };
  struct Region {
    bool alive = true;
    std::vector<uint32_t> members;  // sorted vids
    std::vector<uint32_t> watched;  // sorted vids; k+1 entries when large
  };

  DisequalityGraph(SortId sort, bool useRegions)
      : d_sort(sort), d_useRegions(useRegions) {}

  SortId sort() const { return d_sort; }
  uint32_t bound() const { return d_bound; }        // 0 = unbounded
  uint32_t cliqueSize() const { return d_bound + 1; }
  size_t liveVertexCount() const { return d_liveCount; }
  const std::vector<Vertex>& vertices() const { return d_vertices; }
  const std::vector<Region>& regionList() const { return d_regions; }
  uint32_t vidOfRoot(TermId root) const;
  bool adjacent(uint32_t u, uint32_t v) const;
  uint32_t degree(uint32_t v) const;
  /** Edges from v leaving v's region. */
  uint32_t ext(uint32_t v) const;
  /** Earliest asserted source literal of edge (u, v). */
  const Literal& edgeSource(uint32_t u, uint32_t v) const;

  using Journal = std::vector<std::function<void()>>;

  void addVertex(TermId root, Journal& j);
  void addEdge(TermId rootA, TermId rootB, const Literal& src, Journal& j);
  void mergeVertices(TermId keptRoot, TermId absorbedRoot, Journal& j);
  /** Discard the regionalization and rebuild for a new bound. */
  void setBound(uint32_t k, Journal& j);

  bool isValidRegion(uint32_t rid) const;
  void fixRegion(uint32_t rid, Journal& j);
  /** Merge region src into dst and re-fix. */
  void mergeRegions(uint32_t dst, uint32_t src, Journal& j);
  /** Pair of small regions with maximal interregional edge density. */
  std::optional<std::pair<uint32_t, uint32_t>> densestRegionPair() const;
  double interDensity(uint32_t r1, uint32_t r2) const;

  /** Throws KernelError when any structural invariant is violated. */
  void audit() const;
  uint64_t fingerprint() const;

 private:
  void moveVertex(uint32_t v, uint32_t toRegion, Journal& j);
  void setWatched(uint32_t rid, std::vector<uint32_t> w, Journal& j);
  /** Re-establish the watched set after membership changes. */
  void refreshWatched(uint32_t rid, std::vector<uint32_t> seed, Journal& j);
  uint32_t newRegion(uint32_t firstMember, Journal& j);

  SortId d_sort;
  bool d_useRegions;
  uint32_t d_bound = 0;
  size_t d_liveCount = 0;
  std::vector<Vertex> d_vertices;
  std::vector<Region> d_regions;
  std::unordered_map<TermId, uint32_t> d_rootToVid;
  std::map<std::pair<uint32_t, uint32_t>, std::vector<Literal>> d_edgeSrc;
};

class FccSolver : public EGraphNotify {
 public:
  FccSolver(TermManager& tm, AtomTable& atoms, SatCore& sat, EGraph& eg,
            FccConfig cfg);

  // EGraphNotify
  void onNewClass(TermId root, SortId sort) override;
  void onMerge(TermId kept, TermId absorbed, SortId sort) override;
  void onDiseq(TermId rootA, TermId rootB, SortId sort,
               const Literal& src) override;

  /** Trail consumption for cardinality atoms. */
  void assertCardAtom(AtomId atom, bool positive);

  /**
   * Fixed-cardinality ladder plus clique detection. Applies at most one
   * rule (Learn, Decide or Conflict) per call.
   */
  EffortResult weakEffort();
  /** Splitting on class representatives; ModelReady when within bounds. */
  EffortResult strongEffort();
  const std::vector<Lit>& conflict() const { return d_conflict; }

  size_t checkpoint() const { return d_journal.size(); }
  void rollback(size_t cp);

  struct Stats {
    uint64_t ladderSteps = 0;
    uint64_t cliqueLemmas = 0;
    uint64_t splitLemmas = 0;
  };
  const Stats& stats() const { return d_stats; }
  /** Representatives in the most recent clique lemma (tests). */
  const std::vector<TermId>& lastCliqueReps() const {
    return d_lastCliqueReps;
  }

  const DisequalityGraph& graph(SortId s) const;
  /** Minimal fixed bound per sort at model_ready (0 = unbounded). */
  uint32_t fixedBound(SortId s) const;
  /** Region and trail-shape invariant auditor; throws on violation. */
  void audit() const;

 private:
  DisequalityGraph& graphRef(SortId s);
  /** Least j >= lo with card atom for j not assigned false. */
  uint32_t leastOpenBound(SortId s, uint32_t lo) const;
  uint32_t leastOpenSigBound(uint32_t lo) const;
  /** fix(a): Learn a ∨ ¬a when the atom is new, Decide a when unassigned. */
  EffortResult fixAtom(AtomId atom, bool isSigAtom);
  EffortResult checkCardContradictions();
  EffortResult checkCliques();
  EffortResult emitCliqueLemma(DisequalityGraph& g,
                               const std::vector<uint32_t>& watched);
  bool watchedFullyConnected(const DisequalityGraph& g,
                             const std::vector<uint32_t>& w) const;

  TermManager& d_tm;
  AtomTable& d_atoms;
  SatCore& d_sat;
  EGraph& d_eg;
  FccConfig d_cfg;
  std::vector<DisequalityGraph> d_graphs;  // one per uninterpreted sort
  std::map<SortId, size_t> d_graphIndex;
  uint32_t d_sigBound = 0;  // min asserted positive card[Sigma,k]
  DisequalityGraph::Journal d_journal;
  std::vector<Lit> d_conflict;
  Stats d_stats;
  std::vector<TermId> d_lastCliqueReps;
};

}  // namespace finimod

#endif

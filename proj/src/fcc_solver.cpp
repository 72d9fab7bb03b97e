#include "finimod/fcc_solver.hpp"

#include <algorithm>
#include <cassert>

namespace finimod {

namespace {
std::pair<uint32_t, uint32_t> ordered(uint32_t a, uint32_t b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}
}  // namespace

uint32_t DisequalityGraph::vidOfRoot(TermId root) const {
  auto it = d_rootToVid.find(root);
  assert(it != d_rootToVid.end() && "unknown class root");
  return it->second;
}

bool DisequalityGraph::adjacent(uint32_t u, uint32_t v) const {
  return d_vertices[u].adj.count(v) != 0;
}

uint32_t DisequalityGraph::degree(uint32_t v) const {
  return static_cast<uint32_t>(d_vertices[v].adj.size());
}

uint32_t DisequalityGraph::ext(uint32_t v) const {
  uint32_t r = d_vertices[v].region;
  uint32_t n = 0;
  for (const auto& [u, cnt] : d_vertices[v].adj) {
    (void)cnt;
    if (d_vertices[u].region != r) ++n;
  }
  return n;
}

const Literal& DisequalityGraph::edgeSource(uint32_t u, uint32_t v) const {
  auto it = d_edgeSrc.find(ordered(u, v));
  assert(it != d_edgeSrc.end() && !it->second.empty());
  return it->second.front();
}

uint32_t DisequalityGraph::newRegion(uint32_t firstMember, Journal& j) {
  uint32_t rid = static_cast<uint32_t>(d_regions.size());
  d_regions.push_back(Region{true, {firstMember}, {}});
  j.push_back([this]() { d_regions.pop_back(); });
  return rid;
}

void DisequalityGraph::addVertex(TermId root, Journal& j) {
  uint32_t vid = static_cast<uint32_t>(d_vertices.size());
  d_vertices.push_back(Vertex{root, true, 0, {}});
  d_rootToVid.emplace(root, vid);
  ++d_liveCount;
  j.push_back([this, root]() {
    d_vertices.pop_back();
    d_rootToVid.erase(root);
    --d_liveCount;
  });
  if (!d_useRegions && !d_regions.empty()) {
    // single global region
    uint32_t rid = 0;
    d_vertices[vid].region = rid;
    auto& mem = d_regions[rid].members;
    mem.insert(std::lower_bound(mem.begin(), mem.end(), vid), vid);
    j.push_back([this, vid]() {
      auto& m = d_regions[0].members;
      m.erase(std::find(m.begin(), m.end(), vid));
    });
    refreshWatched(rid, d_regions[rid].watched, j);
  } else {
    d_vertices[vid].region = newRegion(vid, j);
  }
}

void DisequalityGraph::moveVertex(uint32_t v, uint32_t toRegion, Journal& j) {
  uint32_t from = d_vertices[v].region;
  assert(from != toRegion);
  auto& fm = d_regions[from].members;
  fm.erase(std::find(fm.begin(), fm.end(), v));
  auto& tmem = d_regions[toRegion].members;
  tmem.insert(std::lower_bound(tmem.begin(), tmem.end(), v), v);
  d_vertices[v].region = toRegion;
  j.push_back([this, v, from, toRegion]() {
    auto& t = d_regions[toRegion].members;
    t.erase(std::find(t.begin(), t.end(), v));
    auto& f = d_regions[from].members;
    f.insert(std::lower_bound(f.begin(), f.end(), v), v);
    d_vertices[v].region = from;
  });
}

void DisequalityGraph::setWatched(uint32_t rid, std::vector<uint32_t> w,
                                  Journal& j) {
  if (d_regions[rid].watched == w) return;
  std::vector<uint32_t> old = d_regions[rid].watched;
  d_regions[rid].watched = std::move(w);
  j.push_back([this, rid, old = std::move(old)]() {
    d_regions[rid].watched = old;
  });
}

void DisequalityGraph::refreshWatched(uint32_t rid,
                                      std::vector<uint32_t> seed, Journal& j) {
  Region& r = d_regions[rid];
  uint32_t K = cliqueSize();
  if (!r.alive || d_bound == 0 || r.members.size() < K) {
    setWatched(rid, {}, j);
    return;
  }
  // keep still-valid seed vertices, then fill with highest-degree members
  std::vector<uint32_t> w;
  for (uint32_t v : seed) {
    if (d_vertices[v].alive && d_vertices[v].region == rid &&
        std::find(w.begin(), w.end(), v) == w.end()) {
      w.push_back(v);
    }
  }
  auto byDegree = [this](uint32_t a, uint32_t b) {
    uint32_t da = degree(a), db = degree(b);
    return da != db ? da > db : a < b;
  };
  if (w.size() > K) {
    std::sort(w.begin(), w.end(), byDegree);
    w.resize(K);
  } else if (w.size() < K) {
    std::vector<uint32_t> cands;
    for (uint32_t v : r.members) {
      if (std::find(w.begin(), w.end(), v) == w.end()) cands.push_back(v);
    }
    std::sort(cands.begin(), cands.end(), byDegree);
    for (uint32_t v : cands) {
      if (w.size() >= K) break;
      w.push_back(v);
    }
  }
  std::sort(w.begin(), w.end());
  setWatched(rid, std::move(w), j);
}

void DisequalityGraph::addEdge(TermId rootA, TermId rootB, const Literal& src,
                               Journal& j) {
  uint32_t u = vidOfRoot(rootA);
  uint32_t v = vidOfRoot(rootB);
  assert(u != v && "disequality within one class");
  bool fresh = !adjacent(u, v);
  d_vertices[u].adj[v] += 1;
  d_vertices[v].adj[u] += 1;
  d_edgeSrc[ordered(u, v)].push_back(src);
  j.push_back([this, u, v]() {
    if (--d_vertices[u].adj[v] == 0) d_vertices[u].adj.erase(v);
    if (--d_vertices[v].adj[u] == 0) d_vertices[v].adj.erase(u);
    auto key = ordered(u, v);
    d_edgeSrc[key].pop_back();
    if (d_edgeSrc[key].empty()) d_edgeSrc.erase(key);
  });
  if (fresh && d_useRegions && d_bound > 0) {
    fixRegion(d_vertices[u].region, j);
    fixRegion(d_vertices[v].region, j);
  }
}

void DisequalityGraph::mergeVertices(TermId keptRoot, TermId absorbedRoot,
                                     Journal& j) {
  uint32_t u = vidOfRoot(keptRoot);
  uint32_t d = vidOfRoot(absorbedRoot);
  assert(!adjacent(u, d) && "merging disequal classes");

  // quotient vertex u inherits all of d's edges
  std::vector<std::pair<uint32_t, uint32_t>> inherited(
      d_vertices[d].adj.begin(), d_vertices[d].adj.end());
  for (const auto& [n, c] : inherited) {
    d_vertices[n].adj.erase(d);
    d_vertices[n].adj[u] += c;
    d_vertices[u].adj[n] += c;
    auto fromKey = ordered(d, n);
    auto toKey = ordered(u, n);
    auto& fromStack = d_edgeSrc[fromKey];
    auto& toStack = d_edgeSrc[toKey];
    size_t moved = fromStack.size();
    toStack.insert(toStack.end(), fromStack.begin(), fromStack.end());
    d_edgeSrc.erase(fromKey);
    j.push_back([this, u, d, n, c, moved]() {
      auto tk = ordered(u, n);
      auto& ts = d_edgeSrc[tk];
      auto& fs = d_edgeSrc[ordered(d, n)];
      fs.insert(fs.end(), ts.end() - moved, ts.end());
      ts.resize(ts.size() - moved);
      if (ts.empty()) d_edgeSrc.erase(tk);
      if ((d_vertices[u].adj[n] -= c) == 0) d_vertices[u].adj.erase(n);
      if ((d_vertices[n].adj[u] -= c) == 0) d_vertices[n].adj.erase(u);
      d_vertices[n].adj[d] = c;
    });
  }

  d_vertices[d].alive = false;
  d_rootToVid.erase(absorbedRoot);
  --d_liveCount;
  j.push_back([this, d, absorbedRoot]() {
    d_vertices[d].alive = true;
    d_rootToVid.emplace(absorbedRoot, d);
    ++d_liveCount;
  });

  uint32_t rU = d_vertices[u].region;
  uint32_t rD = d_vertices[d].region;
  auto& dm = d_regions[rD].members;
  dm.erase(std::find(dm.begin(), dm.end(), d));
  j.push_back([this, d, rD]() {
    auto& m = d_regions[rD].members;
    m.insert(std::lower_bound(m.begin(), m.end(), d), d);
  });
  refreshWatched(rD, d_regions[rD].watched, j);
  if (rU != rD) refreshWatched(rU, d_regions[rU].watched, j);
  if (d_useRegions && d_bound > 0) {
    fixRegion(rU, j);
    if (rU != rD && d_regions[rD].alive && !d_regions[rD].members.empty()) {
      fixRegion(rD, j);
    }
  }
  if (d_regions[rD].members.empty() && d_regions[rD].alive) {
    d_regions[rD].alive = false;
    j.push_back([this, rD]() { d_regions[rD].alive = true; });
  }
}

void DisequalityGraph::setBound(uint32_t k, Journal& j) {
  assert(k >= 1);
  if (d_bound != 0 && k >= d_bound) return;

  // snapshot the whole regionalization; a rebuild is rare and wholesale
  uint32_t oldBound = d_bound;
  std::vector<Region> oldRegions = d_regions;
  std::vector<uint32_t> oldAssign(d_vertices.size());
  for (size_t i = 0; i < d_vertices.size(); ++i) {
    oldAssign[i] = d_vertices[i].region;
  }
  j.push_back([this, oldBound, oldRegions = std::move(oldRegions),
               oldAssign = std::move(oldAssign)]() {
    d_bound = oldBound;
    d_regions = oldRegions;
    for (size_t i = 0; i < d_vertices.size(); ++i) {
      d_vertices[i].region = oldAssign[i];
    }
  });

  d_bound = k;
  d_regions.clear();
  std::vector<uint32_t> live;
  for (uint32_t v = 0; v < d_vertices.size(); ++v) {
    if (d_vertices[v].alive) live.push_back(v);
  }
  Journal scratch;  // rebuild internals are covered by the snapshot
  if (!d_useRegions) {
    d_regions.push_back(Region{true, live, {}});
    for (uint32_t v : live) d_vertices[v].region = 0;
    if (!live.empty()) refreshWatched(0, {}, scratch);
    return;
  }
  for (uint32_t v : live) {
    d_vertices[v].region = static_cast<uint32_t>(d_regions.size());
    d_regions.push_back(Region{true, {v}, {}});
  }
  // replay existing edges against the fresh singleton partition
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t v : live) {
    for (const auto& [n, c] : d_vertices[v].adj) {
      (void)c;
      if (v < n) edges.emplace_back(v, n);
    }
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& [a, b] : edges) {
    fixRegion(d_vertices[a].region, scratch);
    fixRegion(d_vertices[b].region, scratch);
  }
}

bool DisequalityGraph::isValidRegion(uint32_t rid) const {
  if (d_bound == 0) return true;
  const Region& r = d_regions[rid];
  if (!r.alive) return true;
  uint32_t K = cliqueSize();
  std::vector<uint32_t> exts;
  exts.reserve(r.members.size());
  for (uint32_t v : r.members) exts.push_back(ext(v));
  for (uint32_t i = 1; i < K; ++i) {
    uint32_t cnt = 0;
    for (uint32_t e : exts) {
      if (e >= i) ++cnt;
    }
    if (cnt >= K - i) return false;
  }
  return true;
}

double DisequalityGraph::interDensity(uint32_t r1, uint32_t r2) const {
  uint32_t edges = 0;
  for (uint32_t v : d_regions[r1].members) {
    for (const auto& [n, c] : d_vertices[v].adj) {
      (void)c;
      if (d_vertices[n].region == r2) ++edges;
    }
  }
  double denom = static_cast<double>(d_regions[r1].members.size()) *
                 static_cast<double>(d_regions[r2].members.size());
  return edges / denom;
}

void DisequalityGraph::mergeRegions(uint32_t dst, uint32_t src, Journal& j) {
  assert(dst != src && d_regions[dst].alive && d_regions[src].alive);
  std::vector<uint32_t> seed = d_regions[dst].watched;
  for (uint32_t v : d_regions[src].watched) seed.push_back(v);
  std::vector<uint32_t> moving = d_regions[src].members;
  for (uint32_t v : moving) moveVertex(v, dst, j);
  d_regions[src].alive = false;
  j.push_back([this, src]() { d_regions[src].alive = true; });
  setWatched(src, {}, j);
  refreshWatched(dst, std::move(seed), j);
}

void DisequalityGraph::fixRegion(uint32_t rid, Journal& j) {
  if (!d_useRegions || d_bound == 0) return;
  if (!d_regions[rid].alive) return;
  while (!isValidRegion(rid)) {
    // merge with the region of highest interregional edge density;
    // ties prefer the smaller combined size, then the lower id
    uint32_t best = kNone;
    double bestDensity = -1.0;
    size_t bestSize = 0;
    for (uint32_t r = 0; r < d_regions.size(); ++r) {
      if (r == rid || !d_regions[r].alive) continue;
      double den = interDensity(rid, r);
      size_t sz = d_regions[r].members.size();
      if (best == kNone || den > bestDensity ||
          (den == bestDensity && sz < bestSize)) {
        best = r;
        bestDensity = den;
        bestSize = sz;
      }
    }
    if (best == kNone) break;  // single region is always valid
    mergeRegions(rid, best, j);
  }
}

std::optional<std::pair<uint32_t, uint32_t>>
DisequalityGraph::densestRegionPair() const {
  uint32_t bi = kNone, bj = kNone;
  double bestDensity = -1.0;
  size_t bestSize = 0;
  for (uint32_t i = 0; i < d_regions.size(); ++i) {
    if (!d_regions[i].alive) continue;
    for (uint32_t j = i + 1; j < d_regions.size(); ++j) {
      if (!d_regions[j].alive) continue;
      double den = interDensity(i, j);
      size_t sz = d_regions[i].members.size() + d_regions[j].members.size();
      if (bi == kNone || den > bestDensity ||
          (den == bestDensity && sz < bestSize)) {
        bi = i;
        bj = j;
        bestDensity = den;
        bestSize = sz;
      }
    }
  }
  if (bi == kNone) return std::nullopt;
  return std::make_pair(bi, bj);
}

void DisequalityGraph::audit() const {
  size_t live = 0;
  for (uint32_t v = 0; v < d_vertices.size(); ++v) {
    const Vertex& vx = d_vertices[v];
    if (!vx.alive) continue;
    ++live;
    if (d_rootToVid.at(vx.rootTerm) != v) {
      throw KernelError("vertex root map inconsistent");
    }
    const Region& r = d_regions.at(vx.region);
    if (!r.alive ||
        std::find(r.members.begin(), r.members.end(), v) == r.members.end()) {
      throw KernelError("vertex not in its region");
    }
    for (const auto& [n, c] : vx.adj) {
      if (n == v) throw KernelError("self loop");
      if (!d_vertices[n].alive) throw KernelError("edge to dead vertex");
      auto it = d_vertices[n].adj.find(v);
      if (it == d_vertices[n].adj.end() || it->second != c) {
        throw KernelError("asymmetric adjacency");
      }
      if (d_edgeSrc.at(ordered(v, n)).size() != c) {
        throw KernelError("edge source multiplicity mismatch");
      }
    }
  }
  if (live != d_liveCount) throw KernelError("live count mismatch");
  size_t covered = 0;
  for (uint32_t rid = 0; rid < d_regions.size(); ++rid) {
    const Region& r = d_regions[rid];
    if (!r.alive) continue;
    if (!std::is_sorted(r.members.begin(), r.members.end())) {
      throw KernelError("region members unsorted");
    }
    for (uint32_t v : r.members) {
      if (!d_vertices[v].alive || d_vertices[v].region != rid) {
        throw KernelError("region membership inconsistent");
      }
      ++covered;
    }
    if (!isValidRegion(rid)) throw KernelError("k-region condition violated");
    if (d_bound > 0) {
      uint32_t K = cliqueSize();
      if (r.members.size() >= K) {
        if (r.watched.size() != K) {
          throw KernelError("large region watched set has wrong size");
        }
        for (uint32_t w : r.watched) {
          if (std::find(r.members.begin(), r.members.end(), w) ==
              r.members.end()) {
            throw KernelError("watched vertex outside region");
          }
        }
      } else if (!r.watched.empty()) {
        throw KernelError("small region has watched vertices");
      }
    }
  }
  if (covered != live) throw KernelError("regions do not partition vertices");
}

uint64_t DisequalityGraph::fingerprint() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  mix(d_bound);
  for (const Vertex& v : d_vertices) {
    mix(v.alive);
    mix(v.region);
    for (const auto& [n, c] : v.adj) {
      mix(n);
      mix(c);
    }
  }
  for (const Region& r : d_regions) {
    mix(r.alive);
    for (uint32_t m : r.members) mix(m);
    for (uint32_t w : r.watched) mix(w);
  }
  return h;
}

FccSolver::FccSolver(TermManager& tm, AtomTable& atoms, SatCore& sat,
                     EGraph& eg, FccConfig cfg)
    : d_tm(tm), d_atoms(atoms), d_sat(sat), d_eg(eg), d_cfg(cfg) {}

DisequalityGraph& FccSolver::graphRef(SortId s) {
  auto it = d_graphIndex.find(s);
  if (it != d_graphIndex.end()) return d_graphs[it->second];
  d_graphIndex.emplace(s, d_graphs.size());
  d_graphs.emplace_back(s, d_cfg.regions);
  return d_graphs.back();
}

const DisequalityGraph& FccSolver::graph(SortId s) const {
  return d_graphs[d_graphIndex.at(s)];
}

uint32_t FccSolver::fixedBound(SortId s) const {
  auto it = d_graphIndex.find(s);
  return it == d_graphIndex.end() ? 0 : d_graphs[it->second].bound();
}

void FccSolver::onNewClass(TermId root, SortId sort) {
  if (d_tm.sort(sort).kind != SortKind::Uninterpreted) return;
  graphRef(sort).addVertex(root, d_journal);
}

void FccSolver::onMerge(TermId kept, TermId absorbed, SortId sort) {
  if (d_tm.sort(sort).kind != SortKind::Uninterpreted) return;
  graphRef(sort).mergeVertices(kept, absorbed, d_journal);
}

void FccSolver::onDiseq(TermId rootA, TermId rootB, SortId sort,
                        const Literal& src) {
  if (d_tm.sort(sort).kind != SortKind::Uninterpreted) return;
  graphRef(sort).addEdge(rootA, rootB, src, d_journal);
}

void FccSolver::assertCardAtom(AtomId atom, bool positive) {
  if (!positive) return;  // negative bounds are read off the assignment
  const AtomInfo& info = d_atoms.info(atom);
  if (info.kind == AtomKind::CardSort) {
    graphRef(info.cardSort).setBound(info.cardBound, d_journal);
  } else if (info.kind == AtomKind::CardSig) {
    if (d_sigBound == 0 || info.cardBound < d_sigBound) {
      uint32_t old = d_sigBound;
      d_sigBound = info.cardBound;
      d_journal.push_back([this, old]() { d_sigBound = old; });
    }
  }
}

void FccSolver::rollback(size_t cp) {
  assert(cp <= d_journal.size());
  while (d_journal.size() > cp) {
    d_journal.back()();
    d_journal.pop_back();
  }
}

uint32_t FccSolver::leastOpenBound(SortId s, uint32_t lo) const {
  uint32_t j = lo;
  while (true) {
    auto a = d_atoms.findCardSortAtom(s, j);
    if (!a.has_value() || d_sat.valueAtom(*a) != LBool::False) return j;
    ++j;
  }
}

uint32_t FccSolver::leastOpenSigBound(uint32_t lo) const {
  uint32_t j = lo;
  while (true) {
    auto a = d_atoms.findCardSigAtom(j);
    if (!a.has_value() || d_sat.valueAtom(*a) != LBool::False) return j;
    ++j;
  }
}

EffortResult FccSolver::fixAtom(AtomId atom, bool isSigAtom) {
  if (!d_atoms.info(atom).inFormula) {
    AddClauseResult res =
        d_sat.addClause({mkLit(atom, true), mkLit(atom, false)}, true);
    assert(res == AddClauseResult::Added);
    (void)res;
    return EffortResult::Applied;
  }
  if (d_sat.valueAtom(atom) == LBool::Undef) {
    d_sat.decide(mkLit(atom, true));
    if (isSigAtom) ++d_stats.ladderSteps;
    return EffortResult::Applied;
  }
  assert(d_sat.valueAtom(atom) == LBool::True);
  return EffortResult::Clean;
}

EffortResult FccSolver::weakEffort() {
  if (d_cfg.ladder) {
    std::vector<SortId> sorts = d_tm.uninterpretedSorts();
    std::vector<SortId> relevant;
    for (SortId s : sorts) {
      auto it = d_graphIndex.find(s);
      if (it != d_graphIndex.end() &&
          d_graphs[it->second].liveVertexCount() > 0) {
        relevant.push_back(s);
      }
    }
    if (!relevant.empty()) {
      uint32_t n = static_cast<uint32_t>(sorts.size());
      uint32_t k = leastOpenSigBound(n);
      if (d_cfg.maxSigCard > 0 && k > d_cfg.maxSigCard) {
        return EffortResult::Resource;
      }
      EffortResult r = fixAtom(d_atoms.mkCardSigAtom(k), true);
      if (r != EffortResult::Clean) return r;
      uint32_t sum = static_cast<uint32_t>(sorts.size() - relevant.size());
      std::vector<std::pair<SortId, uint32_t>> bounds;
      for (SortId s : relevant) {
        uint32_t ki = leastOpenBound(s, 1);
        r = fixAtom(d_atoms.mkCardSortAtom(s, ki), false);
        if (r != EffortResult::Clean) return r;
        sum += ki;
        bounds.emplace_back(s, ki);
      }
      if (sum > k) {
        // card[S1,k1-1] ∨ ... ∨ card[Sn,kn-1] ∨ ¬card[Sigma,k],
        // with card[Si,0] rendered as ⊥ (omitted)
        d_conflict.clear();
        for (auto& [s, ki] : bounds) {
          if (ki >= 2) {
            d_conflict.push_back(
                mkLit(*d_atoms.findCardSortAtom(s, ki - 1), true));
          }
        }
        d_conflict.push_back(mkLit(*d_atoms.findCardSigAtom(k), false));
        return EffortResult::Conflict;
      }
    }
  }
  EffortResult r = checkCardContradictions();
  if (r != EffortResult::Clean) return r;
  return checkCliques();
}

EffortResult FccSolver::checkCardContradictions() {
  // card[S,k] together with ¬card[S,j] for j > k is unsatisfiable
  std::vector<AtomId> cards;
  for (AtomId a = 0; a < d_atoms.size(); ++a) {
    if (d_atoms.info(a).kind != AtomKind::TermEq &&
        d_sat.valueAtom(a) != LBool::Undef) {
      cards.push_back(a);
    }
  }
  for (AtomId a : cards) {
    if (d_sat.valueAtom(a) != LBool::True) continue;
    const AtomInfo& ia = d_atoms.info(a);
    for (AtomId b : cards) {
      if (d_sat.valueAtom(b) != LBool::False) continue;
      const AtomInfo& ib = d_atoms.info(b);
      if (ia.kind != ib.kind) continue;
      if (ia.kind == AtomKind::CardSort && ia.cardSort != ib.cardSort) {
        continue;
      }
      if (ib.cardBound > ia.cardBound) {
        d_conflict = {mkLit(a, false), mkLit(b, true)};
        return EffortResult::Conflict;
      }
    }
  }
  return EffortResult::Clean;
}

bool FccSolver::watchedFullyConnected(const DisequalityGraph& g,
                                      const std::vector<uint32_t>& w) const {
  for (size_t i = 0; i < w.size(); ++i) {
    for (size_t j = i + 1; j < w.size(); ++j) {
      if (!g.adjacent(w[i], w[j])) return false;
    }
  }
  return true;
}

EffortResult FccSolver::checkCliques() {
  for (auto& [sortId, gi] : d_graphIndex) {
    (void)sortId;
    DisequalityGraph& g = d_graphs[gi];
    if (g.bound() == 0) continue;
    uint32_t K = g.cliqueSize();
    const auto& regions = g.regionList();
    for (uint32_t rid = 0; rid < regions.size(); ++rid) {
      const auto& r = regions[rid];
      if (!r.alive || r.watched.size() != K) continue;
      if (!watchedFullyConnected(g, r.watched)) continue;
      EffortResult res = emitCliqueLemma(g, r.watched);
      if (res != EffortResult::Clean) return res;
    }
  }
  return EffortResult::Clean;
}

EffortResult FccSolver::emitCliqueLemma(DisequalityGraph& g,
                                        const std::vector<uint32_t>& watched) {
  std::vector<TermId> reps;
  for (uint32_t v : watched) {
    reps.push_back(d_eg.rep(g.vertices()[v].rootTerm));
  }
  std::sort(reps.begin(), reps.end());
  AtomId cardAtom = *d_atoms.findCardSortAtom(g.sort(), g.bound());

  if (d_cfg.cliqueExplainConflict) {
    // Conflict_e with the edge-source literals and the equalities that
    // place them in their classes (the cvc4+fe variant).
    std::vector<Lit> lits{mkLit(cardAtom, false)};
    auto addNegated = [&](const Literal& l) {
      Lit el = mkLit(d_atoms.mkTermAtom(l.lhs, l.rhs), !l.positive);
      if (std::find(lits.begin(), lits.end(), el) == lits.end()) {
        lits.push_back(el);
      }
    };
    for (size_t i = 0; i < watched.size(); ++i) {
      for (size_t j = i + 1; j < watched.size(); ++j) {
        const Literal& src = g.edgeSource(watched[i], watched[j]);
        addNegated(src);
        TermId ri = g.vertices()[watched[i]].rootTerm;
        TermId rj = g.vertices()[watched[j]].rootTerm;
        if (!d_eg.sameClass(src.lhs, ri)) std::swap(ri, rj);
        for (const Literal& e : d_eg.explainEq(src.lhs, ri)) addNegated(e);
        for (const Literal& e : d_eg.explainEq(src.rhs, rj)) addNegated(e);
      }
    }
    d_conflict = std::move(lits);
    ++d_stats.cliqueLemmas;
    d_lastCliqueReps = reps;
    return EffortResult::Conflict;
  }

  // Learn_e: ¬card[S,k] ∨ ¬distinct(t1,...,tk+1), with ¬distinct expanded
  // into the disjunction of pairwise equalities
  std::vector<Lit> lits{mkLit(cardAtom, false)};
  for (size_t i = 0; i < reps.size(); ++i) {
    for (size_t j = i + 1; j < reps.size(); ++j) {
      lits.push_back(mkLit(d_atoms.mkTermAtom(reps[i], reps[j]), true));
    }
  }
  if (d_sat.hasClause(lits)) return EffortResult::Clean;
  ++d_stats.cliqueLemmas;
  d_lastCliqueReps = reps;
  AddClauseResult res = d_sat.addClause(lits, true);
  if (res == AddClauseResult::Conflicting) {
    d_conflict = d_sat.pendingConflict();
    return EffortResult::Conflict;
  }
  assert(res == AddClauseResult::Added || res == AddClauseResult::Unit);
  return EffortResult::Applied;
}

EffortResult FccSolver::strongEffort() {
  for (auto& [sortId, gi] : d_graphIndex) {
    (void)sortId;
    DisequalityGraph& g = d_graphs[gi];
    if (g.bound() == 0 || g.liveVertexCount() <= g.bound()) continue;
    uint32_t K = g.cliqueSize();
    while (true) {
      // a large region's watched set with a non-adjacent pair gives the
      // splitting candidates
      std::optional<std::pair<uint32_t, uint32_t>> pick;
      bool sawLarge = false;
      const auto& regions = g.regionList();
      for (uint32_t rid = 0; rid < regions.size() && !pick; ++rid) {
        const auto& r = regions[rid];
        if (!r.alive || r.watched.size() != K) continue;
        sawLarge = true;
        for (size_t i = 0; i < r.watched.size() && !pick; ++i) {
          for (size_t j = i + 1; j < r.watched.size(); ++j) {
            if (!g.adjacent(r.watched[i], r.watched[j])) {
              pick = std::make_pair(r.watched[i], r.watched[j]);
              break;
            }
          }
        }
      }
      if (pick) {
        TermId ti = d_eg.rep(g.vertices()[pick->first].rootTerm);
        TermId tj = d_eg.rep(g.vertices()[pick->second].rootTerm);
        AtomId a = d_atoms.mkTermAtom(ti, tj);
        assert(d_sat.valueAtom(a) == LBool::Undef);
        d_atoms.info(a).phase = true;  // positive polarity first
        AddClauseResult res =
            d_sat.addClause({mkLit(a, true), mkLit(a, false)}, true);
        assert(res == AddClauseResult::Added);
        (void)res;
        ++d_stats.splitLemmas;
        return EffortResult::Applied;
      }
      if (sawLarge) {
        // all large regions' watched sets are fully connected: a clique
        // discovered by strong-effort region merging
        for (uint32_t rid = 0; rid < regions.size(); ++rid) {
          const auto& r = regions[rid];
          if (!r.alive || r.watched.size() != K) continue;
          EffortResult res = emitCliqueLemma(g, r.watched);
          if (res != EffortResult::Clean) return res;
        }
        assert(false && "connected watched set must yield a new lemma");
      }
      // only small regions: merge the densest pair and retry
      auto pair = g.densestRegionPair();
      assert(pair.has_value() && "more classes than bound implies >1 region");
      g.mergeRegions(pair->first, pair->second, d_journal);
      g.fixRegion(pair->first, d_journal);
    }
  }
  return EffortResult::ModelReady;
}

void FccSolver::audit() const {
  for (const DisequalityGraph& g : d_graphs) {
    g.audit();
    // vertex set mirrors the egraph classes
    if (g.liveVertexCount() != d_eg.numClassesOfSort(g.sort())) {
      throw KernelError("vertex set out of sync with egraph classes");
    }
  }
}

}  // namespace finimod

#include "finimod/sat_core.hpp"

#include <algorithm>
#include <cassert>

namespace finimod {

AtomId AtomTable::mkTermAtom(TermId a, TermId b) {
  if (a > b) std::swap(a, b);
  uint64_t key = (static_cast<uint64_t>(a) << 32) | b;
  auto it = d_termIndex.find(key);
  if (it != d_termIndex.end()) return it->second;
  AtomId id = static_cast<AtomId>(d_atoms.size());
  AtomInfo info;
  info.kind = AtomKind::TermEq;
  info.lhs = a;
  info.rhs = b;
  d_atoms.push_back(info);
  d_termIndex.emplace(key, id);
  return id;
}

AtomId AtomTable::mkCardSortAtom(SortId s, uint32_t bound) {
  uint64_t key = (static_cast<uint64_t>(s) << 32) | bound;
  auto it = d_cardIndex.find(key);
  if (it != d_cardIndex.end()) return it->second;
  AtomId id = static_cast<AtomId>(d_atoms.size());
  AtomInfo info;
  info.kind = AtomKind::CardSort;
  info.cardSort = s;
  info.cardBound = bound;
  d_atoms.push_back(info);
  d_cardIndex.emplace(key, id);
  return id;
}

AtomId AtomTable::mkCardSigAtom(uint32_t bound) {
  uint64_t key = (0xffffffffull << 32) | bound;
  auto it = d_cardIndex.find(key);
  if (it != d_cardIndex.end()) return it->second;
  AtomId id = static_cast<AtomId>(d_atoms.size());
  AtomInfo info;
  info.kind = AtomKind::CardSig;
  info.cardBound = bound;
  d_atoms.push_back(info);
  d_cardIndex.emplace(key, id);
  return id;
}

std::optional<AtomId> AtomTable::findTermAtom(TermId a, TermId b) const {
  if (a > b) std::swap(a, b);
  uint64_t key = (static_cast<uint64_t>(a) << 32) | b;
  auto it = d_termIndex.find(key);
  if (it == d_termIndex.end()) return std::nullopt;
  return it->second;
}

std::optional<AtomId> AtomTable::findCardSortAtom(SortId s,
                                                  uint32_t bound) const {
  uint64_t key = (static_cast<uint64_t>(s) << 32) | bound;
  auto it = d_cardIndex.find(key);
  if (it == d_cardIndex.end()) return std::nullopt;
  return it->second;
}

std::optional<AtomId> AtomTable::findCardSigAtom(uint32_t bound) const {
  uint64_t key = (0xffffffffull << 32) | bound;
  auto it = d_cardIndex.find(key);
  if (it == d_cardIndex.end()) return std::nullopt;
  return it->second;
}

Lit AtomTable::toLit(const TermManager& tm, const Literal& l) {
  for (TermId side : {l.lhs, l.rhs}) {
    FuncKind k = tm.funcKindOf(side);
    if (k == FuncKind::CardSort) {
      const FuncDecl& d = tm.func(tm.funcOf(side));
      return mkLit(mkCardSortAtom(d.cardSort, d.cardBound), l.positive);
    }
    if (k == FuncKind::CardSig) {
      const FuncDecl& d = tm.func(tm.funcOf(side));
      return mkLit(mkCardSigAtom(d.cardBound), l.positive);
    }
  }
  return mkLit(mkTermAtom(l.lhs, l.rhs), l.positive);
}

Literal AtomTable::toLiteral(Lit l) const {
  const AtomInfo& a = d_atoms[atomOf(l)];
  assert(a.kind == AtomKind::TermEq);
  return {a.lhs, a.rhs, isPos(l)};
}

std::string AtomTable::toString(const TermManager& tm, Lit l) const {
  const AtomInfo& a = d_atoms[atomOf(l)];
  std::string core;
  switch (a.kind) {
    case AtomKind::TermEq:
      return finimod::toString(tm, Literal{a.lhs, a.rhs, isPos(l)});
    case AtomKind::CardSort:
      core = "card[" + tm.sort(a.cardSort).name + "," +
             std::to_string(a.cardBound) + "]";
      break;
    case AtomKind::CardSig:
      core = "card[Sigma," + std::to_string(a.cardBound) + "]";
      break;
  }
  return isPos(l) ? core : "(not " + core + ")";
}

SatCore::SatCore(AtomTable& atoms) : d_atomTable(atoms) {}

namespace {
std::vector<uint32_t> normalizedKey(const std::vector<Lit>& lits) {
  std::vector<uint32_t> key;
  key.reserve(lits.size());
  for (Lit l : lits) key.push_back(l.x);
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  return key;
}
}  // namespace

bool SatCore::hasClause(std::vector<Lit> lits) const {
  return d_clauseIndex.count(normalizedKey(lits)) != 0;
}

LBool SatCore::value(Lit l) const {
  AtomId a = atomOf(l);
  if (a >= d_assign.size()) return LBool::Undef;
  LBool v = d_assign[a];
  if (v == LBool::Undef) return v;
  bool isTrue = (v == LBool::True) == isPos(l);
  return isTrue ? LBool::True : LBool::False;
}

void SatCore::attachWatches(int ci) {
  const std::vector<Lit>& lits = d_clauses[ci].lits;
  if (lits.size() < 2) return;
  size_t need = 2 * d_atomTable.size();
  if (d_watches.size() < need) d_watches.resize(need);
  d_watches[lits[0].x].push_back(ci);
  d_watches[lits[1].x].push_back(ci);
}

AddClauseResult SatCore::addClause(std::vector<Lit> lits, bool learned) {
  // grow per-atom state
  size_t n = d_atomTable.size();
  if (d_assign.size() < n) {
    d_assign.resize(n, LBool::Undef);
    d_levelOf.resize(n, 0);
    d_trailPos.resize(n, -1);
  }

  std::vector<Lit> dedup;
  for (Lit l : lits) {
    if (std::find(dedup.begin(), dedup.end(), l) == dedup.end()) {
      dedup.push_back(l);
    }
  }
  lits = std::move(dedup);
  assert(!lits.empty());

  if (hasClause(lits)) return AddClauseResult::Duplicate;

  bool taut = false;
  for (Lit l : lits) {
    if (std::find(lits.begin(), lits.end(), neg(l)) != lits.end()) {
      taut = true;
      break;
    }
  }

  // watch order: true literals, then unassigned, then false by level
  std::stable_sort(lits.begin(), lits.end(), [&](Lit a, Lit b) {
    auto rank = [&](Lit l) -> uint64_t {
      switch (value(l)) {
        case LBool::True:
          return 0;
        case LBool::Undef:
          return 1;
        case LBool::False:
          return 0x100000000ull - levelOf(atomOf(l));
      }
      return 0;
    };
    return rank(a) < rank(b);
  });

  int ci = static_cast<int>(d_clauses.size());
  d_clauseIndex.emplace(normalizedKey(lits), ci);
  d_clauses.push_back({lits, learned});
  for (Lit l : lits) d_atomTable.info(atomOf(l)).inFormula = true;
  attachWatches(ci);
  if (d_onClause) d_onClause(lits);

  if (taut) return AddClauseResult::Added;
  if (value(lits[0]) == LBool::True) return AddClauseResult::Added;
  if (value(lits[0]) == LBool::False) {
    d_addConflict = lits;
    return AddClauseResult::Conflicting;
  }
  if (lits.size() == 1 || value(lits[1]) == LBool::False) {
    // exactly one non-false literal; the caller should enqueue it
    assert(lits.size() > 1 || level() == 0);
    d_addConflict.clear();
    enqueue(lits[0], ci);
    return AddClauseResult::Unit;
  }
  return AddClauseResult::Added;
}

void SatCore::pushAssign(Lit l, Reason r) {
  AtomId a = atomOf(l);
  assert(a < d_assign.size() && d_assign[a] == LBool::Undef);
  d_assign[a] = isPos(l) ? LBool::True : LBool::False;
  d_levelOf[a] = level();
  d_trailPos[a] = static_cast<int>(d_trail.size());
  d_trail.push_back(l);
  d_reasons.push_back(r);
}

void SatCore::decide(Lit l) {
  assert(value(l) == LBool::Undef && "decide on assigned atom");
  d_levelStarts.push_back(d_trail.size());
  ++d_decisions;
  pushAssign(l, Reason{Reason::Decision, -1, -1});
}

void SatCore::enqueue(Lit l, int reasonClause) {
  pushAssign(l, Reason{Reason::FromClause, reasonClause, -1});
  ++d_propagations;
}

void SatCore::enqueueTheory(Lit l, std::function<std::vector<Lit>()> explain) {
  d_thunks.push_back(std::move(explain));
  pushAssign(l, Reason{Reason::Theory, -1,
                       static_cast<int>(d_thunks.size()) - 1});
  ++d_propagations;
}

std::optional<std::vector<Lit>> SatCore::propagateUnits() {
  size_t need = 2 * d_atomTable.size();
  if (d_watches.size() < need) d_watches.resize(need);
  while (d_qhead < d_trail.size()) {
    Lit p = d_trail[d_qhead++];
    // clauses watching ¬p may have lost a watch
    std::vector<int>& ws = d_watches[neg(p).x];
    size_t keep = 0;
    for (size_t wi = 0; wi < ws.size(); ++wi) {
      int ci = ws[wi];
      std::vector<Lit>& lits = d_clauses[ci].lits;
      // ensure the falsified watch sits at position 1
      if (lits[0] == neg(p)) std::swap(lits[0], lits[1]);
      assert(lits[1] == neg(p));
      if (value(lits[0]) == LBool::True) {
        ws[keep++] = ci;
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != LBool::False) {
          std::swap(lits[1], lits[k]);
          d_watches[lits[1].x].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      // clause is unit or falsified
      ws[keep++] = ci;
      if (value(lits[0]) == LBool::False) {
        for (size_t rest = wi + 1; rest < ws.size(); ++rest) {
          ws[keep++] = ws[rest];
        }
        ws.resize(keep);
        return d_clauses[ci].lits;
      }
      enqueue(lits[0], ci);
    }
    ws.resize(keep);
  }
  return std::nullopt;
}

std::vector<Lit> SatCore::reasonLits(size_t trailIdx) {
  const Reason& r = d_reasons[trailIdx];
  switch (r.kind) {
    case Reason::Decision:
      assert(false && "decision has no reason");
      return {};
    case Reason::FromClause:
      return d_clauses[r.clauseIdx].lits;
    case Reason::Theory:
      return d_thunks[r.thunkIdx]();
  }
  return {};
}

bool SatCore::analyzeAndBackjump(std::vector<Lit> conflict) {
  ++d_conflicts;
  assert(!conflict.empty());
  uint32_t maxL = 0;
  for (Lit l : conflict) {
    assert(value(l) == LBool::False && "conflict clause must be falsified");
    maxL = std::max(maxL, levelOf(atomOf(l)));
  }
  if (maxL == 0) return false;  // Fail: no decision point involved
  if (maxL < level()) backjumpTo(maxL);

  std::vector<bool> seen(d_atomTable.size(), false);
  std::vector<Lit> tail;
  int counter = 0;
  size_t index = d_trail.size();
  std::vector<Lit> cur = std::move(conflict);
  Lit uip{};
  while (true) {
    for (Lit l : cur) {
      AtomId a = atomOf(l);
      if (seen[a] || levelOf(a) == 0) continue;
      seen[a] = true;
      if (levelOf(a) == maxL) {
        ++counter;
      } else {
        tail.push_back(l);
      }
    }
    assert(counter > 0);
    do {
      --index;
    } while (!seen[atomOf(d_trail[index])]);
    Lit p = d_trail[index];
    seen[atomOf(p)] = false;
    --counter;
    if (counter == 0) {
      uip = p;
      break;
    }
    cur = reasonLits(index);
    cur.erase(std::remove(cur.begin(), cur.end(), p), cur.end());
  }

  std::vector<Lit> learned;
  learned.push_back(neg(uip));
  uint32_t backLvl = 0;
  for (Lit l : tail) {
    learned.push_back(l);
    backLvl = std::max(backLvl, levelOf(atomOf(l)));
  }
  backjumpTo(backLvl);
  AddClauseResult res = addClause(learned, true);
  if (res == AddClauseResult::Duplicate) {
    // re-derived an existing clause; assert its implied literal directly
    auto it = d_clauseIndex.find(normalizedKey(learned));
    assert(it != d_clauseIndex.end());
    if (value(neg(uip)) == LBool::Undef) enqueue(neg(uip), it->second);
  } else {
    assert(res == AddClauseResult::Unit);
  }
  return true;
}

void SatCore::backjumpTo(uint32_t lvl) {
  if (lvl >= level()) return;
  size_t target = d_levelStarts[lvl];
  while (d_trail.size() > target) {
    AtomId a = atomOf(d_trail.back());
    d_assign[a] = LBool::Undef;
    d_levelOf[a] = 0;
    d_trailPos[a] = -1;
    d_trail.pop_back();
    d_reasons.pop_back();
  }
  d_levelStarts.resize(lvl);
  d_qhead = d_trail.size();
  if (d_onBackjump) d_onBackjump(lvl);
}

std::optional<Lit> SatCore::pickBranchLit() const {
  for (AtomId a = 0; a < d_atomTable.size(); ++a) {
    if (!d_atomTable.info(a).inFormula) continue;
    if (a < d_assign.size() && d_assign[a] != LBool::Undef) continue;
    return mkLit(a, d_atomTable.info(a).phase);
  }
  return std::nullopt;
}

bool SatCore::isDecision(size_t trailIdx) const {
  return std::find(d_levelStarts.begin(), d_levelStarts.end(), trailIdx) !=
         d_levelStarts.end();
}

void SatCore::checkTrailInvariants() const {
  std::vector<int> seen(d_atomTable.size(), 0);
  size_t decisions = 0;
  for (size_t i = 0; i < d_trail.size(); ++i) {
    Lit l = d_trail[i];
    AtomId a = atomOf(l);
    if (seen[a]++) throw KernelError("trail repeats an atom");
    if (value(l) != LBool::True) throw KernelError("trail literal not true");
    while (decisions < d_levelStarts.size() && d_levelStarts[decisions] <= i) {
      ++decisions;
    }
    if (d_levelOf[a] != decisions) throw KernelError("trail level mismatch");
    if (d_reasons[i].kind == Reason::FromClause) {
      const std::vector<Lit>& c = d_clauses[d_reasons[i].clauseIdx].lits;
      bool found = false;
      for (Lit cl : c) {
        if (cl == l) {
          found = true;
          continue;
        }
        if (value(cl) != LBool::False ||
            d_trailPos[atomOf(cl)] >= static_cast<int>(i)) {
          throw KernelError("propagation reason not falsified before literal");
        }
      }
      if (!found) throw KernelError("propagated literal missing from reason");
    }
  }
}

}  // namespace finimod

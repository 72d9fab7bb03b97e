#include "finimod/euf_cc.hpp"

#include <algorithm>
#include <cassert>

namespace finimod {

EGraph::EGraph(TermManager& tm) : d_tm(tm) {
  registerTerm(tm.trueTerm());
  registerTerm(tm.falseTerm());
  // built-in true ≉ false, not traceable to any input literal
  Just builtin;
  builtin.kind = Just::Builtin;
  Node t = nodeOf(tm.trueTerm());
  Node f = nodeOf(tm.falseTerm());
  d_nodes[t].diseqs.push_back({tm.trueTerm(), tm.falseTerm(), builtin});
  d_nodes[f].diseqs.push_back({tm.trueTerm(), tm.falseTerm(), builtin});
}

EGraph::Node EGraph::nodeOf(TermId t) const {
  auto it = d_nodeOf.find(t);
  assert(it != d_nodeOf.end() && "term not registered");
  return it->second;
}

EGraph::Node EGraph::find(Node n) const {
  // No path compression: parents are journaled and must restore exactly.
  while (d_nodes[n].parent != n) n = d_nodes[n].parent;
  return n;
}

std::string EGraph::sigKeyOf(Node app) const {
  const NodeData& nd = d_nodes[app];
  std::string key = std::to_string(d_tm.funcOf(nd.term));
  for (TermId c : d_tm.children(nd.term)) {
    key += "," + std::to_string(find(nodeOf(c)));
  }
  return key;
}

void EGraph::registerTerm(TermId t) {
  if (isRegistered(t)) return;
  assert(d_undo.empty() && "terms may only be registered at the base level");
  assert(!d_tm.isVar(t) && !d_tm.isForall(t));
  for (TermId c : d_tm.children(t)) registerTerm(c);

  Node n = static_cast<Node>(d_nodes.size());
  NodeData nd;
  nd.term = t;
  nd.parent = n;
  nd.size = 1;
  nd.repTerm = t;
  nd.members = {n};
  d_nodes.push_back(std::move(nd));
  d_nodeOf.emplace(t, n);
  d_termOrder.push_back(t);
  if (d_notify) d_notify->onNewClass(t, d_tm.sortOf(t));

  if (d_tm.isApp(t) && !d_tm.children(t).empty()) {
    for (TermId c : d_tm.children(t)) {
      Node rc = find(nodeOf(c));
      d_nodes[rc].uses.push_back(n);
    }
    std::string key = sigKeyOf(n);
    auto it = d_sigTable.find(key);
    if (it != d_sigTable.end()) {
      Just j;
      j.kind = Just::Cong;
      j.appA = t;
      j.appB = d_nodes[it->second].term;
      d_pending.push_back({t, j.appB, j});
      auto conf = processPending();
      assert(!conf.has_value() && "registration cannot conflict");
    } else {
      d_sigTable.emplace(std::move(key), n);
    }
  }
}

std::optional<EGraph::Conflict> EGraph::assertLit(const Literal& l) {
  assert(isRegistered(l.lhs) && isRegistered(l.rhs));
  if (l.positive) {
    Just j;
    j.kind = Just::Input;
    j.lit = l;
    d_pending.push_back({l.lhs, l.rhs, j});
    return processPending();
  }
  // disequality
  Node ra = find(nodeOf(l.lhs));
  Node rb = find(nodeOf(l.rhs));
  if (ra == rb) {
    Conflict c{l};
    explainPair(l.lhs, l.rhs, c);
    return c;
  }
  Just j;
  j.kind = Just::Input;
  j.lit = l;
  d_nodes[ra].diseqs.push_back({l.lhs, l.rhs, j});
  d_undo.push_back({UndoOp::DiseqPush, kNone, kNone, 0, 0, 0, kNone, kNone,
                    kNone, {}, "", ra});
  d_nodes[rb].diseqs.push_back({l.lhs, l.rhs, j});
  d_undo.push_back({UndoOp::DiseqPush, kNone, kNone, 0, 0, 0, kNone, kNone,
                    kNone, {}, "", rb});
  if (d_notify) {
    d_notify->onDiseq(d_nodes[ra].term, d_nodes[rb].term,
                      d_tm.sortOf(l.lhs), l);
  }
  return std::nullopt;
}

void EGraph::reverseProofPath(Node n) {
  // Make n the root of its proof tree by flipping edges along its path.
  std::vector<Node> path;
  Node cur = n;
  while (cur != kNone) {
    path.push_back(cur);
    cur = d_nodes[cur].proofParent;
  }
  for (size_t i = path.size(); i-- > 1;) {
    Node child = path[i - 1];
    Node parent = path[i];
    setProofEdge(parent, child, d_nodes[child].proofJust);
  }
  setProofEdge(n, kNone, Just{});
}

void EGraph::setProofEdge(Node n, Node parent, const Just& j) {
  UndoOp op;
  op.kind = UndoOp::ProofEdge;
  op.node = n;
  op.oldProofParent = d_nodes[n].proofParent;
  op.oldProofJust = d_nodes[n].proofJust;
  d_undo.push_back(std::move(op));
  d_nodes[n].proofParent = parent;
  d_nodes[n].proofJust = j;
}

std::optional<EGraph::Conflict> EGraph::processPending() {
  while (!d_pending.empty()) {
    Pending p = d_pending.back();
    d_pending.pop_back();
    Node na = nodeOf(p.a);
    Node nb = nodeOf(p.b);
    Node ra = find(na);
    Node rb = find(nb);
    if (ra == rb) continue;
    // keep the larger class as root; ties keep the lower node index
    if (d_nodes[ra].size < d_nodes[rb].size ||
        (d_nodes[ra].size == d_nodes[rb].size && ra > rb)) {
      std::swap(ra, rb);
      std::swap(na, nb);
      std::swap(p.a, p.b);
    }

    // proof forest edge a -> b
    reverseProofPath(na);
    setProofEdge(na, nb, p.just);

    UndoOp op;
    op.kind = UndoOp::Union;
    op.absorbed = rb;
    op.kept = ra;
    op.oldMembersLen = static_cast<uint32_t>(d_nodes[ra].members.size());
    op.oldUsesLen = static_cast<uint32_t>(d_nodes[ra].uses.size());
    op.oldDiseqLen = static_cast<uint32_t>(d_nodes[ra].diseqs.size());
    op.oldRepTerm = d_nodes[ra].repTerm;
    d_undo.push_back(std::move(op));

    d_nodes[rb].parent = ra;
    d_nodes[ra].size += d_nodes[rb].size;
    d_nodes[ra].members.insert(d_nodes[ra].members.end(),
                               d_nodes[rb].members.begin(),
                               d_nodes[rb].members.end());
    if (d_nodes[rb].repTerm < d_nodes[ra].repTerm) {
      d_nodes[ra].repTerm = d_nodes[rb].repTerm;
    }

    if (d_notify) {
      d_notify->onMerge(d_nodes[ra].term, d_nodes[rb].term,
                        d_tm.sortOf(d_nodes[ra].term));
    }

    // inherited disequalities; detect self-disequal class
    const size_t nDiseq = d_nodes[rb].diseqs.size();
    for (size_t i = 0; i < nDiseq; ++i) {
      DiseqEntry e = d_nodes[rb].diseqs[i];
      if (find(nodeOf(e.ta)) == find(nodeOf(e.tb))) {
        d_pending.clear();
        return explainConflict(e);
      }
      d_nodes[ra].diseqs.push_back(e);
    }

    // congruence: re-hash applications that used the absorbed class
    const size_t nUses = d_nodes[rb].uses.size();
    for (size_t i = 0; i < nUses; ++i) {
      Node u = d_nodes[rb].uses[i];
      std::string key = sigKeyOf(u);
      auto it = d_sigTable.find(key);
      if (it != d_sigTable.end()) {
        if (find(it->second) != find(u)) {
          Just j;
          j.kind = Just::Cong;
          j.appA = d_nodes[u].term;
          j.appB = d_nodes[it->second].term;
          d_pending.push_back({j.appA, j.appB, j});
        }
      } else {
        UndoOp sop;
        sop.kind = UndoOp::SigInsert;
        sop.sigKey = key;
        d_undo.push_back(std::move(sop));
        d_sigTable.emplace(std::move(key), u);
      }
    }
    d_nodes[ra].uses.insert(d_nodes[ra].uses.end(), d_nodes[rb].uses.begin(),
                            d_nodes[rb].uses.end());
  }
  return std::nullopt;
}

EGraph::Conflict EGraph::explainConflict(const DiseqEntry& e) {
  Conflict c;
  if (e.src.kind == Just::Input) c.push_back(e.src.lit);
  explainPair(e.ta, e.tb, c);
  return c;
}

void EGraph::explainPair(TermId a, TermId b, std::vector<Literal>& out) {
  std::vector<std::pair<TermId, TermId>> queue{{a, b}};
  std::vector<std::pair<TermId, TermId>> seen;
  while (!queue.empty()) {
    auto [s, t] = queue.back();
    queue.pop_back();
    if (s == t) continue;
    auto pr = s < t ? std::make_pair(s, t) : std::make_pair(t, s);
    if (std::find(seen.begin(), seen.end(), pr) != seen.end()) continue;
    seen.push_back(pr);

    Node ns = nodeOf(s);
    Node nt = nodeOf(t);
    assert(find(ns) == find(nt) && "explainEq precondition");
    // lowest common ancestor in the proof forest
    std::vector<Node> pathS;
    for (Node c = ns; c != kNone; c = d_nodes[c].proofParent) {
      pathS.push_back(c);
    }
    Node lca = kNone;
    std::vector<Node> pathT;
    for (Node c = nt; c != kNone; c = d_nodes[c].proofParent) {
      if (std::find(pathS.begin(), pathS.end(), c) != pathS.end()) {
        lca = c;
        break;
      }
      pathT.push_back(c);
    }
    assert(lca != kNone && "terms in one class share a proof root");
    auto emitEdge = [&](Node child) {
      const Just& j = d_nodes[child].proofJust;
      if (j.kind == Just::Input) {
        if (std::find(out.begin(), out.end(), j.lit) == out.end()) {
          out.push_back(j.lit);
        }
      } else if (j.kind == Just::Cong) {
        auto ca = d_tm.children(j.appA);
        auto cb = d_tm.children(j.appB);
        for (size_t i = 0; i < ca.size(); ++i) {
          queue.emplace_back(ca[i], cb[i]);
        }
      }
    };
    for (Node c : pathS) {
      if (c == lca) break;
      emitEdge(c);
    }
    for (Node c : pathT) emitEdge(c);
  }
}

std::vector<Literal> EGraph::explainEq(TermId s, TermId t) {
  std::vector<Literal> out;
  explainPair(s, t, out);
  return out;
}

TermId EGraph::rep(TermId t) const {
  if (!isRegistered(t)) {
    throw KernelError("rep() on unregistered term " + d_tm.toString(t));
  }
  return d_nodes[find(nodeOf(t))].repTerm;
}

TermId EGraph::rootTerm(TermId t) const {
  return d_nodes[find(nodeOf(t))].term;
}

bool EGraph::sameClass(TermId a, TermId b) const {
  return find(nodeOf(a)) == find(nodeOf(b));
}

bool EGraph::areDisequal(TermId s, TermId t) const {
  Node rs = find(nodeOf(s));
  Node rt = find(nodeOf(t));
  if (rs == rt) return false;
  const std::vector<DiseqEntry>& ds = d_nodes[rs].diseqs;
  for (const DiseqEntry& e : ds) {
    Node ea = find(nodeOf(e.ta));
    Node eb = find(nodeOf(e.tb));
    if ((ea == rs && eb == rt) || (ea == rt && eb == rs)) return true;
  }
  return false;
}

std::vector<TermId> EGraph::classesOfSort(SortId s) const {
  std::vector<TermId> out;
  for (Node n = 0; n < d_nodes.size(); ++n) {
    if (d_nodes[n].parent == n && d_tm.sortOf(d_nodes[n].term) == s) {
      out.push_back(d_nodes[n].repTerm);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

size_t EGraph::numClassesOfSort(SortId s) const {
  size_t k = 0;
  for (Node n = 0; n < d_nodes.size(); ++n) {
    if (d_nodes[n].parent == n && d_tm.sortOf(d_nodes[n].term) == s) ++k;
  }
  return k;
}

std::vector<TermId> EGraph::classMembers(TermId t) const {
  Node r = find(nodeOf(t));
  std::vector<TermId> out;
  out.reserve(d_nodes[r].members.size());
  for (Node m : d_nodes[r].members) out.push_back(d_nodes[m].term);
  std::sort(out.begin(), out.end());
  return out;
}

void EGraph::rollback(size_t cp) {
  assert(cp <= d_undo.size());
  d_pending.clear();
  while (d_undo.size() > cp) {
    UndoOp op = std::move(d_undo.back());
    d_undo.pop_back();
    switch (op.kind) {
      case UndoOp::Union: {
        NodeData& kept = d_nodes[op.kept];
        NodeData& abs = d_nodes[op.absorbed];
        abs.parent = op.absorbed;
        kept.size -= abs.size;
        kept.members.resize(op.oldMembersLen);
        kept.uses.resize(op.oldUsesLen);
        kept.diseqs.resize(op.oldDiseqLen);
        kept.repTerm = op.oldRepTerm;
        break;
      }
      case UndoOp::ProofEdge:
        d_nodes[op.node].proofParent = op.oldProofParent;
        d_nodes[op.node].proofJust = op.oldProofJust;
        break;
      case UndoOp::SigInsert:
        d_sigTable.erase(op.sigKey);
        break;
      case UndoOp::DiseqPush:
        d_nodes[op.diseqRoot].diseqs.pop_back();
        break;
    }
  }
}

uint64_t EGraph::fingerprint() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (Node n = 0; n < d_nodes.size(); ++n) {
    mix(find(n));
    mix(d_nodes[find(n)].repTerm);
    mix(d_nodes[n].diseqs.size());
  }
  mix(d_sigTable.size());
  return h;
}

}  // namespace finimod

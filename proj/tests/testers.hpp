/*
 * Shared helpers for the test suites: a tiny deterministic RNG wrapper
 * and random generators for terms, literal sets and small problems.
 */

#ifndef FINIMOD_TESTS_TESTERS_HPP
#define FINIMOD_TESTS_TESTERS_HPP

#include <random>
#include <vector>

#include "finimod/kernel.hpp"

namespace finimod::test {

class Rng {
 public:
  explicit Rng(uint64_t seed) : d_gen(seed) {}

  // in [0, n)
  uint32_t next(uint32_t n) {
    return static_cast<uint32_t>(d_gen() % n);
  }
  bool flip() { return next(2) == 0; }
  // in [lo, hi]
  uint32_t range(uint32_t lo, uint32_t hi) { return lo + next(hi - lo + 1); }

 private:
  std::mt19937_64 d_gen;
};

/** A small random signature: one or two sorts, constants and functions. */
struct RandomSig {
  std::vector<SortId> sorts;
  std::vector<FuncId> consts;  // nullary, uninterpreted sorts
  std::vector<FuncId> funcs;   // arity 1..2
};

inline RandomSig randomSig(TermManager& tm, Rng& rng, uint32_t numSorts,
                           uint32_t numConsts, uint32_t numFuncs) {
  RandomSig sig;
  for (uint32_t i = 0; i < numSorts; ++i) {
    sig.sorts.push_back(tm.mkSort("S" + std::to_string(i)));
  }
  for (uint32_t i = 0; i < numConsts; ++i) {
    SortId s = sig.sorts[rng.next(numSorts)];
    sig.consts.push_back(tm.mkFunc("c" + std::to_string(i), {}, s));
  }
  for (uint32_t i = 0; i < numFuncs; ++i) {
    uint32_t arity = rng.range(1, 2);
    std::vector<SortId> args;
    for (uint32_t j = 0; j < arity; ++j) {
      args.push_back(sig.sorts[rng.next(numSorts)]);
    }
    SortId ret = sig.sorts[rng.next(numSorts)];
    sig.funcs.push_back(
        tm.mkFunc("f" + std::to_string(i), std::move(args), ret));
  }
  return sig;
}

/** Random ground term of the given sort, depth-bounded. */
inline TermId randomGroundTerm(TermManager& tm, Rng& rng, const RandomSig& sig,
                               SortId sort, uint32_t depth) {
  if (depth > 0 && rng.next(3) == 0) {
    // try a function application with matching return sort
    std::vector<FuncId> cands;
    for (FuncId f : sig.funcs) {
      if (tm.func(f).retSort == sort) cands.push_back(f);
    }
    if (!cands.empty()) {
      FuncId f = cands[rng.next(static_cast<uint32_t>(cands.size()))];
      std::vector<TermId> args;
      for (SortId as : tm.func(f).argSorts) {
        args.push_back(randomGroundTerm(tm, rng, sig, as, depth - 1));
      }
      return tm.mkApp(f, args);
    }
  }
  std::vector<FuncId> cands;
  for (FuncId c : sig.consts) {
    if (tm.func(c).retSort == sort) cands.push_back(c);
  }
  if (cands.empty()) {
    // always have at least one constant to fall back on
    return tm.mkConst(tm.mkFunc("d" + std::to_string(tm.numFuncs()), {}, sort));
  }
  return tm.mkConst(cands[rng.next(static_cast<uint32_t>(cands.size()))]);
}

}  // namespace finimod::test

#endif

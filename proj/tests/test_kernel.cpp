#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "finimod/kernel.hpp"
#include "testers.hpp"

using namespace finimod;

TEST_CASE("hash consing returns identical term objects") {
  TermManager tm;
  SortId s = tm.mkSort("S");
  FuncId b = tm.mkFunc("b", {}, s);
  FuncId f = tm.mkFunc("f", {s}, s);
  TermId t1 = tm.mkApp(f, {tm.mkConst(b)});
  TermId t2 = tm.mkApp(f, {tm.mkConst(b)});
  CHECK(t1 == t2);
}

TEST_CASE("predicate applications are Boolean terms") {
  TermManager tm;
  SortId s = tm.mkSort("S");
  FuncId p = tm.mkFunc("P", {s, s}, tm.boolSort());
  TermId t1 = tm.mkConst(tm.mkFunc("t1", {}, s));
  TermId t2 = tm.mkConst(tm.mkFunc("t2", {}, s));
  TermId app = tm.mkApp(p, {t1, t2});
  CHECK(tm.sortOf(app) == tm.boolSort());
  // usable as the atom P(t1,t2) ≈ true
  Literal l = mkBoolLiteral(tm, app, true);
  CHECK(l.positive);
  CHECK((l.lhs == tm.trueTerm() || l.rhs == tm.trueTerm()));
}

TEST_CASE("sort mismatch is reported with the offending position") {
  TermManager tm;
  SortId sa = tm.mkSort("A");
  SortId sb = tm.mkSort("B");
  FuncId f = tm.mkFunc("f", {sb}, sb);
  TermId x = tm.mkVar("x", sa);
  CHECK_THROWS_WITH_AS(tm.mkApp(f, {x}),
                       doctest::Contains("argument 1"), KernelError);
}

TEST_CASE("applySubst") {
  TermManager tm;
  SortId s = tm.mkSort("S");
  FuncId f = tm.mkFunc("f", {s}, s);
  FuncId g = tm.mkFunc("g", {s, s}, s);
  TermId a = tm.mkConst(tm.mkFunc("a", {}, s));
  TermId b = tm.mkConst(tm.mkFunc("b", {}, s));
  TermId c = tm.mkConst(tm.mkFunc("c", {}, s));
  TermId x = tm.mkVar("x", s);
  TermId x1 = tm.mkVar("x1", s);
  TermId x2 = tm.mkVar("x2", s);

  SUBCASE("single variable") {
    Substitution sig;
    sig.bind(x, a);
    CHECK(tm.applySubst(tm.mkApp(f, {x}), sig) == tm.mkApp(f, {a}));
  }
  SUBCASE("simultaneous replacement") {
    Substitution sig;
    sig.bind(x1, a);
    sig.bind(x2, a);
    CHECK(tm.applySubst(tm.mkApp(g, {x2, b}), sig) == tm.mkApp(g, {a, b}));
  }
  SUBCASE("identity on ground terms") {
    Substitution sig;
    sig.bind(x, a);
    CHECK(tm.applySubst(c, sig) == c);
  }
  SUBCASE("bound variables shadow") {
    Substitution sig;
    sig.bind(x, a);
    TermId q = tm.mkForall({x}, tm.mkEq(tm.mkApp(f, {x}), x));
    CHECK(tm.applySubst(q, sig) == q);
  }
}

TEST_CASE("mgu") {
  TermManager tm;
  SortId s = tm.mkSort("S");
  FuncId f2 = tm.mkFunc("f", {s, s}, s);
  TermId c1 = tm.mkConst(tm.mkFunc("c1", {}, s));
  TermId c2 = tm.mkConst(tm.mkFunc("c2", {}, s));
  TermId y1 = tm.mkVar("y1", s);
  TermId y2 = tm.mkVar("y2", s);

  SUBCASE("defining-map pattern pair") {
    auto sig = mgu(tm, tm.mkApp(f2, {c1, y2}), tm.mkApp(f2, {y1, c2}));
    REQUIRE(sig.has_value());
    CHECK(sig->size() == 2);
    CHECK(sig->lookup(y1) == c1);
    CHECK(sig->lookup(y2) == c2);
  }
  SUBCASE("identical terms have the empty mgu") {
    auto sig = mgu(tm, tm.mkApp(f2, {y1, y2}), tm.mkApp(f2, {y1, y2}));
    REQUIRE(sig.has_value());
    CHECK(sig->empty());
  }
  SUBCASE("clash") {
    TermId y = tm.mkVar("y", s);
    auto sig = mgu(tm, tm.mkApp(f2, {c1, y}), tm.mkApp(f2, {c2, y}));
    CHECK(!sig.has_value());
  }
  SUBCASE("occurs check") {
    FuncId f1 = tm.mkFunc("g", {s}, s);
    auto sig = mgu(tm, y1, tm.mkApp(f1, {y1}));
    CHECK(!sig.has_value());
  }
  SUBCASE("variable chain") {
    // f(y1, y1) vs f(y2, c1): y1 and y2 both end at c1
    auto sig = mgu(tm, tm.mkApp(f2, {y1, y1}), tm.mkApp(f2, {y2, c1}));
    REQUIRE(sig.has_value());
    CHECK(tm.applySubst(tm.mkApp(f2, {y1, y1}), *sig) ==
          tm.applySubst(tm.mkApp(f2, {y2, c1}), *sig));
  }
}

TEST_CASE("random terms: identity iff structural equality, mgu idempotence") {
  test::Rng rng(20240817);
  for (int round = 0; round < 50; ++round) {
    TermManager tm;
    test::RandomSig sig = test::randomSig(tm, rng, rng.range(1, 2), 3, 2);
    SortId s = sig.sorts[0];
    std::vector<TermId> pool;
    for (int i = 0; i < 10; ++i) {
      pool.push_back(test::randomGroundTerm(tm, rng, sig, s, 3));
    }
    // re-building an equal term yields the same id
    for (TermId t : pool) {
      if (tm.isApp(t) && !tm.children(t).empty()) {
        std::vector<TermId> cs(tm.children(t).begin(), tm.children(t).end());
        CHECK(tm.mkApp(tm.funcOf(t), cs) == t);
      }
    }
    // mgu idempotence on pattern-like terms
    TermId y1 = tm.mkVar("y1", s);
    TermId y2 = tm.mkVar("y2", s);
    std::vector<FuncId> binary;
    for (FuncId f : sig.funcs) {
      const FuncDecl& d = tm.func(f);
      if (d.arity() == 2 && d.argSorts[0] == s && d.argSorts[1] == s &&
          d.retSort == s) {
        binary.push_back(f);
      }
    }
    if (binary.empty()) continue;
    FuncId f = binary[0];
    TermId t1 = tm.mkApp(f, {rng.flip() ? y1 : pool[rng.next(10)],
                             rng.flip() ? y2 : pool[rng.next(10)]});
    TermId t2 = tm.mkApp(f, {rng.flip() ? y1 : pool[rng.next(10)],
                             rng.flip() ? y2 : pool[rng.next(10)]});
    auto u = mgu(tm, t1, t2);
    if (u.has_value()) {
      TermId t1s = tm.applySubst(t1, *u);
      CHECK(tm.applySubst(t1s, *u) == t1s);
      CHECK(t1s == tm.applySubst(t2, *u));
      // domain only from t1, t2
      auto fv1 = tm.freeVars(t1);
      auto fv2 = tm.freeVars(t2);
      for (auto& [v, _] : u->map()) {
        bool in1 = std::find(fv1.begin(), fv1.end(), v) != fv1.end();
        bool in2 = std::find(fv2.begin(), fv2.end(), v) != fv2.end();
        CHECK((in1 || in2));
      }
    }
  }
}

TEST_CASE("literal canonical orientation shares the atom") {
  TermManager tm;
  SortId s = tm.mkSort("S");
  TermId a = tm.mkConst(tm.mkFunc("a", {}, s));
  TermId b = tm.mkConst(tm.mkFunc("b", {}, s));
  Literal l1 = mkLiteral(tm, a, b, true);
  Literal l2 = mkLiteral(tm, b, a, false);
  CHECK(l1.lhs == l2.lhs);
  CHECK(l1.rhs == l2.rhs);
  CHECK(l1 == l2.negate());
}

TEST_CASE("clauses are duplicate free") {
  TermManager tm;
  SortId s = tm.mkSort("S");
  TermId a = tm.mkConst(tm.mkFunc("a", {}, s));
  TermId b = tm.mkConst(tm.mkFunc("b", {}, s));
  Literal l = mkLiteral(tm, a, b, true);
  Clause c = mkClause({l, l, l.negate()});
  CHECK(c.lits.size() == 2);
}

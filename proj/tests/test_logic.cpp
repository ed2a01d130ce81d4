#include "doctest.h"

#include <random>

#include "qk/logic.hpp"

using namespace qk;

namespace {

FElem set_of(std::initializer_list<std::size_t> xs) {
  std::vector<FElem> m;
  for (auto x : xs) m.push_back(FElem::atom(x));
  return FElem::set(m);
}

Coalgebra lts(std::vector<FElem> alpha) {
  Coalgebra c;
  c.functor = Functor::powerset();
  c.states = discrete(Quantale::bool2(), numbered_carrier(alpha.size(), "s"));
  c.alpha = std::move(alpha);
  return c;
}

Coalgebra random_lts(std::size_t n, std::mt19937_64& rng) {
  std::vector<FElem> alpha;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<FElem> succ;
    for (std::size_t y = 0; y < n; ++y)
      if (rng() % 3 == 0) succ.push_back(FElem::atom(y));
    alpha.push_back(FElem::set(succ));
  }
  return lts(alpha);
}

Rational quarter(std::uint64_t p) {
  Rational r(static_cast<long>(p), 4);
  r.canonicalize();
  return r;
}

Coalgebra random_markov(std::size_t n, std::mt19937_64& rng) {
  Coalgebra c;
  c.functor = Functor::distribution();
  c.states = discrete(Quantale::luk01(), numbered_carrier(n, "s"));
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<int> units(n, 0);
    for (int i = 0; i < 4; ++i) ++units[rng() % n];
    std::vector<FElem> s;
    std::vector<Rational> w;
    for (std::size_t y = 0; y < n; ++y)
      if (units[y]) {
        s.push_back(FElem::atom(y));
        w.push_back(quarter(units[y]));
      }
    c.alpha.push_back(FElem::dist(s, w));
  }
  return c;
}

Formula random_formula(std::mt19937_64& rng, const Quantale& q, int depth) {
  auto grid = default_grid(q);
  switch (depth <= 0 ? 0 : rng() % 6) {
    case 0: return f_top();
    case 1: return f_or(random_formula(rng, q, depth - 1), random_formula(rng, q, depth - 1));
    case 2: return f_and(random_formula(rng, q, depth - 1), random_formula(rng, q, depth - 1));
    case 3: return f_tensor(grid[rng() % grid.size()], random_formula(rng, q, depth - 1));
    case 4: return f_hom(grid[rng() % grid.size()], random_formula(rng, q, depth - 1));
    default: return f_modal("E", {random_formula(rng, q, depth - 1)});
  }
}

}  // namespace

TEST_CASE("parser examples") {
  auto l = Quantale::luk01();
  CHECK(parse_formula("T", l)->kind == FormulaKind::Top);
  auto d = parse_formula(" dia( T ) ", Quantale::bool2());
  CHECK(d->kind == FormulaKind::Modal);
  CHECK(d->name == "dia");
  REQUIRE(d->args.size() == 1);
  CHECK(d->args[0]->kind == FormulaKind::Top);
  auto h = parse_formula("hom(1/2, E(T))", l);
  CHECK(formula_equal(h, f_hom(l.number(Rational(1, 2)), f_modal("E", {f_top()}))));
  CHECK(formula_equal(parse_formula("<0.25> * T", l), f_tensor(l.number(Rational(1, 4)), f_top())));
  CHECK(formula_equal(parse_formula("(T|E(T))", l), f_or(f_top(), f_modal("E", {f_top()}))));
  CHECK(formula_equal(parse_formula("c", l), f_modal("c", {})));
  CHECK(formula_equal(parse_formula("c()", l), f_modal("c", {})));
  CHECK(modal_depth(parse_formula("(E(E(T)) & E(T))", l)) == 2);
}

TEST_CASE("parser errors carry a position") {
  auto l = Quantale::luk01();
  auto fam = canonical_family(Functor::distribution(), l);
  auto pos = [&](const char* text, const std::vector<PredicateLifting>* f = nullptr) -> std::size_t {
    try {
      parse_formula(text, l, f);
    } catch (const ParseError& e) {
      return e.position();
    }
    return 9999;
  };
  CHECK(pos("(T & T") == 6);
  CHECK(pos("(T ^ T)") == 3);
  CHECK(pos("hom(2, T)") == 4);
  CHECK(pos("T T") == 2);
  CHECK(pos("") == 0);
  CHECK(pos("dia(T)", &fam) == 0);
  CHECK(pos("(T | E(T, T))", &fam) == 5);
  CHECK(pos("(T | E(T))", &fam) == 9999);
}

TEST_CASE("printer round-trips a generated corpus") {
  std::mt19937_64 rng(41);
  auto l = Quantale::luk01();
  for (int i = 0; i < 300; ++i) {
    auto f = random_formula(rng, l, 5);
    auto text = format_formula(f, l);
    auto g = parse_formula(text, l);
    REQUIRE(formula_equal(f, g));
    REQUIRE(format_formula(g, l) == text);
  }
  auto fm = Quantale::free_on_monoid(FiniteMonoid::truncated_free_commutative({"a", "b"}, 2));
  auto u = fm.parse("{a,b}");
  auto f = f_hom(u, f_tensor(u, f_top()));
  CHECK(formula_equal(parse_formula(format_formula(f, fm), fm), f));
}

TEST_CASE("evaluation examples") {
  auto b = Quantale::bool2();
  auto dead = lts({set_of({0}), set_of({})});
  auto fam = canonical_family(Functor::powerset(), b);
  auto v = eval_formula(parse_formula("dia(T)", b), dead, fam);
  CHECK(v == std::vector<Value>{b.top(), b.bottom()});
  CHECK(eval_formula(f_top(), dead, fam) == std::vector<Value>{b.top(), b.top()});
  // hom_s(⊥, φ) is negation on Bool2
  CHECK(eval_formula(parse_formula("hom(bot, dia(T))", b), dead, fam) == std::vector<Value>{b.bottom(), b.top()});
  CHECK_THROWS_AS(eval_formula(parse_formula("box(T)", b), dead, fam), ValidationError);

  auto l = Quantale::luk01();
  Coalgebra loop;
  loop.functor = Functor::distribution();
  loop.states = discrete(l, {"x"});
  loop.alpha = {FElem::dist({FElem::atom(0)}, {Rational(1)})};
  auto e = canonical_family(Functor::distribution(), l);
  CHECK(eval_formula(parse_formula("E(T)", l), loop, e) == std::vector<Value>{l.top()});
  CHECK(eval_formula(parse_formula("E(1/4 * T)", l), loop, e) == std::vector<Value>{l.number(Rational(1, 4))});
}

TEST_CASE("logical distance examples") {
  auto b = Quantale::bool2();
  auto dead = lts({set_of({0}), set_of({})});
  auto fam = canonical_family(Functor::powerset(), b);
  LogicOptions o;
  o.depth = 0;
  auto ld0 = logical_distance(dead, fam, o);
  for (const auto& v : ld0.matrix.matrix) CHECK(v == b.top());
  o.depth = 1;
  auto ld1 = logical_distance(dead, fam, o);
  CHECK(ld1.matrix.at(0, 1) == b.bottom());
  CHECK(ld1.matrix.at(0, 0) == b.top());
  CHECK(ld1.levels.size() == 2);
  CHECK_FALSE(ld1.partial);
  // every witness evaluates to its recorded vector
  for (std::size_t i = 0; i < ld1.witnesses.size(); ++i)
    CHECK(eval_formula(ld1.witnesses[i], dead, fam) == ld1.vectors[i]);
}

TEST_CASE("logical distance is monotone in depth and above bd") {
  std::mt19937_64 rng(7);
  auto l = Quantale::luk01();
  auto fam = canonical_family(Functor::distribution(), l);
  for (int t = 0; t < 6; ++t) {
    auto c = random_markov(2 + rng() % 3, rng);
    LogicOptions o;
    o.depth = 3;
    o.budget = 600;
    auto ld = logical_distance(c, fam, o);
    DistanceOptions bo;
    bo.min_iter = 3;
    auto bd = behavioural_distance(c, parse_lifting("sym∘kantorovich", c.functor, l), bo);
    for (std::size_t d = 0; d < ld.levels.size(); ++d) {
      const auto& m = ld.levels[d].matrix;
      if (d) REQUIRE(m.as_relation().leq(ld.levels[d - 1].matrix.as_relation()));
      REQUIRE(bd.matrix.as_relation().leq(m.as_relation()));
      REQUIRE(bd.trace[d].as_relation().leq(m.as_relation()));
      for (std::size_t x = 0; x < c.size(); ++x) REQUIRE(m.at(x, x) == l.top());
    }
    // each realized ⟦φ⟧ is non-expansive (X, bd) → V_s
    for (const auto& v : ld.vectors)
      for (std::size_t x = 0; x < c.size(); ++x)
        for (std::size_t y = 0; y < c.size(); ++y) REQUIRE(l.leq(bd.matrix.at(x, y), l.hom_s(v[x], v[y])));
  }
}

TEST_CASE("bool2 diamond logic reaches bisimilarity") {
  std::mt19937_64 rng(19);
  auto b = Quantale::bool2();
  auto fam = canonical_family(Functor::powerset(), b);
  for (int t = 0; t < 25; ++t) {
    auto c = random_lts(1 + rng() % 5, rng);
    auto rep = expressivity_report(c, parse_lifting("sym∘kantorovich", c.functor, b), fam, c.size());
    REQUIRE(rep.gap_non_increasing);
    for (const auto& row : rep.rows) REQUIRE(row.bd_below_ld);
    CHECK(rep.rows.back().max_gap == 0);
    CHECK(k_level(rep.bd.matrix) == bisimilarity_oracle(c, true));
  }
}

TEST_CASE("expressivity report examples") {
  auto b = Quantale::bool2();
  auto fam = canonical_family(Functor::powerset(), b);
  auto lift = parse_lifting("sym∘kantorovich", Functor::powerset(), b);
  auto loops = lts({set_of({1}), set_of({0})});
  for (const auto& row : expressivity_report(loops, lift, fam, 3).rows) CHECK(row.max_gap == 0);
  auto dead = lts({set_of({0}), set_of({})});
  auto rep = expressivity_report(dead, lift, fam, 2);
  CHECK(rep.rows[0].max_gap == 1);
  CHECK(rep.rows[1].max_gap == 0);
  CHECK(rep.rows[2].max_gap == 0);

  auto l = Quantale::luk01();
  Coalgebra chain;
  chain.functor = Functor::distribution();
  chain.states = discrete(l, {"a", "b", "c"});
  auto d2 = [](std::size_t i, std::size_t j) {
    return FElem::dist({FElem::atom(i), FElem::atom(j)}, {Rational(1, 2), Rational(1, 2)});
  };
  chain.alpha = {d2(0, 1), d2(1, 2), FElem::dist({FElem::atom(2)}, {Rational(1)})};
  LogicOptions o;
  o.budget = 800;
  auto r = expressivity_report(chain, parse_lifting("sym∘kantorovich", chain.functor, l),
                               canonical_family(chain.functor, l), 4, o);
  CHECK(r.gap_non_increasing);
  CHECK(r.rows.size() == 5);
  for (const auto& row : r.rows) CHECK(row.bd_below_ld);
}

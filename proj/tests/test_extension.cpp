#include "doctest.h"

#include <random>

#include "qk/extension.hpp"

using namespace qk;

namespace {

VRelation bool_rel(std::size_t n, std::size_t m, unsigned bits) {
  auto q = Quantale::bool2();
  VRelation r(q, numbered_carrier(n, "x"), numbered_carrier(m, "y"), q.bottom());
  for (std::size_t i = 0; i < n * m; ++i) r.matrix[i] = q.boolean((bits >> i) & 1u);
  return r;
}

FElem set_of(std::initializer_list<std::size_t> xs) {
  std::vector<FElem> m;
  for (auto x : xs) m.push_back(FElem::atom(x));
  return FElem::set(m);
}

}  // namespace

TEST_CASE("egli-milner examples") {
  auto b = Quantale::bool2();
  auto eq = identity_relation(b, {"1", "2"});
  auto lower = egli_milner(EgliMode::Lower);
  CHECK(lower.eval(eq, set_of({0}), set_of({0, 1})) == b.top());
  CHECK(lower.eval(eq, set_of({0, 1}), set_of({0})) == b.bottom());
  auto upper = egli_milner(EgliMode::Upper);
  CHECK(upper.eval(eq, set_of({0}), set_of({0, 1})) == b.bottom());
  CHECK(upper.eval(eq, set_of({0, 1}), set_of({0})) == b.top());
  auto both = egli_milner(EgliMode::Both);
  CHECK(both.eval(eq, set_of({0, 1}), set_of({0, 1})) == b.top());
  CHECK(both.eval(eq, set_of({0}), set_of({0, 1})) == b.bottom());

  auto l = Quantale::luk01();
  VRelation c(l, {"p", "q"}, {"p", "q"}, l.number(Rational(3, 10)));
  for (const auto& a : {set_of({0}), set_of({1}), set_of({0, 1})})
    for (const auto& bb : {set_of({0}), set_of({1}), set_of({0, 1})})
      for (auto mode : {EgliMode::Lower, EgliMode::Upper, EgliMode::Both})
        CHECK(egli_milner(mode).eval(c, a, bb) == l.number(Rational(3, 10)));
}

TEST_CASE("egli-milner on composite functors") {
  auto b = Quantale::bool2();
  auto lts = Functor::powerset(Functor::labelled({"a", "b"}, Functor::identity()));
  auto e = egli_milner(EgliMode::Lower, lts);
  auto eq = identity_relation(b, {"x", "y"});
  auto ax = FElem::set({FElem::tagged(0, {FElem::atom(0)})});
  auto bx = FElem::set({FElem::tagged(1, {FElem::atom(0)})});
  CHECK(e.eval(eq, ax, ax) == b.top());
  CHECK(e.eval(eq, ax, bx) == b.bottom());

  auto m = Functor::maybe(Functor::powerset());
  auto em = egli_milner(EgliMode::Lower, m);
  auto l = Quantale::luk01();
  VRelation r(l, {"x"}, {"x"}, l.number(Rational(1, 2)));
  CHECK(em.eval(r, FElem::tagged(0, {}), FElem::tagged(0, {})) == l.unit());
  CHECK(em.eval(r, FElem::tagged(0, {}), FElem::tagged(1, {set_of({0})})) == l.bottom());
  CHECK_THROWS_AS(egli_milner(EgliMode::Lower, Functor::distribution()).eval(r, FElem::atom(0), FElem::atom(0)),
                  UnsupportedError);
}

TEST_CASE("kantorovich extension of the diamond is the lower egli-milner extension") {
  auto b = Quantale::bool2();
  auto dia = canonical_family(Functor::powerset(), b);
  auto k = kantorovich_extension(dia, Functor::powerset());
  auto lower = egli_milner(EgliMode::Lower);
  for (std::size_t n = 1; n <= 2; ++n)
    for (std::size_t m = 1; m <= 2; ++m)
      for (unsigned bits = 0; bits < (1u << (n * m)); ++bits) {
        auto r = bool_rel(n, m, bits);
        REQUIRE(k.apply(r) == lower.apply(r));
      }
}

TEST_CASE("kantorovich extension corner cases") {
  auto b = Quantale::bool2();
  auto empty = kantorovich_extension({}, Functor::powerset());
  auto r = bool_rel(2, 2, 9);
  auto fr = empty.apply(r);
  for (const auto& v : fr.matrix) CHECK(v == b.top());

  auto k = kantorovich_extension(canonical_family(Functor::powerset(), b), Functor::powerset());
  auto id = identity_relation(b, {"x", "y"});
  auto fid = k.apply(id);
  for (std::size_t i = 0; i < fid.rows(); ++i) CHECK(b.leq(b.unit(), fid.at(i, i)));

  auto l = Quantale::luk01();
  VRelation lr(l, {"x"}, {"x"}, l.top());
  auto kl = kantorovich_extension(canonical_family(Functor::powerset(), l), Functor::powerset());
  CHECK_THROWS_AS(kl.apply(lr), UnsupportedError);
}

TEST_CASE("induced predicate liftings") {
  auto b = Quantale::bool2();
  auto lower = egli_milner(EgliMode::Lower);
  // Fκ for κ = 1 is {∅, {0}}; select {0}
  auto fk = Functor::powerset().enumerate(1);
  std::vector<Value> row(fk.size(), b.bottom());
  for (std::size_t i = 0; i < fk.size(); ++i)
    if (fk[i] == set_of({0})) row[i] = b.top();
  auto dia = induced_pl(lower, 1, b, row, "dia'");
  auto ref = canonical_family(Functor::powerset(), b)[0];
  for (std::size_t n = 1; n <= 3; ++n) {
    auto elems = Functor::powerset().enumerate(n);
    for_each_predicates(1, n, b.elements(), [&](const Predicates& p) {
      REQUIRE(dia.apply(b, p, elems) == ref.apply(b, p, elems));
      return true;
    });
  }
  CHECK(is_monotone(dia, b));

  auto zero = induced_pl(lower, 1, b, std::vector<Value>(fk.size(), b.bottom()));
  Predicates p{1, 2, {b.top(), b.top()}};
  for (const auto& e : Functor::powerset().enumerate(2)) CHECK(zero.eval(b, p, e) == b.bottom());

  // identity extension, 𝔯 picks coordinate 1 of κ = 2: evaluation at 1
  auto ev = induced_pl(identity_extension(), 2, b, {b.bottom(), b.top()});
  Predicates q2{2, 2, {b.top(), b.bottom(), b.bottom(), b.top()}};
  CHECK(ev.eval(b, q2, FElem::atom(0)) == b.bottom());
  CHECK(ev.eval(b, q2, FElem::atom(1)) == b.top());
  CHECK_THROWS_AS(induced_pl(lower, 1, b, {b.top()}), ShapeError);
}

TEST_CASE("lax extensions induce monotone liftings") {
  auto b = Quantale::bool2();
  for (auto mode : {EgliMode::Lower, EgliMode::Upper, EgliMode::Both}) {
    auto e = egli_milner(mode);
    auto fk = Functor::powerset().enumerate(2);
    for (unsigned bits = 0; bits < (1u << fk.size()); ++bits) {
      std::vector<Value> row;
      for (std::size_t i = 0; i < fk.size(); ++i) row.push_back(b.boolean((bits >> i) & 1u));
      REQUIRE(is_monotone(induced_pl(e, 2, b, row), b));
    }
  }
}

TEST_CASE("the broken fixture is flagged and breaks function compatibility") {
  auto bad = broken_egli_fixture();
  CHECK(bad.negative_control);
  auto b = Quantale::bool2();
  auto g = graph(b, MapWitness::identity(2), {"x", "y"}, {"x", "y"});
  // F f(A) = A but F̂f(A, A) = ⊥ for A = {x, y}
  CHECK(bad.eval(g, set_of({0, 1}), set_of({0, 1})) == b.bottom());
}

TEST_CASE("top extension") {
  auto t = top_extension(Functor::powerset());
  auto r = bool_rel(2, 2, 0);
  for (const auto& v : t.apply(r).matrix) CHECK(v == Value::boolean(true));
}

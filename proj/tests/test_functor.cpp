#include "doctest.h"

#include <random>

#include "qk/functor.hpp"
#include "qk/predicate.hpp"

using namespace qk;

namespace {

std::vector<Functor> sample_functors() {
  return {Functor::identity(),
          Functor::powerset(),
          Functor::distribution(),
          Functor::labelled({"a", "b"}, Functor::identity()),
          Functor::powerset(Functor::labelled({"a", "b"}, Functor::identity())),
          Functor::power({"a", "b"}, Functor::powerset()),
          Functor::power({"a"}, Functor::maybe(Functor::distribution())),
          Functor::maybe(Functor::powerset()),
          Functor::neighbourhood()};
}

MapWitness random_map(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::vector<std::size_t> img(n);
  for (auto& i : img) i = rng() % m;
  return MapWitness(m, img);
}

}  // namespace

TEST_CASE("functor action is functorial") {
  std::mt19937_64 rng(1);
  for (const auto& f : sample_functors()) {
    CAPTURE(f.name());
    for (int t = 0; t < 40; ++t) {
      std::size_t n = 1 + rng() % 3, m = 1 + rng() % 3, k = 1 + rng() % 3;
      auto g = random_map(n, m, rng);
      auto h = random_map(m, k, rng);
      auto e = random_element(f, n, rng);
      REQUIRE_NOTHROW(f.validate(e, n));
      REQUIRE(f.map(e, MapWitness::identity(n)) == e);
      REQUIRE(f.map(e, MapWitness::compose(h, g)) == f.map(f.map(e, g), h));
      REQUIRE_NOTHROW(f.validate(f.map(e, g), m));
    }
  }
}

TEST_CASE("enumeration sizes and order") {
  CHECK(Functor::powerset().enumerate(3).size() == 8);
  CHECK(Functor::maybe(Functor::powerset()).enumerate(2).size() == 5);
  CHECK(Functor::labelled({"a", "b"}, Functor::identity()).enumerate(3).size() == 6);
  CHECK(Functor::power({"a", "b"}, Functor::powerset()).enumerate(2).size() == 16);
  CHECK(Functor::neighbourhood().enumerate(2).size() == 16);
  CHECK(Functor::powerset(Functor::labelled({"a", "b"}, Functor::identity())).enumerate(2).size() == 16);
  auto all = Functor::powerset().enumerate(4);
  CHECK(std::is_sorted(all.begin(), all.end()));
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  CHECK_THROWS_AS(Functor::distribution().enumerate(2), UnsupportedError);
  CHECK_THROWS_AS(Functor::powerset().enumerate(11), BudgetError);
  CHECK_THROWS_AS(Functor::neighbourhood().enumerate(4), BudgetError);
}

TEST_CASE("neighbourhood action by preimage") {
  // N f(S) = {B ⊆ Y | f⁻¹(B) ∈ S}; collapsing 2 points to 1
  auto n = Functor::neighbourhood();
  auto s = FElem::set({FElem::set({FElem::atom(0)})});  // {{x0}}
  auto img = n.map(s, MapWitness(1, {0, 0}));
  // f⁻¹(∅) = ∅ ∉ S, f⁻¹({y}) = {x0,x1} ∉ S
  CHECK(img.items.empty());
  auto s2 = FElem::set({FElem::set({FElem::atom(0), FElem::atom(1)})});
  CHECK(n.map(s2, MapWitness(1, {0, 0})).items.size() == 1);
}

TEST_CASE("validation reports a field path") {
  auto d = Functor::distribution();
  auto bad = FElem::dist({FElem::atom(0), FElem::atom(1)}, {Rational(1, 2), Rational(1, 3)});
  try {
    d.validate(bad, 2, "transitions.x");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.path().starts_with("transitions.x"));
  }
  CHECK_THROWS_AS(Functor::powerset().validate(FElem::set({FElem::atom(5)}), 2), ValidationError);
}

TEST_CASE("parsing functor strings") {
  std::vector<std::string> labels{"a", "b"};
  CHECK(parse_functor("powerset") == Functor::powerset());
  CHECK(parse_functor("P") == Functor::powerset());
  CHECK(parse_functor("dist") == Functor::distribution());
  CHECK(parse_functor("nbhd") == Functor::neighbourhood());
  CHECK(parse_functor("dist^A", labels) == Functor::power(labels, Functor::distribution()));
  CHECK(parse_functor("(1+dist)^A", labels) == Functor::power(labels, Functor::maybe(Functor::distribution())));
  CHECK(parse_functor("powerset(A×id)", labels) == Functor::powerset(Functor::labelled(labels, Functor::identity())));
  CHECK(parse_functor("powerset(A*id)", labels) == Functor::powerset(Functor::labelled(labels, Functor::identity())));
  CHECK(parse_functor("powerset^{u,v}") == Functor::power({"u", "v"}, Functor::powerset()));
  CHECK_THROWS(parse_functor("bogus"));
  CHECK_THROWS(parse_functor("dist^A"));  // no labels
}

TEST_CASE("formatting elements") {
  Carrier x{"x", "y"};
  CHECK(Functor::powerset().format(FElem::set({FElem::atom(1), FElem::atom(0)}), x) == "{x,y}");
  CHECK(Functor::distribution().format(FElem::dist({FElem::atom(0)}, {Rational(1)}), x) == "{x:1}");
  CHECK(Functor::maybe(Functor::powerset()).format(FElem::tagged(0, {}), x) == "term");
  CHECK(Functor::labelled({"a"}, Functor::identity()).format(FElem::tagged(0, {FElem::atom(1)}), x) == "(a,y)");
}

// ---------------------------------------------------------------------------

TEST_CASE("canonical family names") {
  auto b = Quantale::bool2();
  auto names = [](const std::vector<PredicateLifting>& fam) {
    std::vector<std::string> out;
    for (const auto& l : fam) out.push_back(l.name);
    return out;
  };
  CHECK(names(canonical_family(Functor::powerset(), b)) == std::vector<std::string>{"dia"});
  CHECK(names(canonical_family(Functor::distribution(), Quantale::luk01())) == std::vector<std::string>{"E"});
  auto lts = Functor::powerset(Functor::labelled({"a", "b"}, Functor::identity()));
  CHECK(names(canonical_family(lts, b)) ==
        std::vector<std::string>{"dia.is@a", "dia.is@b", "dia@a", "dia@b"});
  auto mdp = Functor::power({"a"}, Functor::maybe(Functor::distribution()));
  CHECK(names(canonical_family(mdp, Quantale::luk01())) == std::vector<std::string>{"E@a", "E_bot@a"});
  CHECK_THROWS_AS(canonical_family(Functor::distribution(), b), UnsupportedError);
  CHECK_THROWS_AS(canonical_family(Functor::neighbourhood(), Quantale::luk01()), UnsupportedError);
  CHECK_THROWS_AS(find_lifting(canonical_family(Functor::powerset(), b), "box"), ValidationError);
  CHECK(select_family(canonical_family(lts, b), "dia@a,dia@b").size() == 2);
}

TEST_CASE("diamond and expectation") {
  auto b = Quantale::bool2();
  auto dia = canonical_family(Functor::powerset(), b)[0];
  Predicates p{1, 2, {b.top(), b.bottom()}};
  CHECK(dia.eval(b, p, FElem::set({FElem::atom(0), FElem::atom(1)})) == b.top());
  CHECK(dia.eval(b, p, FElem::set({FElem::atom(1)})) == b.bottom());
  CHECK(dia.eval(b, p, FElem::set({})) == b.bottom());

  auto l = Quantale::luk01();
  auto e = canonical_family(Functor::distribution(), l)[0];
  Predicates f{1, 2, {l.number(Rational(1, 2)), l.number(1)}};
  auto mu = FElem::dist({FElem::atom(0), FElem::atom(1)}, {Rational(1, 4), Rational(3, 4)});
  CHECK(e.eval(l, f, mu) == l.number(Rational(7, 8)));
  Predicates tops{1, 2, {l.top(), l.top()}};
  CHECK(e.eval(l, tops, mu) == l.top());
}

TEST_CASE("canonical liftings are natural and monotone (except nb)") {
  std::mt19937_64 rng(4);
  struct Case {
    Functor f;
    Quantale q;
  };
  std::vector<Case> cases{{Functor::powerset(), Quantale::bool2()},
                          {Functor::powerset(), Quantale::luk01()},
                          {Functor::distribution(), Quantale::luk01()},
                          {Functor::powerset(Functor::labelled({"a", "b"}, Functor::identity())), Quantale::bool2()},
                          {Functor::power({"a", "b"}, Functor::maybe(Functor::distribution())), Quantale::luk01()},
                          {Functor::maybe(Functor::powerset()), Quantale::lawvere_cost()},
                          {Functor::neighbourhood(), Quantale::bool2()}};
  for (const auto& c : cases) {
    auto grid = c.q.grid(4);
    for (const auto& l : canonical_family(c.f, c.q)) {
      CAPTURE(l.name);
      CHECK(is_monotone(l, c.q) == (l.name != "nb"));
      for (int t = 0; t < 30; ++t) {
        std::size_t n = 1 + rng() % 3, m = 1 + rng() % 3;
        auto g = random_map(n, m, rng);
        Predicates p{l.arity, m, std::vector<Value>(l.arity * m, c.q.top())};
        for (auto& v : p.values) v = grid[rng() % grid.size()];
        std::vector<FElem> elems;
        for (int i = 0; i < 5; ++i) elems.push_back(random_element(c.f, n, rng));
        REQUIRE(is_natural_at(l, c.q, p, g, elems));
      }
    }
  }
}

TEST_CASE("a lifting is recovered from its Yoneda component") {
  auto b = Quantale::bool2();
  std::mt19937_64 rng(9);
  for (const auto& f : {Functor::powerset(), Functor::maybe(Functor::powerset()),
                        Functor::power({"a", "b"}, Functor::powerset()), Functor::neighbourhood()}) {
    for (const auto& l : canonical_family(f, b)) {
      auto table = yoneda_component(l, b);
      auto back = lifting_from_yoneda(l.name, f, b, l.arity, table);
      for (std::size_t n = 1; n <= 3; ++n) {
        auto elems = f.enumerate(n);
        for_each_predicates(l.arity, n, b.elements(), [&](const Predicates& p) {
          REQUIRE(back.apply(b, p, elems) == l.apply(b, p, elems));
          return true;
        });
      }
    }
  }
}

TEST_CASE("power carrier indexing") {
  auto b = Quantale::bool2();
  CHECK(power_carrier_size(b, 2) == 4);
  auto p = projections(b, 2);
  for (std::size_t x = 0; x < 4; ++x) {
    auto pt = power_point(b, 2, x);
    CHECK(p.at(0, x) == pt[0]);
    CHECK(p.at(1, x) == pt[1]);
  }
  CHECK_THROWS_AS(power_carrier_size(Quantale::luk01(), 1), UnsupportedError);
}

TEST_CASE("predicate enumeration visits every tuple") {
  auto b = Quantale::bool2();
  std::size_t count = 0;
  for_each_predicates(2, 3, b.elements(), [&](const Predicates&) {
    ++count;
    return true;
  });
  CHECK(count == 64);
  count = 0;
  for_each_predicates(0, 3, b.elements(), [&](const Predicates&) {
    ++count;
    return true;
  });
  CHECK(count == 1);
}

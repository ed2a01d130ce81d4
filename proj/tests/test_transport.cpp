#include "doctest.h"

#include <random>

#include "qk/transport.hpp"

using namespace qk;

namespace {

Distribution random_dist(std::size_t n, std::mt19937_64& rng, int den) {
  // n masses with denominator den, summing to 1
  std::vector<int> units(n, 0);
  for (int i = 0; i < den; ++i) ++units[rng() % n];
  Distribution d;
  for (auto u : units) {
    Rational m(u, den);
    m.canonicalize();
    d.push_back(m);
  }
  return d;
}

VCategory random_metric(std::size_t n, std::mt19937_64& rng) {
  // shortest-path closure of random quarter weights, asymmetric
  auto q = Quantale::luk01();
  VCategory c(q, numbered_carrier(n), std::vector<Value>(n * n, q.top()));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (x != y) c.at(x, y) = q.number(Rational(static_cast<long>(1 + rng() % 4), 4));
  return transitive_closure(c);
}

std::vector<std::vector<Rational>> costs(const VCategory& c) {
  std::vector<std::vector<Rational>> out(c.size(), std::vector<Rational>(c.size()));
  for (std::size_t x = 0; x < c.size(); ++x)
    for (std::size_t y = 0; y < c.size(); ++y) out[x][y] = c.quantale.numeric(c.at(x, y)).value;
  return out;
}

// Brute force over grid-valued non-expansive f: X → [0,1], denominators 20.
Rational twentieths(int p) {
  Rational r(p, 20);
  r.canonicalize();
  return r;
}

Rational brute_force(const VCategory& c, const Distribution& mu, const Distribution& nu) {
  const std::size_t n = c.size();
  std::vector<int> f(n, 0);
  Rational best = 0;
  while (true) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x)
      for (std::size_t y = 0; y < n && ok; ++y)
        ok = twentieths(f[y] - f[x]) <= c.quantale.numeric(c.at(x, y)).value;
    if (ok) {
      Rational v = 0;
      for (std::size_t x = 0; x < n; ++x) v += twentieths(f[x]) * (nu[x] - mu[x]);
      if (v > best) best = v;
    }
    std::size_t i = 0;
    while (i < n && ++f[i] > 20) f[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("wasserstein examples") {
  auto l = Quantale::luk01();
  auto c = VCategory(l, {"x", "y"}, {l.top(), l.number(Rational(3, 10)), l.number(Rational(3, 10)), l.top()});
  Distribution dx{1, 0}, dy{0, 1};
  CHECK(wasserstein_lp(c, dx, dy) == l.number(Rational(3, 10)));
  CHECK(wasserstein_lp(c, dx, dx) == l.top());
  CHECK(brute_force(c, dx, dy) == Rational(3, 10));

  auto disc = discrete(l, {"x", "y"});
  Distribution half{Rational(1, 2), Rational(1, 2)};
  CHECK(wasserstein_lp(disc, half, dx) == l.number(Rational(1, 2)));
  CHECK(tv_lift(l, half, dx) == l.number(Rational(1, 2)));
}

TEST_CASE("total variation examples") {
  auto l = Quantale::luk01();
  CHECK(tv_lift(l, {Rational(1, 3), Rational(2, 3)}, {Rational(1, 3), Rational(2, 3)}) == l.top());
  CHECK(tv_lift(l, {1, 0}, {0, 1}) == l.number(1));
  CHECK(tv_lift(l, {Rational(1, 2), Rational(1, 2)}, {Rational(3, 4), Rational(1, 4)}) == l.number(Rational(1, 4)));
}

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(validate_distribution({Rational(1, 2), Rational(1, 3)}, 2), DomainError);
  CHECK_THROWS_AS(validate_distribution({Rational(3, 2), Rational(-1, 2)}, 2), DomainError);
  CHECK_THROWS_AS(validate_distribution({1}, 2), ShapeError);
  CHECK_NOTHROW(validate_distribution({Rational(1, 4), Rational(3, 4)}, 2));
}

TEST_CASE("LP value against brute force over the grid") {
  // Difference constraints with quarter bounds have their vertices on the
  // quarter grid, so the twentieths search finds the exact optimum.
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 2 + rng() % 2;
    auto c = random_metric(n, rng);
    auto mu = random_dist(n, rng, 4), nu = random_dist(n, rng, 4);
    auto w = c.quantale.numeric(wasserstein_lp(c, mu, nu)).value;
    REQUIRE(brute_force(c, mu, nu) == w);
    REQUIRE(w == transport_primal(costs(c), mu, nu));
  }
}

TEST_CASE("strong duality on random instances") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + rng() % 5;
    auto c = random_metric(n, rng);
    int den = 1 + static_cast<int>(rng() % 6);
    auto mu = random_dist(n, rng, den), nu = random_dist(n, rng, den);
    REQUIRE(c.quantale.numeric(wasserstein_lp(c, mu, nu)).value == transport_primal(costs(c), mu, nu));
  }
}

TEST_CASE("simplex on a small program") {
  // max x + y s.t. x ≤ 1, y ≤ 2, x + y ≤ 5/2
  auto res = maximize({1, 1}, {{1, 0}, {0, 1}, {1, 1}}, {1, 2, Rational(5, 2)});
  CHECK(res.value == Rational(5, 2));
  CHECK(res.x[0] + res.x[1] == Rational(5, 2));
}

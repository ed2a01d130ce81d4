#include "qk/behaviour.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace qk {

void Coalgebra::validate() const {
  if (alpha.size() != states.size())
    throw ValidationError("transitions", "expected one transition per state (" + std::to_string(states.size()) + ")");
  for (std::size_t x = 0; x < alpha.size(); ++x)
    functor.validate(alpha[x], states.size(), "transitions." + states.carrier[x]);
}

MorphismCheck is_coalgebra_morphism(const MapWitness& f, const Coalgebra& c1, const Coalgebra& c2) {
  if (!(c1.functor == c2.functor)) throw ShapeError("coalgebras for different functors");
  if (f.source_size != c1.size() || f.target_size != c2.size()) throw ShapeError("map does not match the state spaces");
  MorphismCheck out;
  for (std::size_t x = 0; x < c1.size(); ++x)
    if (!(c1.functor.map(c1.alpha[x], f) == c2.alpha[f(x)])) {
      out.ok = false;
      out.witness = x;
      return out;
    }
  return out;
}

namespace {

/// Largest numeric change between two structures; nullopt if an entry moved
/// between finite and infinite.
std::optional<Rational> max_change(const VCategory& a, const VCategory& b) {
  const auto& q = a.quantale;
  Rational worst = 0;
  for (std::size_t i = 0; i < a.matrix.size(); ++i) {
    auto x = q.numeric(a.matrix[i]);
    auto y = q.numeric(b.matrix[i]);
    if (x.infinite != y.infinite) return std::nullopt;
    if (x.infinite) continue;
    Rational d = abs(x.value - y.value);
    if (d > worst) worst = d;
  }
  return worst;
}

}  // namespace

DistanceResult behavioural_distance(const Coalgebra& c, const Lifting& l, const DistanceOptions& opts) {
  if (!(l.functor == c.functor))
    throw ShapeError("lifting " + l.name + " is for " + l.functor.name() + ", the system for " + c.functor.name());
  const auto& q = c.quantale();
  const std::size_t n = c.size();
  DistanceResult res;
  VCategory cur = opts.start_from_states ? c.states : indiscrete(q, c.states.carrier);
  res.trace.push_back(cur);
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    VCategory lifted = l.apply(cur, c.alpha);
    VCategory next = cur;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) next.at(x, y) = q.meet(lifted.at(x, y), cur.at(x, y));
    res.iterations = it;
    res.trace.push_back(next);
    const bool same = next == cur;
    bool close = same;
    if (!same && !q.is_finite()) {
      auto d = max_change(cur, next);
      close = d && *d < opts.epsilon;
    }
    cur = std::move(next);
    if (close && it >= opts.min_iter) {
      res.converged = true;
      res.epsilon_used = same ? Rational(0) : opts.epsilon;
      break;
    }
  }
  res.matrix = cur;
  return res;
}

// ---------------------------------------------------------------------------

namespace {

/// (label, successor) pairs of a powerset-style transition.
std::vector<std::pair<std::size_t, std::size_t>> moves(const Functor& f, const FElem& e) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  switch (f.kind()) {
    case Functor::Kind::Powerset:
      if (f.inner().kind() == Functor::Kind::Identity) {
        for (const auto& m : e.items) out.push_back({0, m.index});
        return out;
      }
      if (f.inner().kind() == Functor::Kind::Labelled && f.inner().inner().kind() == Functor::Kind::Identity) {
        for (const auto& m : e.items) out.push_back({m.index, m.items[0].index});
        return out;
      }
      break;
    case Functor::Kind::Power:
      if (f.inner().kind() == Functor::Kind::Powerset && f.inner().inner().kind() == Functor::Kind::Identity) {
        for (std::size_t a = 0; a < e.items.size(); ++a)
          for (const auto& m : e.items[a].items) out.push_back({a, m.index});
        return out;
      }
      break;
    default:
      break;
  }
  throw UnsupportedError("the two-valued oracle handles powerset, powerset(A×id) and powerset^A, not " + f.name());
}

}  // namespace

StateRelation bisimilarity_oracle(const Coalgebra& c, bool symmetric) {
  if (c.quantale().kind() != QuantaleKind::Bool2) throw UnsupportedError("the oracle is two-valued");
  const std::size_t n = c.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> mv(n);
  for (std::size_t x = 0; x < n; ++x) mv[x] = moves(c.functor, c.alpha[x]);

  StateRelation out{n, std::vector<bool>(n * n, false)};
  if (symmetric) {
    // Naive partition refinement on signatures {(label, block)}.
    std::vector<std::size_t> block(n, 0);
    while (true) {
      std::map<std::pair<std::size_t, std::set<std::pair<std::size_t, std::size_t>>>, std::size_t> ids;
      std::vector<std::size_t> next(n);
      for (std::size_t x = 0; x < n; ++x) {
        std::set<std::pair<std::size_t, std::size_t>> sig;
        for (auto [a, y] : mv[x]) sig.insert({a, block[y]});
        auto key = std::make_pair(block[x], std::move(sig));
        auto it = ids.find(key);
        if (it == ids.end()) it = ids.emplace(key, ids.size()).first;
        next[x] = it->second;
      }
      std::set<std::size_t> before(block.begin(), block.end()), after(next.begin(), next.end());
      block = next;
      if (before.size() == after.size()) break;
    }
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) out.rel[x * n + y] = block[x] == block[y];
    return out;
  }
  // Simulation preorder: drop (x,y) while some move of x is unmatched by y.
  std::fill(out.rel.begin(), out.rel.end(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (!out(x, y)) continue;
        bool ok = true;
        for (auto [a, x2] : mv[x]) {
          bool matched = false;
          for (auto [b, y2] : mv[y])
            if (a == b && out(x2, y2)) {
              matched = true;
              break;
            }
          if (!matched) {
            ok = false;
            break;
          }
        }
        if (!ok) {
          out.rel[x * n + y] = false;
          changed = true;
        }
      }
  }
  return out;
}

StateRelation k_level(const VCategory& d) {
  const std::size_t n = d.size();
  StateRelation out{n, std::vector<bool>(n * n, false)};
  for (std::size_t i = 0; i < n * n; ++i) out.rel[i] = d.quantale.leq(d.quantale.unit(), d.matrix[i]);
  return out;
}

bool is_simulation(const VRelation& s, const Coalgebra& c, const LaxExtension& e) {
  if (s.rows() != c.size() || s.cols() != c.size()) throw ShapeError("relation does not live on the states");
  if (!(e.functor == c.functor)) throw ShapeError("extension is for another functor");
  VRelation fs = e.apply(s, c.alpha, c.alpha);
  for (std::size_t x = 0; x < c.size(); ++x)
    for (std::size_t y = 0; y < c.size(); ++y)
      if (!s.quantale.leq(s.at(x, y), fs.at(x, y))) return false;
  return true;
}

VRelation greatest_simulation(const Coalgebra& c, const LaxExtension& e, std::size_t max_iter) {
  const auto& q = c.quantale();
  VRelation cur(q, c.states.carrier, c.states.carrier, q.top());
  for (std::size_t it = 0; it < max_iter; ++it) {
    VRelation next = meet(cur, [&] {
      VRelation fs = e.apply(cur, c.alpha, c.alpha);
      fs.source = cur.source;
      fs.target = cur.target;
      return fs;
    }());
    if (next == cur) return cur;
    cur = std::move(next);
  }
  throw BudgetError("greatest simulation did not stabilize");
}

}  // namespace qk

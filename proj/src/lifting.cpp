#include "qk/lifting.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <cmath>
#include <random>

#include "qk/transport.hpp"

namespace qk {

VCategory Lifting::apply(const VCategory& c, const std::vector<FElem>& elems) const {
  std::vector<FElem> unique = elems;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  const auto m = rule(c, unique);
  const std::size_t u = unique.size();
  if (m.size() != u * u) throw ShapeError("lifting " + name + " produced a matrix of the wrong size");
  std::vector<std::size_t> pos(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i)
    pos[i] = static_cast<std::size_t>(std::lower_bound(unique.begin(), unique.end(), elems[i]) - unique.begin());
  Carrier names;
  for (const auto& e : elems) names.push_back(functor.format(e, c.carrier));
  std::vector<Value> out;
  out.reserve(elems.size() * elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j < elems.size(); ++j) out.push_back(m[pos[i] * u + pos[j]]);
  return VCategory(c.quantale, std::move(names), std::move(out));
}

VCategory Lifting::apply(const VCategory& c) const { return apply(c, functor.enumerate(c.size())); }

std::vector<std::vector<Value>> vfunctors_to_v(const VCategory& c, const std::vector<Value>& values,
                                              std::size_t max_count) {
  const auto& q = c.quantale;
  const std::size_t n = c.size();
  std::vector<std::vector<Value>> out;
  // Depth-first with pruning: fix f(0..i) and check all pairs among them.
  std::vector<Value> f(n);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      if (out.size() >= max_count) throw BudgetError("too many V-functors into V to enumerate");
      out.push_back(f);
      return;
    }
    for (const auto& v : values) {
      f[i] = v;
      bool ok = q.leq(c.at(i, i), q.hom(v, v));
      for (std::size_t j = 0; j < i && ok; ++j)
        ok = q.leq(c.at(i, j), q.hom(v, f[j])) && q.leq(c.at(j, i), q.hom(f[j], v));
      if (ok) self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

namespace {

using Matrix = std::vector<Value>;

void meet_hom_into(const Quantale& q, Matrix& acc, const std::vector<Value>& lam, const std::vector<Value>& lam2) {
  const std::size_t m = lam.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) acc[i * m + j] = q.meet(acc[i * m + j], q.hom(lam[i], lam2[j]));
}

/// κ-tuples drawn from `pool`, one per call.
void for_each_tuple(const std::vector<std::vector<Value>>& pool, std::size_t arity, std::size_t n,
                    const std::function<void(const Predicates&)>& visit) {
  if (arity == 0) {
    visit(Predicates{0, n, {}});
    return;
  }
  if (pool.empty()) return;
  std::vector<std::size_t> digit(arity, 0);
  Predicates p{arity, n, std::vector<Value>(arity * n)};
  while (true) {
    for (std::size_t i = 0; i < arity; ++i)
      std::copy(pool[digit[i]].begin(), pool[digit[i]].end(), p.values.begin() + static_cast<long>(i * n));
    visit(p);
    std::size_t i = 0;
    while (i < arity && ++digit[i] == pool.size()) digit[i++] = 0;
    if (i == arity) return;
  }
}

Matrix lift_enumerate(const std::vector<PredicateLifting>& family, const VCategory& c, const std::vector<FElem>& elems) {
  const auto& q = c.quantale;
  if (!q.is_finite())
    throw UnsupportedError("enumerating V-functors into V needs a finite quantale; " + q.name() +
                           " is handled by closed forms");
  const auto pool = vfunctors_to_v(c, q.elements());
  Matrix acc(elems.size() * elems.size(), q.top());
  for (const auto& l : family) {
    double count = std::pow(static_cast<double>(pool.size()), static_cast<double>(l.arity));
    if (count > 4e6) throw BudgetError("too many V-functors X → V^κ for lifting " + l.name);
    for_each_tuple(pool, l.arity, c.size(), [&](const Predicates& f) {
      auto lam = l.apply(q, f, elems);
      meet_hom_into(q, acc, lam, lam);
    });
  }
  return acc;
}

Matrix lift_residual(const std::vector<PredicateLifting>& family, const VCategory& c, const std::vector<FElem>& elems) {
  // Distributors r: (κ,1_κ) ⇸ (X,a) are the relations with a · r = r.
  const auto& q = c.quantale;
  if (!q.is_finite()) throw UnsupportedError("the residual form enumerates distributors and needs a finite quantale");
  const auto a = c.as_relation();
  const auto values = q.elements();
  Carrier names(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) names[i] = std::to_string(i);
  VRelation acc(q, names, names, q.top());
  for (const auto& l : family) {
    for_each_predicates(l.arity, c.size(), values, [&](const Predicates& r) {
      VRelation rel = r.as_relation(q, c.carrier);
      if (!(compose(a, rel) == rel)) return true;
      VRelation lam(q, {"*"}, names, q.bottom());
      lam.matrix = l.apply(q, r, elems);
      acc = meet(acc, kan_extension(lam, lam));
      return true;
    });
  }
  return acc.matrix;
}

Matrix lift_extension(const std::vector<PredicateLifting>& family, const Functor& f, const VCategory& c,
                      const std::vector<FElem>& elems) {
  return kantorovich_extension(family, f).apply(c.as_relation(), elems, elems).matrix;
}

// Closed forms for the canonical families -------------------------------------

Value closed_form(const Functor& f, const VCategory& c, const FElem& x, const FElem& y);

Matrix closed_matrix(const Functor& f, const VCategory& c, const std::vector<FElem>& elems) {
  Matrix m;
  m.reserve(elems.size() * elems.size());
  for (const auto& x : elems)
    for (const auto& y : elems) m.push_back(closed_form(f, c, x, y));
  return m;
}

Value closed_form(const Functor& f, const VCategory& c, const FElem& x, const FElem& y) {
  const auto& q = c.quantale;
  switch (f.kind()) {
    case Functor::Kind::Identity:
      return c.at(x.index, y.index);
    case Functor::Kind::Powerset: {
      // Lower Hausdorff: ⋀_{a∈A} ⋁_{b∈B} inner(a,b).
      Value acc = q.top();
      for (const auto& a : x.items) {
        Value some = q.bottom();
        for (const auto& b : y.items) some = q.join(some, closed_form(f.inner(), c, a, b));
        acc = q.meet(acc, some);
      }
      return acc;
    }
    case Functor::Kind::Distribution: {
      if (q.kind() != QuantaleKind::Luk01) throw UnsupportedError("expectation lifting needs luk01");
      if (x == y) return q.top();
      std::vector<FElem> support = x.items;
      support.insert(support.end(), y.items.begin(), y.items.end());
      std::sort(support.begin(), support.end());
      support.erase(std::unique(support.begin(), support.end()), support.end());
      Matrix inner = closed_matrix(f.inner(), c, support);
      VCategory space(q, numbered_carrier(support.size()), std::move(inner));
      auto spread = [&](const FElem& d) {
        Distribution out(support.size(), Rational(0));
        for (std::size_t i = 0; i < d.items.size(); ++i) {
          auto k = std::lower_bound(support.begin(), support.end(), d.items[i]) - support.begin();
          out[static_cast<std::size_t>(k)] = d.weights[i];
        }
        return out;
      };
      return wasserstein_lp(space, spread(x), spread(y));
    }
    case Functor::Kind::Labelled:
      return x.index == y.index ? closed_form(f.inner(), c, x.items[0], y.items[0]) : q.bottom();
    case Functor::Kind::Power: {
      Value acc = q.top();
      for (std::size_t i = 0; i < x.items.size(); ++i) acc = q.meet(acc, closed_form(f.inner(), c, x.items[i], y.items[i]));
      return acc;
    }
    case Functor::Kind::Maybe: {
      if (x.index == y.index)
        return x.index == 0 ? q.top() : closed_form(f.inner(), c, x.items[0], y.items[0]);
      // Against termination only the extreme (constant) predicates matter,
      // the inner liftings being monotone: term vs η is ⋀_λ λ(⊥)(η) from
      // the ⊤-at-term copies, ξ vs term is ⋀_λ hom(λ(⊤)(ξ), ⊥) from the
      // ⊥-at-term copies.
      Value acc = q.top();
      for (const auto& l : canonical_family(f.inner(), q)) {
        if (x.index == 0) {
          Predicates bot{l.arity, c.size(), std::vector<Value>(l.arity * c.size(), q.bottom())};
          acc = q.meet(acc, l.eval(q, bot, y.items[0]));
        } else {
          Predicates top{l.arity, c.size(), std::vector<Value>(l.arity * c.size(), q.top())};
          acc = q.meet(acc, q.hom(l.eval(q, top, x.items[0]), q.bottom()));
        }
      }
      return acc;
    }
    case Functor::Kind::Neighbourhood:
      break;
  }
  throw UnsupportedError("no closed form for the Kantorovich lifting of " + f.name());
}

bool is_whole_canonical_family(const std::vector<PredicateLifting>& family, const Functor& f, const Quantale& q) {
  std::vector<std::string> want, have;
  for (const auto& l : canonical_family(f, q)) want.push_back(l.name);
  for (const auto& l : family) have.push_back(l.name);
  std::sort(want.begin(), want.end());
  std::sort(have.begin(), have.end());
  have.erase(std::unique(have.begin(), have.end()), have.end());
  return want == have;
}

}  // namespace

Lifting kantorovich_lift(const std::vector<PredicateLifting>& family, const Functor& f, KantorovichMethod method) {
  Lifting l;
  std::string names;
  for (const auto& p : family) names += (names.empty() ? "" : ",") + p.name;
  l.name = "kantorovich:" + names;
  l.functor = f;
  l.preserves_initial = true;
  auto fam = std::make_shared<const std::vector<PredicateLifting>>(family);
  l.rule = [fam, f, method](const VCategory& c, const std::vector<FElem>& elems) -> Matrix {
    auto m = method;
    if (m == KantorovichMethod::Auto) m = c.quantale.is_finite() ? KantorovichMethod::Enumerate : KantorovichMethod::ClosedForm;
    switch (m) {
      case KantorovichMethod::Enumerate: return lift_enumerate(*fam, c, elems);
      case KantorovichMethod::Residual: return lift_residual(*fam, c, elems);
      case KantorovichMethod::Extension: return lift_extension(*fam, f, c, elems);
      case KantorovichMethod::ClosedForm:
        if (!is_whole_canonical_family(*fam, f, c.quantale))
          throw UnsupportedError("closed forms exist only for the full canonical family of " + f.name());
        return closed_matrix(f, c, elems);
      case KantorovichMethod::Auto: break;
    }
    throw UnsupportedError("unknown method");
  };
  return l;
}

// ---------------------------------------------------------------------------

namespace {

Matrix restrict_atoms(const std::vector<FElem>& elems, const std::function<Value(std::size_t, std::size_t)>& at) {
  Matrix m;
  for (const auto& x : elems)
    for (const auto& y : elems) m.push_back(at(x.index, y.index));
  return m;
}

}  // namespace

Lifting identity_lift(const std::string& kind) {
  Lifting l;
  l.name = kind;
  l.functor = Functor::identity();
  if (kind == "id") {
    l.preserves_initial = true;
    l.rule = [](const VCategory& c, const std::vector<FElem>& e) {
      return restrict_atoms(e, [&](std::size_t x, std::size_t y) { return c.at(x, y); });
    };
  } else if (kind == "dual") {
    l.preserves_initial = true;
    l.rule = [](const VCategory& c, const std::vector<FElem>& e) {
      return restrict_atoms(e, [&](std::size_t x, std::size_t y) { return c.at(y, x); });
    };
  } else if (kind == "sym") {
    l.preserves_initial = true;
    l.rule = [](const VCategory& c, const std::vector<FElem>& e) {
      return restrict_atoms(e, [&](std::size_t x, std::size_t y) { return c.quantale.meet(c.at(x, y), c.at(y, x)); });
    };
  } else if (kind == "discrete") {
    l.rule = [](const VCategory& c, const std::vector<FElem>& e) {
      const auto& q = c.quantale;
      return restrict_atoms(e, [&](std::size_t x, std::size_t y) { return x == y ? q.unit() : q.bottom(); });
    };
  } else if (kind == "equiv") {
    l.rule = [](const VCategory& c, const std::vector<FElem>& e) {
      const auto& q = c.quantale;
      const std::size_t n = c.size();
      // Components of the undirected graph {x,y} with k ≤ a(x,y).
      std::vector<std::size_t> comp(n);
      std::iota(comp.begin(), comp.end(), 0);
      auto find = [&](std::size_t x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
      };
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (q.leq(q.unit(), c.at(x, y))) comp[find(x)] = find(y);
      return restrict_atoms(e, [&](std::size_t x, std::size_t y) { return find(x) == find(y) ? q.top() : q.bottom(); });
    };
  } else {
    throw ValidationError("lifting", "unknown identity lifting '" + kind + "'");
  }
  return l;
}

Lifting from_extension(const LaxExtension& e) {
  Lifting l;
  l.name = e.name;
  l.functor = e.functor;
  l.preserves_initial = !e.negative_control;
  l.rule = [e](const VCategory& c, const std::vector<FElem>& elems) {
    return e.apply(c.as_relation(), elems, elems).matrix;
  };
  return l;
}

Lifting tv_lifting() {
  Lifting l;
  l.name = "tv";
  l.functor = Functor::distribution();
  l.rule = [](const VCategory& c, const std::vector<FElem>& elems) {
    const auto& q = c.quantale;
    auto dense = [&](const FElem& d) {
      Distribution out(c.size(), Rational(0));
      for (std::size_t i = 0; i < d.items.size(); ++i) out.at(d.items[i].index) = d.weights[i];
      return out;
    };
    Matrix m;
    for (const auto& x : elems)
      for (const auto& y : elems) m.push_back(tv_lift(q, dense(x), dense(y)));
    return m;
  };
  return l;
}

Lifting compose_liftings(const Lifting& outer, const Lifting& inner) {
  const bool outer_id = outer.functor.kind() == Functor::Kind::Identity;
  const bool inner_id = inner.functor.kind() == Functor::Kind::Identity;
  if (!outer_id && !inner_id)
    throw UnsupportedError("composites of two non-identity functor liftings are not supported");
  Lifting l;
  l.name = outer.name + "∘" + inner.name;
  l.functor = outer_id ? inner.functor : outer.functor;
  l.preserves_initial = outer.preserves_initial && inner.preserves_initial;
  if (outer_id) {
    // Lift with `inner`, then apply the identity lifting to the result.
    l.rule = [outer, inner](const VCategory& c, const std::vector<FElem>& elems) {
      VCategory mid(c.quantale, numbered_carrier(elems.size()), inner.rule(c, elems));
      return outer.rule(mid, Functor::identity().enumerate(elems.size()));
    };
  } else {
    l.rule = [outer, inner](const VCategory& c, const std::vector<FElem>& elems) {
      VCategory mid(c.quantale, c.carrier, inner.rule(c, Functor::identity().enumerate(c.size())));
      return outer.rule(mid, elems);
    };
  }
  return l;
}

Lifting parse_lifting(const std::string& text, const Functor& f, const Quantale& q) {
  // Split on "∘" or "~".
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, 3, "∘") == 0) {
      parts.push_back(cur);
      cur.clear();
      i += 3;
    } else if (text[i] == '~') {
      parts.push_back(cur);
      cur.clear();
      ++i;
    } else if (text[i] == ' ') {
      ++i;
    } else {
      cur += text[i++];
    }
  }
  parts.push_back(cur);

  auto single = [&](const std::string& s) -> Lifting {
    if (s.empty()) throw ValidationError("lifting", "empty lifting in '" + text + "'");
    if (s == "id" || s == "discrete" || s == "dual" || s == "sym" || s == "equiv") return identity_lift(s);
    if (s == "tv") {
      if (!(f == Functor::distribution())) throw ValidationError("lifting", "tv needs the functor dist");
      return tv_lifting();
    }
    if (s == "egli-lower") return from_extension(egli_milner(EgliMode::Lower, f));
    if (s == "egli-upper") return from_extension(egli_milner(EgliMode::Upper, f));
    if (s == "egli") return from_extension(egli_milner(EgliMode::Both, f));
    if (s.starts_with("kantorovich")) {
      std::string names;
      if (s.size() > 11) {
        if (s[11] != ':') throw ValidationError("lifting", "expected 'kantorovich:<names>'");
        names = s.substr(12);
      }
      return kantorovich_lift(select_family(canonical_family(f, q), names), f);
    }
    throw ValidationError("lifting", "unknown lifting '" + s + "'");
  };

  Lifting acc = single(parts.back());
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = compose_liftings(single(parts[i]), acc);
  return acc;
}

// ---------------------------------------------------------------------------

CompatibilityReport compatibility_check(const PredicateLifting& l, const Lifting& lifting, const Quantale& q, int grid) {
  CompatibilityReport rep;
  const auto values = q.is_finite() ? q.elements() : q.grid(grid);
  rep.grid_restricted = !q.is_finite();
  const auto& f = l.functor;

  // Yoneda side: V^κ (or grid^κ) with the power structure.
  VCategory base = value_category(q, values);
  VCategory vk = power(base, l.arity, 1 << 12);
  std::vector<FElem> elems;
  if (f.enumerable()) {
    elems = f.enumerate(vk.size());
  } else {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) elems.push_back(random_element(f, vk.size(), rng));
  }
  // Projections on V^κ, following power()'s digit order.
  Predicates proj{l.arity, vk.size(), std::vector<Value>(l.arity * vk.size(), q.top())};
  for (std::size_t x = 0; x < vk.size(); ++x) {
    std::size_t rest = x;
    for (std::size_t i = 0; i < l.arity; ++i) {
      proj.at(i, x) = values[rest % values.size()];
      rest /= values.size();
    }
  }
  auto table = l.apply(q, proj, elems);
  VCategory lifted = lifting.apply(vk, elems);
  rep.yoneda_vfunctor = true;
  for (std::size_t i = 0; i < elems.size() && rep.yoneda_vfunctor; ++i)
    for (std::size_t j = 0; j < elems.size(); ++j) {
      ++rep.instances;
      if (!q.leq(lifted.at(i, j), q.hom(table[i], table[j]))) {
        rep.yoneda_vfunctor = false;
        break;
      }
    }

  // Restriction side: all V-categories on ≤ 2 points with values in the
  // (finite or grid) carrier, all V-functors into V^κ.
  rep.restricts = true;
  for (std::size_t n = 1; n <= 2 && rep.restricts; ++n) {
    for_each_predicates(1, n * n, values, [&](const Predicates& m) {
      VCategory c(q, numbered_carrier(n), m.values);
      if (!validate_category(c).is_category) return true;
      auto pool = vfunctors_to_v(c, values);
      std::vector<FElem> fx;
      if (f.enumerable()) {
        fx = f.enumerate(n);
      } else {
        std::mt19937_64 rng(13);
        for (int i = 0; i < 12; ++i) fx.push_back(random_element(f, n, rng));
      }
      VCategory lc = lifting.apply(c, fx);
      bool ok = true;
      for_each_tuple(pool, l.arity, n, [&](const Predicates& p) {
        if (!ok) return;
        auto lam = l.apply(q, p, fx);
        for (std::size_t i = 0; i < fx.size() && ok; ++i)
          for (std::size_t j = 0; j < fx.size() && ok; ++j) {
            ++rep.instances;
            ok = q.leq(lc.at(i, j), q.hom(lam[i], lam[j]));
          }
      });
      if (!ok) rep.restricts = false;
      return ok;
    });
  }
  return rep;
}

}  // namespace qk

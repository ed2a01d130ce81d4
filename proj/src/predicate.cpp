#include "qk/predicate.hpp"

#include <algorithm>
#include <memory>
#include <random>

namespace qk {

VRelation Predicates::as_relation(const Quantale& q, const Carrier& x) const {
  if (x.size() != size) throw ShapeError("predicates live on a carrier of another size");
  VRelation r(q, numbered_carrier(arity, "k"), x, q.bottom());
  r.matrix = values;
  return r;
}

Predicates Predicates::from_relation(const VRelation& r) {
  return Predicates{r.rows(), r.cols(), r.matrix};
}

std::vector<Value> PredicateLifting::apply(const Quantale& q, const Predicates& f,
                                           const std::vector<FElem>& elems) const {
  if (f.arity != arity) throw ShapeError("lifting " + name + " expects " + std::to_string(arity) + " predicates");
  std::vector<Value> out;
  out.reserve(elems.size());
  for (const auto& e : elems) out.push_back(eval(q, f, e));
  return out;
}

namespace {

// dia∘id is "dia", dia∘(id@a) is "dia@a", anything else "dia.<inner>".
std::string compose_name(const std::string& outer, const std::string& inner) {
  if (inner == "id") return outer;
  if (inner.starts_with("id@")) return outer + inner.substr(2);
  return outer + "." + inner;
}

PredicateLifting wrap(const std::string& name, std::size_t arity, const Functor& f, PredicateLifting::Eval eval) {
  return PredicateLifting{name, arity, f, std::move(eval)};
}

}  // namespace

std::vector<PredicateLifting> canonical_family(const Functor& f, const Quantale& q) {
  std::vector<PredicateLifting> out;
  switch (f.kind()) {
    case Functor::Kind::Identity:
      out.push_back(wrap("id", 1, f, [](const Quantale&, const Predicates& p, const FElem& e) { return p.at(0, e.index); }));
      break;
    case Functor::Kind::Powerset:
      for (auto inner : canonical_family(f.inner(), q)) {
        auto ev = inner.eval;
        out.push_back(wrap(compose_name("dia", inner.name), inner.arity, f,
                           [ev](const Quantale& q, const Predicates& p, const FElem& e) {
                             Value acc = q.bottom();
                             for (const auto& m : e.items) acc = q.join(acc, ev(q, p, m));
                             return acc;
                           }));
      }
      break;
    case Functor::Kind::Distribution:
      if (q.kind() != QuantaleKind::Luk01)
        throw UnsupportedError("the expectation lifting is only available over luk01");
      for (auto inner : canonical_family(f.inner(), q)) {
        auto ev = inner.eval;
        out.push_back(wrap(compose_name("E", inner.name), inner.arity, f,
                           [ev](const Quantale& q, const Predicates& p, const FElem& e) {
                             Rational acc = 0;
                             for (std::size_t i = 0; i < e.items.size(); ++i)
                               acc += e.weights[i] * ev(q, p, e.items[i]).as_number().value;
                             return q.number(acc);
                           }));
      }
      break;
    case Functor::Kind::Maybe:
      for (auto inner : canonical_family(f.inner(), q)) {
        auto ev = inner.eval;
        for (bool at_top : {true, false})
          out.push_back(wrap(at_top ? inner.name : inner.name + "_bot", inner.arity, f,
                             [ev, at_top](const Quantale& q, const Predicates& p, const FElem& e) {
                               if (e.index == 0) return at_top ? q.top() : q.bottom();
                               return ev(q, p, e.items[0]);
                             }));
      }
      break;
    case Functor::Kind::Labelled:
      for (std::size_t a = 0; a < f.labels().size(); ++a)
        out.push_back(wrap("is@" + f.labels()[a], 0, f, [a](const Quantale& q, const Predicates&, const FElem& e) {
          return e.index == a ? q.top() : q.bottom();
        }));
      for (auto inner : canonical_family(f.inner(), q))
        for (std::size_t a = 0; a < f.labels().size(); ++a) {
          auto ev = inner.eval;
          out.push_back(wrap(inner.name + "@" + f.labels()[a], inner.arity, f,
                             [ev, a](const Quantale& q, const Predicates& p, const FElem& e) {
                               return e.index == a ? ev(q, p, e.items[0]) : q.bottom();
                             }));
        }
      break;
    case Functor::Kind::Power:
      for (auto inner : canonical_family(f.inner(), q))
        for (std::size_t a = 0; a < f.labels().size(); ++a) {
          auto ev = inner.eval;
          out.push_back(wrap(inner.name + "@" + f.labels()[a], inner.arity, f,
                             [ev, a](const Quantale& q, const Predicates& p, const FElem& e) {
                               return ev(q, p, e.items[a]);
                             }));
        }
      break;
    case Functor::Kind::Neighbourhood:
      if (q.kind() != QuantaleKind::Bool2) throw UnsupportedError("the neighbourhood lifting needs bool2");
      out.push_back(wrap("nb", 1, f, [](const Quantale& q, const Predicates& p, const FElem& e) {
        std::vector<FElem> ext;
        for (std::size_t x = 0; x < p.size; ++x)
          if (p.at(0, x).as_bool()) ext.push_back(FElem::atom(x));
        return q.boolean(std::binary_search(e.items.begin(), e.items.end(), FElem::set(std::move(ext))));
      }));
      break;
  }
  return out;
}

PredicateLifting find_lifting(const std::vector<PredicateLifting>& family, const std::string& name) {
  for (const auto& l : family)
    if (l.name == name) return l;
  std::string known;
  for (const auto& l : family) known += (known.empty() ? "" : ", ") + l.name;
  throw ValidationError("modalities", "unknown modality '" + name + "' (known: " + known + ")");
}

std::vector<PredicateLifting> select_family(const std::vector<PredicateLifting>& family, const std::string& names) {
  if (names.empty()) return family;
  std::vector<PredicateLifting> out;
  std::size_t start = 0;
  while (start <= names.size()) {
    auto comma = names.find(',', start);
    auto item = names.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(find_lifting(family, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t value_index(const std::vector<Value>& vs, const Value& v) {
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i] == v) return i;
  throw DomainError("value not in the enumerated carrier");
}

}  // namespace

std::size_t power_carrier_size(const Quantale& q, std::size_t arity) {
  const std::size_t base = q.elements().size();
  std::size_t n = 1;
  for (std::size_t i = 0; i < arity; ++i) {
    if (n > (std::size_t{1} << 20) / base) throw BudgetError("V^κ is too large to enumerate");
    n *= base;
  }
  return n;
}

std::vector<Value> power_point(const Quantale& q, std::size_t arity, std::size_t index) {
  auto vs = q.elements();
  std::vector<Value> out;
  for (std::size_t i = 0; i < arity; ++i) {
    out.push_back(vs[index % vs.size()]);
    index /= vs.size();
  }
  return out;
}

Predicates projections(const Quantale& q, std::size_t arity) {
  const std::size_t n = power_carrier_size(q, arity);
  Predicates p{arity, n, std::vector<Value>(arity * n, q.bottom())};
  for (std::size_t x = 0; x < n; ++x) {
    auto pt = power_point(q, arity, x);
    for (std::size_t i = 0; i < arity; ++i) p.at(i, x) = pt[i];
  }
  return p;
}

std::vector<Value> yoneda_component(const PredicateLifting& l, const Quantale& q) {
  auto elems = l.functor.enumerate(power_carrier_size(q, l.arity));
  return l.apply(q, projections(q, l.arity), elems);
}

PredicateLifting lifting_from_yoneda(const std::string& name, const Functor& f, const Quantale& q,
                                     std::size_t arity, std::vector<Value> table) {
  const std::size_t n = power_carrier_size(q, arity);
  auto elems = std::make_shared<const std::vector<FElem>>(f.enumerate(n));
  if (table.size() != elems->size()) throw ShapeError("Yoneda table does not match F(V^κ)");
  auto values = std::make_shared<const std::vector<Value>>(q.elements());
  auto tab = std::make_shared<const std::vector<Value>>(std::move(table));
  return PredicateLifting{
      name, arity, f, [f, elems, values, tab, arity, n](const Quantale&, const Predicates& p, const FElem& e) {
        std::vector<std::size_t> img(p.size);
        for (std::size_t x = 0; x < p.size; ++x) {
          std::size_t idx = 0, scale = 1;
          for (std::size_t i = 0; i < arity; ++i) {
            idx += value_index(*values, p.at(i, x)) * scale;
            scale *= values->size();
          }
          img[x] = idx;
        }
        FElem image = f.map(e, MapWitness(n, std::move(img)));
        auto it = std::lower_bound(elems->begin(), elems->end(), image);
        if (it == elems->end() || !(*it == image)) throw ShapeError("element outside F(V^κ)");
        return (*tab)[static_cast<std::size_t>(it - elems->begin())];
      }};
}

void for_each_predicates(std::size_t arity, std::size_t n, const std::vector<Value>& values,
                         const std::function<bool(const Predicates&)>& visit) {
  const std::size_t slots = arity * n;
  Predicates p{arity, n, std::vector<Value>(slots, values.empty() ? Value() : values[0])};
  if (values.empty()) {
    if (slots == 0) visit(p);
    return;
  }
  std::vector<std::size_t> digit(slots, 0);
  while (true) {
    if (!visit(p)) return;
    std::size_t i = 0;
    while (i < slots && ++digit[i] == values.size()) {
      digit[i] = 0;
      p.values[i] = values[0];
      ++i;
    }
    if (i == slots) return;
    p.values[i] = values[digit[i]];
  }
}

bool is_monotone(const PredicateLifting& l, const Quantale& q, std::size_t max_size, int grid) {
  auto values = q.grid(grid);
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= max_size; ++n) {
    std::vector<FElem> elems;
    if (l.functor.enumerable()) {
      elems = l.functor.enumerate(n);
    } else {
      for (int i = 0; i < 24; ++i) elems.push_back(random_element(l.functor, n, rng));
    }
    std::vector<Predicates> all;
    for_each_predicates(l.arity, n, values, [&](const Predicates& p) {
      all.push_back(p);
      return all.size() < 4096;
    });
    std::vector<std::vector<Value>> images;
    for (const auto& p : all) images.push_back(l.apply(q, p, elems));
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = 0; j < all.size(); ++j) {
        bool below = true;
        for (std::size_t s = 0; s < all[i].values.size() && below; ++s)
          below = q.leq(all[i].values[s], all[j].values[s]);
        if (!below) continue;
        for (std::size_t e = 0; e < elems.size(); ++e)
          if (!q.leq(images[i][e], images[j][e])) return false;
      }
  }
  return true;
}

bool is_natural_at(const PredicateLifting& l, const Quantale& q, const Predicates& f, const MapWitness& g,
                   const std::vector<FElem>& elems) {
  // f: Y → V^κ, g: X → Y; compare λ(f∘g)(ξ) with λ(f)(F g ξ).
  if (f.size != g.target_size) throw ShapeError("predicates do not live on the target of the map");
  Predicates fg{f.arity, g.source_size, std::vector<Value>(f.arity * g.source_size, q.bottom())};
  for (std::size_t i = 0; i < f.arity; ++i)
    for (std::size_t x = 0; x < g.source_size; ++x) fg.at(i, x) = f.at(i, g(x));
  for (const auto& e : elems)
    if (!(l.eval(q, fg, e) == l.eval(q, f, l.functor.map(e, g)))) return false;
  return true;
}

}  // namespace qk

#include "qk/extension.hpp"

#include <memory>

namespace qk {

VRelation LaxExtension::apply(const VRelation& r, const std::vector<FElem>& left,
                              const std::vector<FElem>& right) const {
  if (bulk) return bulk(r, left, right);
  const auto& q = r.quantale;
  Carrier lc, rc;
  for (const auto& e : left) lc.push_back(functor.format(e, r.source));
  for (const auto& e : right) rc.push_back(functor.format(e, r.target));
  VRelation out(q, lc, rc, q.bottom());
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t j = 0; j < right.size(); ++j) out.at(i, j) = eval(r, left[i], right[j]);
  return out;
}

VRelation LaxExtension::apply(const VRelation& r) const {
  return apply(r, functor.enumerate(r.rows()), functor.enumerate(r.cols()));
}

namespace {

Value egli_eval(const Functor& f, EgliMode mode, bool broken, const VRelation& r, const FElem& a, const FElem& b) {
  const auto& q = r.quantale;
  auto rec = [&](const Functor& g, const FElem& x, const FElem& y) { return egli_eval(g, mode, broken, r, x, y); };
  switch (f.kind()) {
    case Functor::Kind::Identity:
      return r.at(a.index, b.index);
    case Functor::Kind::Powerset: {
      const auto& in = f.inner();
      if (broken) {
        Value acc = q.bottom();
        for (const auto& y : b.items) {
          Value all = q.top();
          for (const auto& x : a.items) all = q.meet(all, rec(in, x, y));
          acc = q.join(acc, all);
        }
        return acc;
      }
      Value result = q.top();
      if (mode != EgliMode::Upper)
        for (const auto& x : a.items) {
          Value some = q.bottom();
          for (const auto& y : b.items) some = q.join(some, rec(in, x, y));
          result = q.meet(result, some);
        }
      if (mode != EgliMode::Lower)
        for (const auto& y : b.items) {
          Value some = q.bottom();
          for (const auto& x : a.items) some = q.join(some, rec(in, x, y));
          result = q.meet(result, some);
        }
      return result;
    }
    case Functor::Kind::Labelled:
      return a.index == b.index ? rec(f.inner(), a.items[0], b.items[0]) : q.bottom();
    case Functor::Kind::Power: {
      Value acc = q.top();
      for (std::size_t i = 0; i < a.items.size(); ++i) acc = q.meet(acc, rec(f.inner(), a.items[i], b.items[i]));
      return acc;
    }
    case Functor::Kind::Maybe:
      if (a.index != b.index) return q.bottom();
      if (a.index == 0) return q.unit();
      return rec(f.inner(), a.items[0], b.items[0]);
    case Functor::Kind::Distribution:
    case Functor::Kind::Neighbourhood:
      break;
  }
  throw UnsupportedError("no Egli-Milner extension for " + f.name());
}

const char* mode_name(EgliMode m) {
  switch (m) {
    case EgliMode::Lower: return "egli-lower";
    case EgliMode::Upper: return "egli-upper";
    case EgliMode::Both: return "egli";
  }
  return "egli";
}

}  // namespace

LaxExtension egli_milner(EgliMode mode, const Functor& f) {
  LaxExtension e;
  e.name = mode_name(mode);
  e.functor = f;
  e.eval = [f, mode](const VRelation& r, const FElem& a, const FElem& b) { return egli_eval(f, mode, false, r, a, b); };
  return e;
}

LaxExtension broken_egli_fixture() {
  LaxExtension e;
  e.name = "broken-egli";
  e.functor = Functor::powerset();
  e.negative_control = true;
  Functor f = e.functor;
  e.eval = [f](const VRelation& r, const FElem& a, const FElem& b) {
    return egli_eval(f, EgliMode::Lower, true, r, a, b);
  };
  return e;
}

LaxExtension identity_extension() {
  LaxExtension e;
  e.name = "identity";
  e.functor = Functor::identity();
  e.eval = [](const VRelation& r, const FElem& a, const FElem& b) { return r.at(a.index, b.index); };
  return e;
}

LaxExtension top_extension(const Functor& f) {
  LaxExtension e;
  e.name = "top";
  e.functor = f;
  e.eval = [](const VRelation& r, const FElem&, const FElem&) { return r.quantale.top(); };
  return e;
}

namespace {

/// λ(g) and λ(r·g) for every g, on the given element lists.
VRelation kantorovich_bulk(const std::vector<PredicateLifting>& family, const Functor& f, const VRelation& r,
                           const std::vector<FElem>& left, const std::vector<FElem>& right) {
  const auto& q = r.quantale;
  if (!q.is_finite())
    throw UnsupportedError("the Kantorovich extension enumerates all V-relations and needs a finite quantale; "
                           "use a closed-form lifting for " + q.name());
  Carrier lc, rc;
  for (const auto& e : left) lc.push_back(f.format(e, r.source));
  for (const auto& e : right) rc.push_back(f.format(e, r.target));
  VRelation out(q, lc, rc, q.top());
  const auto values = q.elements();
  for (const auto& l : family) {
    for_each_predicates(l.arity, r.rows(), values, [&](const Predicates& g) {
      VRelation g_rel = g.as_relation(q, r.source);
      Predicates rg = Predicates::from_relation(compose(r, g_rel));
      auto lg = l.apply(q, g, left);
      auto lrg = l.apply(q, rg, right);
      for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = 0; j < right.size(); ++j)
          out.at(i, j) = q.meet(out.at(i, j), q.hom(lg[i], lrg[j]));
      return true;
    });
  }
  return out;
}

}  // namespace

LaxExtension kantorovich_extension(const std::vector<PredicateLifting>& family, const Functor& f) {
  LaxExtension e;
  e.name = "kantorovich-ext";
  e.functor = f;
  auto fam = std::make_shared<const std::vector<PredicateLifting>>(family);
  e.bulk = [fam, f](const VRelation& r, const std::vector<FElem>& left, const std::vector<FElem>& right) {
    return kantorovich_bulk(*fam, f, r, left, right);
  };
  e.eval = [fam, f](const VRelation& r, const FElem& a, const FElem& b) {
    return kantorovich_bulk(*fam, f, r, {a}, {b}).at(0, 0);
  };
  return e;
}

PredicateLifting induced_pl(const LaxExtension& e, std::size_t arity, const Quantale& q, std::vector<Value> row,
                            const std::string& name) {
  auto fk = std::make_shared<const std::vector<FElem>>(e.functor.enumerate(arity));
  if (row.size() != fk->size()) throw ShapeError("𝔯 must have one entry per element of Fκ");
  for (const auto& v : row) q.check(v);
  auto r = std::make_shared<const std::vector<Value>>(std::move(row));
  LaxExtension ext = e;
  return PredicateLifting{name, arity, e.functor, [ext, fk, r](const Quantale& q, const Predicates& p, const FElem& xi) {
                            VRelation f = p.as_relation(q, numbered_carrier(p.size));
                            VRelation ff = ext.apply(f, *fk, {xi});
                            Value acc = q.bottom();
                            for (std::size_t z = 0; z < fk->size(); ++z) acc = q.join(acc, q.tensor((*r)[z], ff.at(z, 0)));
                            return acc;
                          }};
}

}  // namespace qk

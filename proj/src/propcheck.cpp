#include "qk/propcheck.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

namespace qk {

void CheckReport::fail(Json witness) {
  ++failures;
  if (witnesses.size() < 5) witnesses.push_back(std::move(witness));
}

Json CheckReport::to_json() const {
  std::string status;
  if (trivial()) status = "trivial";
  else if (negative_control) status = passed() ? "control-passed" : "expected-fail";
  else status = passed() ? "pass" : "fail";
  return Json{{"check", name},
              {"status", status},
              {"instances", instances},
              {"failures", failures},
              {"exhaustive", exhaustive},
              {"partial", partial},
              {"trivial", trivial()},
              {"negative_control", negative_control},
              {"seed", seed},
              {"witnesses", witnesses}};
}

std::string CheckReport::summary() const {
  std::ostringstream out;
  const char* status = trivial() ? "TRIVIAL"
                       : negative_control ? (passed() ? "CONTROL-PASSED" : "EXPECTED-FAIL")
                                          : (passed() ? "PASS" : "FAIL");
  out << status << "  " << name << "  instances=" << instances << " failures=" << failures
      << (exhaustive ? " exhaustive" : "") << (partial ? " partial" : "");
  return out.str();
}

namespace {

/// Calls visit on every vector of `len` entries from `values`; stops when it
/// returns false. Returns false if stopped.
bool for_each_vector(const std::vector<Value>& values, std::size_t len,
                     const std::function<bool(const std::vector<Value>&)>& visit) {
  std::vector<std::size_t> idx(len, 0);
  std::vector<Value> v(len, values.front());
  while (true) {
    for (std::size_t i = 0; i < len; ++i) v[i] = values[idx[i]];
    if (!visit(v)) return false;
    std::size_t p = 0;
    while (p < len && ++idx[p] == values.size()) idx[p++] = 0;
    if (p == len) return true;
  }
}

bool for_each_map(std::size_t n, std::size_t m, const std::function<bool(const MapWitness&)>& visit) {
  std::vector<std::size_t> img(n, 0);
  while (true) {
    if (!visit(MapWitness(m, img))) return false;
    std::size_t p = 0;
    while (p < n && ++img[p] == m) img[p++] = 0;
    if (p == n) return true;
  }
}

VRelation relation(const Quantale& q, std::size_t n, std::size_t m, const std::vector<Value>& vals) {
  VRelation r(q, numbered_carrier(n, "x"), numbered_carrier(m, "y"), q.bottom());
  r.matrix = vals;
  return r;
}

/// Value range for exhaustive runs, or the grid for sampled ones.
std::vector<Value> check_values(const Quantale& q) { return q.is_finite() ? q.elements() : q.grid(4); }

std::vector<Value> random_vector(const std::vector<Value>& values, std::size_t len, std::mt19937_64& rng) {
  std::vector<Value> v;
  for (std::size_t i = 0; i < len; ++i) v.push_back(values[rng() % values.size()]);
  return v;
}

/// Graph of F f between enumerations of FX and FY.
VRelation functor_graph(const Quantale& q, const Functor& f, const MapWitness& g, const std::vector<FElem>& fx,
                        const std::vector<FElem>& fy) {
  VRelation r(q, numbered_carrier(fx.size()), numbered_carrier(fy.size()), q.bottom());
  for (std::size_t i = 0; i < fx.size(); ++i) {
    auto img = f.map(fx[i], g);
    auto it = std::lower_bound(fy.begin(), fy.end(), img);
    if (it == fy.end() || !(*it == img)) throw ShapeError("F f left the enumeration of F Y");
    r.at(i, static_cast<std::size_t>(it - fy.begin())) = q.unit();
  }
  return r;
}

std::optional<std::pair<std::size_t, std::size_t>> first_violation(const Quantale& q, const VRelation& small,
                                                                   const VRelation& big) {
  for (std::size_t i = 0; i < small.rows(); ++i)
    for (std::size_t j = 0; j < small.cols(); ++j)
      if (!q.leq(small.at(i, j), big.at(i, j))) return std::make_pair(i, j);
  return std::nullopt;
}

Json pair_witness(const Functor& f, const std::vector<FElem>& fx, const std::vector<FElem>& fy, std::size_t i,
                  std::size_t j, std::size_t n, std::size_t m) {
  return Json{{"left", felem_to_json(f, fx[i], numbered_carrier(n, "x"))},
              {"right", felem_to_json(f, fy[j], numbered_carrier(m, "y"))}};
}

Json map_json(const MapWitness& g) { return g.image; }

std::mt19937_64 instance_rng(std::uint64_t seed, std::size_t instance) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                  static_cast<std::uint32_t>(instance)};
  return std::mt19937_64(s);
}

}  // namespace

// ---------------------------------------------------------------------------

CheckReport check_lax_axioms(const LaxExtension& e, const Quantale& q, const CheckOptions& opts, std::size_t max_size) {
  CheckReport rep;
  rep.name = "lax:" + e.name + "@" + q.name();
  rep.seed = opts.seed;
  rep.negative_control = e.negative_control;
  rep.exhaustive = q.is_finite();
  const auto& f = e.functor;
  const auto values = check_values(q);
  std::mt19937_64 rng(opts.seed);

  // Stops everything once the budget is used.
  auto take = [&]() {
    if (rep.instances >= opts.budget) {
      rep.partial = true;
      rep.exhaustive = false;
      return false;
    }
    ++rep.instances;
    return true;
  };
  // Exhaustive on finite V, otherwise a bounded sample of the same shape.
  auto vectors = [&](std::size_t len, const std::function<bool(const std::vector<Value>&)>& visit) {
    if (q.is_finite()) return for_each_vector(values, len, visit);
    for (int i = 0; i < 12; ++i)
      if (!visit(random_vector(values, len, rng))) return false;
    return true;
  };

  std::vector<std::vector<FElem>> fsets;
  for (std::size_t n = 0; n <= max_size; ++n) fsets.push_back(n ? f.enumerate(n) : std::vector<FElem>{});

  // L3, both halves
  for (std::size_t n = 1; n <= max_size; ++n)
    for (std::size_t m = 1; m <= max_size; ++m) {
      bool go = for_each_map(n, m, [&](const MapWitness& g) {
        if (!take()) return false;
        auto gr = graph(q, g, numbered_carrier(n, "x"), numbered_carrier(m, "y"));
        auto ff = functor_graph(q, f, g, fsets[n], fsets[m]);
        if (auto v = first_violation(q, ff, e.apply(gr))) {
          auto w = pair_witness(f, fsets[n], fsets[m], v->first, v->second, n, m);
          w["axiom"] = "L3";
          w["map"] = map_json(g);
          rep.fail(w);
        }
        if (auto v = first_violation(q, converse(ff), e.apply(converse(gr)))) {
          auto w = pair_witness(f, fsets[m], fsets[n], v->first, v->second, m, n);
          w["axiom"] = "L3-converse";
          w["map"] = map_json(g);
          rep.fail(w);
        }
        return true;
      });
      if (!go) return rep;
    }

  // L1
  for (std::size_t n = 1; n <= max_size; ++n)
    for (std::size_t m = 1; m <= max_size; ++m) {
      bool go = vectors(n * m, [&](const std::vector<Value>& a) {
        auto r = relation(q, n, m, a);
        auto fr = e.apply(r);
        return vectors(n * m, [&](const std::vector<Value>& b) {
          auto r2 = relation(q, n, m, b);
          if (!r.leq(r2)) return true;
          if (!take()) return false;
          if (auto v = first_violation(q, fr, e.apply(r2))) {
            auto w = pair_witness(f, fsets[n], fsets[m], v->first, v->second, n, m);
            w["axiom"] = "L1";
            w["r"] = relation_to_json(r);
            w["r2"] = relation_to_json(r2);
            rep.fail(w);
          }
          return true;
        });
      });
      if (!go) return rep;
    }

  // L2
  for (std::size_t n = 1; n <= max_size; ++n)
    for (std::size_t m = 1; m <= max_size; ++m)
      for (std::size_t p = 1; p <= max_size; ++p) {
        bool go = vectors(n * m, [&](const std::vector<Value>& a) {
          auto r = relation(q, n, m, a);
          auto fr = e.apply(r);
          return vectors(m * p, [&](const std::vector<Value>& b) {
            if (!take()) return false;
            VRelation s(q, numbered_carrier(m, "y"), numbered_carrier(p, "z"), q.bottom());
            s.matrix = b;
            auto lhs = compose(e.apply(s), fr);
            auto rhs = e.apply(compose(s, r));
            if (auto v = first_violation(q, lhs, rhs)) {
              rep.fail(Json{{"axiom", "L2"},
                            {"r", relation_to_json(r)},
                            {"s", relation_to_json(s)},
                            {"left", felem_to_json(f, fsets[n][v->first], numbered_carrier(n, "x"))},
                            {"right", felem_to_json(f, fsets[p][v->second], numbered_carrier(p, "z"))}});
            }
            return true;
          });
        });
        if (!go) return rep;
      }

  return rep;
}

// ---------------------------------------------------------------------------

namespace {

VCategory random_category(const Quantale& q, std::size_t n, std::mt19937_64& rng) {
  auto values = check_values(q);
  std::vector<Value> m(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      // lean towards ⊥ so structures are not all indiscrete
      m[x * n + y] = x == y ? q.top() : (rng() % 3 == 0 ? q.bottom() : values[rng() % values.size()]);
    }
  return transitive_closure(VCategory(q, numbered_carrier(n, "y"), m));
}

std::vector<FElem> sample_elements(const Functor& f, std::size_t n, std::mt19937_64& rng) {
  if (f.enumerable()) {
    auto all = f.enumerate(n);
    if (all.size() <= 16) return all;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(10);
    return all;
  }
  std::vector<FElem> out;
  for (int i = 0; i < 8; ++i) out.push_back(random_element(f, n, rng));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// (2, 1_2) ↪ (3, ∨) with 2 ≤ 1 and 2 ≤ 0; ⊤ entries become k.
std::pair<VCategory, VCategory> chain_inclusion(const Quantale& q) {
  const auto k = q.unit(), b = q.bottom();
  VCategory small(q, numbered_carrier(2, "x"), {k, b, b, k});
  VCategory big(q, numbered_carrier(3, "y"), {k, b, b, b, k, b, k, k, k});
  return {small, big};
}

}  // namespace

CheckReport check_preserves_initial(const Lifting& l, const Quantale& q, const CheckOptions& opts) {
  CheckReport rep;
  rep.name = "initial:" + l.name + "@" + q.name();
  rep.seed = opts.seed;
  const auto& f = l.functor;

  for (std::size_t i = 0; i < opts.budget; ++i) {
    auto rng = instance_rng(opts.seed, i);
    VCategory source, target;
    MapWitness g;
    std::string kind = "random";
    if (i == 0) {
      std::tie(source, target) = chain_inclusion(q);
      g = MapWitness(3, {0, 1});
      kind = "chain-inclusion";
    } else if (i == 1) {
      target = discrete(q, numbered_carrier(1, "y"));
      g = MapWitness(1, {0, 0});
      source = restrict_along(g, target, numbered_carrier(2, "x"));
      kind = "collapse";
    } else {
      std::size_t m = 1 + rng() % 3, n = 1 + rng() % 3;
      target = random_category(q, m, rng);
      std::vector<std::size_t> img;
      for (std::size_t x = 0; x < n; ++x) img.push_back(rng() % m);
      g = MapWitness(m, img);
      source = restrict_along(g, target, numbered_carrier(n, "x"));
    }
    ++rep.instances;
    auto fx = sample_elements(f, source.size(), rng);
    std::vector<FElem> fy;
    for (const auto& e : fx) fy.push_back(f.map(e, g));
    auto a = l.apply(source, fx);
    auto b = l.apply(target, fy);
    for (std::size_t x = 0; x < fx.size(); ++x)
      for (std::size_t y = 0; y < fx.size(); ++y)
        if (!(a.at(x, y) == b.at(x, y))) {
          rep.fail(Json{{"instance", i},
                        {"kind", kind},
                        {"source", category_to_json(source)},
                        {"target", category_to_json(target)},
                        {"map", map_json(g)},
                        {"left", felem_to_json(f, fx[x], source.carrier)},
                        {"right", felem_to_json(f, fx[y], source.carrier)},
                        {"source_value", q.format(a.at(x, y))},
                        {"target_value", q.format(b.at(x, y))}});
          x = fx.size();
          break;
        }
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

/// All V-categories on n points with values in `values`.
std::vector<VCategory> all_categories(const Quantale& q, std::size_t n) {
  std::vector<VCategory> out;
  for_each_vector(q.elements(), n * n, [&](const std::vector<Value>& m) {
    VCategory c(q, numbered_carrier(n, "x"), m);
    if (validate_category(c).is_category) out.push_back(c);
    return true;
  });
  return out;
}

}  // namespace

CheckReport check_galois_lifting(const Lifting& l, const Quantale& q, const CheckOptions& opts, std::size_t max_size,
                                 std::size_t max_arity) {
  CheckReport rep;
  rep.name = "galois-lifting:" + l.name + "@" + q.name();
  rep.seed = opts.seed;
  rep.exhaustive = true;
  if (!q.is_finite() || !l.functor.enumerable())
    throw UnsupportedError("the Galois round trip needs a finite quantale and an enumerable functor");
  const auto& f = l.functor;
  const auto values = q.elements();

  // For each arity: F(V^κ), F̄(V^κ), and the meet over every compatible
  // table t of hom(t(p), t(p')).
  struct Level {
    std::size_t arity;
    std::vector<FElem> elems;
    std::vector<Value> meet;  // |elems|²
  };
  std::vector<Level> levels;
  std::size_t compatible = 0;
  for (std::size_t k = 1; k <= max_arity; ++k) {
    VCategory vk = power(value_category(q, values), k);
    Level lv{k, f.enumerate(vk.size()), {}};
    auto lifted = l.apply(vk, lv.elems);
    auto tables = vfunctors_to_v(lifted, values);
    compatible += tables.size();
    const std::size_t s = lv.elems.size();
    lv.meet.assign(s * s, q.top());
    for (const auto& t : tables)
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) lv.meet[i * s + j] = q.meet(lv.meet[i * s + j], q.hom(t[i], t[j]));
    levels.push_back(std::move(lv));
  }

  for (std::size_t n = 1; n <= max_size; ++n) {
    auto fx = f.enumerate(n);
    const std::size_t s = fx.size();
    for (const auto& c : all_categories(q, n)) {
      if (rep.instances >= opts.budget) {
        rep.partial = true;
        rep.exhaustive = false;
        break;
      }
      ++rep.instances;
      auto expected = l.apply(c, fx);
      std::vector<Value> got(s * s, q.top());
      auto funcs = vfunctors_to_v(c, values);
      for (const auto& lv : levels) {
        // every κ-tuple of V-functors X → V, bundled into X → V^κ
        std::vector<std::size_t> idx(lv.arity, 0);
        while (true) {
          std::vector<std::size_t> img(n, 0);
          for (std::size_t x = 0; x < n; ++x) {
            std::size_t code = 0, scale = 1;
            for (std::size_t i = 0; i < lv.arity; ++i) {
              const auto& v = funcs[idx[i]][x];
              code += scale * static_cast<std::size_t>(std::find(values.begin(), values.end(), v) - values.begin());
              scale *= values.size();
            }
            img[x] = code;
          }
          MapWitness g(power_carrier_size(q, lv.arity), img);
          std::vector<std::size_t> pos(s);
          for (std::size_t a = 0; a < s; ++a) {
            auto e = f.map(fx[a], g);
            pos[a] = static_cast<std::size_t>(std::lower_bound(lv.elems.begin(), lv.elems.end(), e) - lv.elems.begin());
          }
          const std::size_t ls = lv.elems.size();
          for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = 0; b < s; ++b) got[a * s + b] = q.meet(got[a * s + b], lv.meet[pos[a] * ls + pos[b]]);
          std::size_t p = 0;
          while (p < lv.arity && ++idx[p] == funcs.size()) idx[p++] = 0;
          if (p == lv.arity) break;
        }
      }
      for (std::size_t a = 0; a < s * s; ++a)
        if (!(got[a] == expected.matrix[a])) {
          rep.fail(Json{{"category", category_to_json(c)},
                        {"left", felem_to_json(f, fx[a / s], c.carrier)},
                        {"right", felem_to_json(f, fx[a % s], c.carrier)},
                        {"lifting_value", q.format(expected.matrix[a])},
                        {"roundtrip_value", q.format(got[a])},
                        {"compatible_liftings", compatible}});
          break;
        }
    }
  }
  return rep;
}

CheckReport check_galois_family(const std::vector<PredicateLifting>& family, const Functor& f, const Quantale& q,
                                const CheckOptions& opts) {
  CheckReport rep;
  rep.name = "galois-family:" + f.name() + "@" + q.name();
  rep.seed = opts.seed;
  rep.exhaustive = q.is_finite();
  auto lift = kantorovich_lift(family, f);
  for (const auto& l : family) {
    if (rep.instances >= opts.budget) {
      rep.partial = true;
      rep.exhaustive = false;
      break;
    }
    ++rep.instances;
    auto c = compatibility_check(l, lift, q);
    if (!c.yoneda_vfunctor || !c.restricts)
      rep.fail(Json{{"modality", l.name}, {"yoneda_vfunctor", c.yoneda_vfunctor}, {"restricts", c.restricts}});
  }
  return rep;
}

CheckReport check_galois_extension(const LaxExtension& e, const Quantale& q, const CheckOptions& opts,
                                   std::size_t max_size, std::size_t max_arity) {
  CheckReport rep;
  rep.name = "galois-extension:" + e.name + "@" + q.name();
  rep.seed = opts.seed;
  rep.negative_control = e.negative_control;
  rep.exhaustive = true;
  if (!q.is_finite() || !e.functor.enumerable())
    throw UnsupportedError("the extension round trip needs a finite quantale and an enumerable functor");
  const auto& f = e.functor;
  const auto values = q.elements();

  std::vector<PredicateLifting> induced;
  for (std::size_t k = 1; k <= max_arity; ++k) {
    const std::size_t fk = f.enumerate(k).size();
    for_each_vector(values, fk, [&](const std::vector<Value>& row) {
      induced.push_back(induced_pl(e, k, q, row, "r" + std::to_string(induced.size())));
      return true;
    });
  }
  auto kext = kantorovich_extension(induced, f);

  for (std::size_t n = 1; n <= max_size; ++n)
    for (std::size_t m = 1; m <= max_size; ++m) {
      bool go = for_each_vector(values, n * m, [&](const std::vector<Value>& a) {
        if (rep.instances >= opts.budget) {
          rep.partial = true;
          rep.exhaustive = false;
          return false;
        }
        ++rep.instances;
        auto r = relation(q, n, m, a);
        auto lhs = e.apply(r);
        auto rhs = kext.apply(r);
        if (!(lhs == rhs)) {
          std::size_t i = 0;
          while (i < lhs.matrix.size() && lhs.matrix[i] == rhs.matrix[i]) ++i;
          auto fx = f.enumerate(n), fy = f.enumerate(m);
          auto w = pair_witness(f, fx, fy, i / fy.size(), i % fy.size(), n, m);
          w["r"] = relation_to_json(r);
          w["extension_value"] = q.format(lhs.matrix[i]);
          w["roundtrip_value"] = q.format(rhs.matrix[i]);
          rep.fail(w);
        }
        return true;
      });
      if (!go) return rep;
    }
  return rep;
}

CheckReport check_enriched(const LaxExtension& e, const Quantale& q, const std::vector<Value>& grid,
                           const CheckOptions& opts, std::size_t max_size) {
  CheckReport rep;
  rep.name = "enriched:" + e.name + "@" + q.name();
  rep.seed = opts.seed;
  rep.negative_control = e.negative_control;
  rep.exhaustive = q.is_finite();
  for (std::size_t n = 1; n <= max_size; ++n) {
    auto fx = e.functor.enumerate(n);
    for (const auto& u : grid) {
      if (rep.instances >= opts.budget) {
        rep.partial = true;
        rep.exhaustive = false;
        return rep;
      }
      ++rep.instances;
      auto lhs = scale(u, identity_relation(q, numbered_carrier(fx.size())));
      auto rhs = e.apply(scale(u, identity_relation(q, numbered_carrier(n, "x"))));
      if (auto v = first_violation(q, lhs, rhs)) {
        auto w = pair_witness(e.functor, fx, fx, v->first, v->second, n, n);
        w["u"] = q.format(u);
        rep.fail(w);
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<LiftingCase> registered_liftings() {
  auto b = Quantale::bool2();
  auto l = Quantale::luk01();
  auto p = Functor::powerset();
  auto d = Functor::distribution();
  auto md = Functor::maybe(d);
  auto lts = Functor::powerset(Functor::labelled({"a", "b"}, Functor::identity()));
  std::vector<LiftingCase> out{
      {parse_lifting("kantorovich", p, b), b, false},
      {parse_lifting("sym∘kantorovich", p, b), b, false},
      {parse_lifting("kantorovich", lts, b), b, false},
      {parse_lifting("kantorovich", p, l), l, false},
      {parse_lifting("kantorovich:E", d, l), l, false},
      {parse_lifting("kantorovich", md, l), l, false},
      {parse_lifting("egli-lower", p, b), b, false},
      {parse_lifting("id", Functor::identity(), b), b, false},
      {parse_lifting("discrete", Functor::identity(), b), b, true},
      {parse_lifting("equiv", Functor::identity(), b), b, true},
      {parse_lifting("tv", d, l), l, true},
  };
  return out;
}

std::vector<CheckReport> run_suite(const std::string& suite, const CheckOptions& opts) {
  const bool all = suite == "all";
  if (!all && suite != "lax" && suite != "initial" && suite != "galois" && suite != "enriched")
    throw ValidationError("suite", "unknown suite '" + suite + "' (lax, initial, galois, enriched, all)");
  auto b = Quantale::bool2();
  auto l = Quantale::luk01();
  auto p = Functor::powerset();
  std::vector<CheckReport> out;

  if (all || suite == "lax") {
    for (auto mode : {EgliMode::Lower, EgliMode::Upper, EgliMode::Both}) {
      out.push_back(check_lax_axioms(egli_milner(mode), b, opts));
      out.push_back(check_lax_axioms(egli_milner(mode), l, opts));
    }
    out.push_back(check_lax_axioms(kantorovich_extension(canonical_family(p, b), p), b, opts));
    out.push_back(check_lax_axioms(broken_egli_fixture(), b, opts));
  }
  if (all || suite == "initial") {
    for (const auto& c : registered_liftings()) {
      auto rep = check_preserves_initial(c.lifting, c.quantale, opts);
      rep.negative_control = c.negative_control;
      out.push_back(std::move(rep));
    }
  }
  if (all || suite == "galois") {
    out.push_back(check_galois_lifting(parse_lifting("egli-lower", p, b), b, opts));
    out.push_back(check_galois_family(canonical_family(p, b), p, b, opts));
    for (auto mode : {EgliMode::Lower, EgliMode::Upper, EgliMode::Both})
      out.push_back(check_galois_extension(egli_milner(mode), b, opts));
  }
  if (all || suite == "enriched") {
    out.push_back(check_enriched(egli_milner(EgliMode::Lower), l, l.grid(4), opts));
    out.push_back(check_enriched(egli_milner(EgliMode::Both), b, b.elements(), opts));
    out.push_back(check_enriched(kantorovich_extension(canonical_family(p, b), p), b, b.elements(), opts));
  }
  for (auto& r : out) r.witnesses.resize(std::min(r.witnesses.size(), opts.max_witnesses));
  return out;
}

}  // namespace qk

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qk/enriched.hpp"
#include "qk/functor.hpp"
#include "qk/quantale.hpp"

namespace qk {

/// A κ-tuple of V-valued predicates on X, equivalently a V-relation κ↛X.
struct Predicates {
  std::size_t arity = 0;
  std::size_t size = 0;  // |X|
  std::vector<Value> values;  // arity × size

  const Value& at(std::size_t i, std::size_t x) const { return values[i * size + x]; }
  Value& at(std::size_t i, std::size_t x) { return values[i * size + x]; }

  VRelation as_relation(const Quantale& q, const Carrier& x) const;
  static Predicates from_relation(const VRelation& r);
};

/// A κ-ary predicate lifting, stored as an evaluator λ_X(f)(ξ).
struct PredicateLifting {
  using Eval = std::function<Value(const Quantale&, const Predicates&, const FElem&)>;

  std::string name;
  std::size_t arity = 1;
  Functor functor = Functor::identity();
  Eval eval;

  /// λ_X(f) as a predicate on the listed elements.
  std::vector<Value> apply(const Quantale& q, const Predicates& f, const std::vector<FElem>& elems) const;
};

/// The built-in family for a functor and quantale:
///   id                       identity functor
///   dia                      powerset, ⋁ over the members (inner family composed)
///   E                        distributions over luk01, expectation
///   <name>, <name>_bot       1+F, termination sent to ⊤ or ⊥
///   is@a, <name>@a           A×F, label test, and the inner family on
///                            label a (⊥ on other labels)
///   <name>@a                 F^A, inner family at component a
///   nb                       neighbourhood over bool2 (not monotone)
/// Names compose: "dia@a" on powerset(A×id), "E_bot@a" on (1+dist)^A,
/// "dia.is@a" for the label test under a powerset.
std::vector<PredicateLifting> canonical_family(const Functor& f, const Quantale& q);
PredicateLifting find_lifting(const std::vector<PredicateLifting>& family, const std::string& name);
/// Subfamily by comma-separated names; an empty string selects everything.
std::vector<PredicateLifting> select_family(const std::vector<PredicateLifting>& family, const std::string& names);

/// Carrier of V^κ for a finite V: tuples indexed in base |V|, first
/// coordinate least significant.
std::size_t power_carrier_size(const Quantale& q, std::size_t arity);
std::vector<Value> power_point(const Quantale& q, std::size_t arity, std::size_t index);
/// The projections V^κ → V as a κ-tuple of predicates.
Predicates projections(const Quantale& q, std::size_t arity);

/// λ_{V^κ}(projections) on the enumerated F(V^κ).
std::vector<Value> yoneda_component(const PredicateLifting& l, const Quantale& q);
/// The lifting λ_X(f)(ξ) = table[F f̂ (ξ)] where f̂: X → V^κ bundles the
/// predicates. Needs finite V and enumerable F.
PredicateLifting lifting_from_yoneda(const std::string& name, const Functor& f, const Quantale& q,
                                     std::size_t arity, std::vector<Value> table);

/// Pointwise monotonicity in each predicate, checked exhaustively over
/// carriers of size ≤ max_size (grid values for infinite V).
bool is_monotone(const PredicateLifting& l, const Quantale& q, std::size_t max_size = 2, int grid = 4);

/// λ(f ∘ g) = λ(f) ∘ F g for the given map and predicates.
bool is_natural_at(const PredicateLifting& l, const Quantale& q, const Predicates& f, const MapWitness& g,
                   const std::vector<FElem>& elems);

/// All κ-tuples of predicates on an n-element set with values in `values`.
/// Visits each; stops early when the visitor returns false.
void for_each_predicates(std::size_t arity, std::size_t n, const std::vector<Value>& values,
                         const std::function<bool(const Predicates&)>& visit);

}  // namespace qk

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qk/enriched.hpp"
#include "qk/functor.hpp"
#include "qk/predicate.hpp"

namespace qk {

/// A rule r: X↛Y ↦ F̂r: FX↛FY, evaluated entrywise on F-elements.
struct LaxExtension {
  using Eval = std::function<Value(const VRelation&, const FElem&, const FElem&)>;
  using Bulk = std::function<VRelation(const VRelation&, const std::vector<FElem>&, const std::vector<FElem>&)>;

  std::string name;
  Functor functor = Functor::identity();
  Eval eval;
  /// Optional whole-matrix evaluation, used by apply() when present.
  Bulk bulk;
  /// Intentionally broken fixtures used to test the checkers.
  bool negative_control = false;

  VRelation apply(const VRelation& r, const std::vector<FElem>& left, const std::vector<FElem>& right) const;
  /// F̂r on all of FX × FY (enumerable functors only).
  VRelation apply(const VRelation& r) const;
};

enum class EgliMode { Lower, Upper, Both };

/// Egli-Milner extension. Powerset nodes use the chosen half; the other
/// nodes use the structural extension (label equality, componentwise meet,
/// termination to k and mismatched summands to ⊥).
LaxExtension egli_milner(EgliMode mode, const Functor& f = Functor::powerset());
LaxExtension identity_extension();
/// The constant ⊤ rule, the largest lax extension.
LaxExtension top_extension(const Functor& f);

/// F̂^Λ r(ξ,η) = ⋀_{λ∈Λ} ⋀_{g: κ↛X} hom(λ(g)(ξ), λ(r·g)(η)). Needs a finite
/// quantale; the evaluation throws UnsupportedError otherwise.
LaxExtension kantorovich_extension(const std::vector<PredicateLifting>& family, const Functor& f);

/// λ(f) = F̂f · 𝔯 for 𝔯: 1↛Fκ given on the enumerated Fκ.
PredicateLifting induced_pl(const LaxExtension& e, std::size_t arity, const Quantale& q, std::vector<Value> row,
                            const std::string& name = "induced");

/// Negative control: the lower half with its quantifiers swapped,
/// ⋁_{b∈B} ⋀_{a∈A} r(a,b). Monotone but not compatible with functions.
LaxExtension broken_egli_fixture();

}  // namespace qk

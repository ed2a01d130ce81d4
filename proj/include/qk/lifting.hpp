#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qk/enriched.hpp"
#include "qk/extension.hpp"
#include "qk/functor.hpp"
#include "qk/predicate.hpp"

namespace qk {

/// A lifting of a set functor to V-categories, evaluated on a chosen list of
/// elements of F X (initial structures are pointwise, so restricting is
/// exact for every construction here).
struct Lifting {
  /// Structure on `elems` (already duplicate-free), row-major.
  using Rule = std::function<std::vector<Value>(const VCategory&, const std::vector<FElem>&)>;

  std::string name;
  Functor functor = Functor::identity();
  Rule rule;
  /// Known to preserve initial morphisms (Kantorovich liftings, liftings
  /// induced by lax extensions, and composites of those).
  bool preserves_initial = false;

  VCategory apply(const VCategory& c, const std::vector<FElem>& elems) const;
  /// The lifted structure on all of F X (enumerable functors only).
  VCategory apply(const VCategory& c) const;
};

enum class KantorovichMethod {
  Auto,        // Enumerate on finite quantales, ClosedForm otherwise
  Enumerate,   // initial structure w.r.t. all λ(f), f: X → V^κ a V-functor
  Residual,    // ⋀ over distributors r: κ ⇸ X of λ(r) ⊸ λ(r)
  Extension,   // ⋀ over all g: κ↛X of λ(a·g) ⊸ λ(g) (monotone λ only)
  ClosedForm,  // registered closed forms for the canonical families
};

/// The Kantorovich lifting F^Λ. ClosedForm needs Λ to be the whole canonical
/// family of `f` (see canonical_family).
Lifting kantorovich_lift(const std::vector<PredicateLifting>& family, const Functor& f,
                         KantorovichMethod method = KantorovichMethod::Auto);

/// Liftings of the identity functor: "id", "discrete", "dual", "sym",
/// "equiv" (smallest equivalence containing the natural order, valued ⊤/⊥).
Lifting identity_lift(const std::string& kind);
Lifting from_extension(const LaxExtension& e);
/// Total variation on finite distributions over luk01.
Lifting tv_lifting();
/// outer ∘ inner. At most one of the two may lift a functor other than the
/// identity.
Lifting compose_liftings(const Lifting& outer, const Lifting& inner);

/// Parses a lifting string such as "kantorovich:E", "tv", "egli-lower",
/// "sym∘kantorovich", "kantorovich∘discrete" ("~" also composes).
Lifting parse_lifting(const std::string& text, const Functor& f, const Quantale& q);

struct CompatibilityReport {
  bool yoneda_vfunctor = false;     // λ(1_{V^κ}) is a V-functor F̄(V^κ) → V
  bool restricts = false;           // λ(f) is a V-functor for all tested V-functors f
  bool grid_restricted = false;     // V^κ replaced by a finite grid
  std::size_t instances = 0;
};

/// Compatibility of λ with a lifting. On infinite quantales V^κ is
/// replaced by grid^κ and the report says so.
CompatibilityReport compatibility_check(const PredicateLifting& l, const Lifting& lifting, const Quantale& q,
                                        int grid = 4);

/// All V-functors (X,a) → V with values in `values`.
std::vector<std::vector<Value>> vfunctors_to_v(const VCategory& c, const std::vector<Value>& values,
                                              std::size_t max_count = 1 << 20);

}  // namespace qk

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qk/enriched.hpp"
#include "qk/extension.hpp"
#include "qk/functor.hpp"
#include "qk/lifting.hpp"

namespace qk {

/// α: X → F X on a finite state space. `states` carries the structure the
/// system lives on (discrete unless a metric was supplied).
struct Coalgebra {
  Functor functor = Functor::powerset();
  VCategory states;
  std::vector<FElem> alpha;

  std::size_t size() const { return states.size(); }
  const Quantale& quantale() const { return states.quantale; }
  /// Throws ValidationError if some α(x) is not in F X.
  void validate() const;
};

struct MorphismCheck {
  bool ok = true;
  std::optional<std::size_t> witness;  // a state where β(f x) ≠ F f(α x)
};

MorphismCheck is_coalgebra_morphism(const MapWitness& f, const Coalgebra& c1, const Coalgebra& c2);

struct DistanceOptions {
  Rational epsilon = Rational(1, 1000000);
  std::size_t max_iter = 500;
  /// Keep iterating at least this many rounds even after stabilizing (used
  /// to compare iterates with depth-bounded logical distance).
  std::size_t min_iter = 0;
  /// Start from the state structure instead of the indiscrete one.
  bool start_from_states = false;
};

struct DistanceResult {
  VCategory matrix;
  std::size_t iterations = 0;
  bool converged = false;
  /// 0 for exact fixpoints; the tolerance when stopped numerically.
  Rational epsilon_used = 0;
  /// Every iterate (a_0, a_1, ...), kept for monotonicity checks.
  std::vector<VCategory> trace;
};

/// Greatest fixpoint of a ↦ L(a)(α·, α·) ∧ a, iterated from ⊤.
DistanceResult behavioural_distance(const Coalgebra& c, const Lifting& l, const DistanceOptions& opts = {});

/// Two-valued relation on the states, row-major.
struct StateRelation {
  std::size_t n = 0;
  std::vector<bool> rel;
  bool operator()(std::size_t x, std::size_t y) const { return rel[x * n + y]; }
  friend bool operator==(const StateRelation&, const StateRelation&) = default;
};

/// Partition refinement (symmetric: bisimilarity) or the simulation
/// preorder (asymmetric: (x,y) iff y simulates x). Bool2 and the functors
/// powerset, powerset(A×id) and powerset^A only.
StateRelation bisimilarity_oracle(const Coalgebra& c, bool symmetric);

/// The k-level {(x,y) | k ≤ d(x,y)} of a structure.
StateRelation k_level(const VCategory& d);

/// s(x,y) ≤ F̂s(α x, α y) for all x, y.
bool is_simulation(const VRelation& s, const Coalgebra& c, const LaxExtension& e);

/// Greatest simulation, by the same descending iteration.
VRelation greatest_simulation(const Coalgebra& c, const LaxExtension& e, std::size_t max_iter = 500);

}  // namespace qk

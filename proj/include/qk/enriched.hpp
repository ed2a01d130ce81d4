#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qk/quantale.hpp"

namespace qk {

using Carrier = std::vector<std::string>;

/// Carrier {"0", "1", ..., "n-1"}.
Carrier numbered_carrier(std::size_t n, const std::string& prefix = "");

/// A V-valued matrix r: X × Y → V between two finite carriers.
struct VRelation {
  Quantale quantale = Quantale::bool2();
  Carrier source;
  Carrier target;
  std::vector<Value> matrix;  // row-major, source × target

  VRelation() = default;
  /// Constant relation with every entry equal to `fill`.
  VRelation(Quantale q, Carrier source, Carrier target, const Value& fill);

  std::size_t rows() const { return source.size(); }
  std::size_t cols() const { return target.size(); }
  const Value& at(std::size_t i, std::size_t j) const { return matrix[i * cols() + j]; }
  Value& at(std::size_t i, std::size_t j) { return matrix[i * cols() + j]; }

  /// Pointwise order r ≤ s.
  bool leq(const VRelation& other) const;
  friend bool operator==(const VRelation& a, const VRelation& b);
};

/// A finite V-category (X, a). The structure is not validated on
/// construction; use `validate_category`.
struct VCategory {
  Quantale quantale = Quantale::bool2();
  Carrier carrier;
  std::vector<Value> matrix;

  VCategory() = default;
  VCategory(Quantale q, Carrier carrier, std::vector<Value> matrix);

  std::size_t size() const { return carrier.size(); }
  const Value& at(std::size_t x, std::size_t y) const { return matrix[x * size() + y]; }
  Value& at(std::size_t x, std::size_t y) { return matrix[x * size() + y]; }

  VRelation as_relation() const;
  static VCategory from_relation(const VRelation& r);

  friend bool operator==(const VCategory& a, const VCategory& b);
};

/// A total function between finite carriers, by index.
struct MapWitness {
  std::size_t source_size = 0;
  std::size_t target_size = 0;
  std::vector<std::size_t> image;

  MapWitness() = default;
  MapWitness(std::size_t target_size, std::vector<std::size_t> image);

  std::size_t operator()(std::size_t x) const { return image[x]; }
  static MapWitness identity(std::size_t n);
  /// g ∘ f
  static MapWitness compose(const MapWitness& g, const MapWitness& f);
  void validate() const;
};

struct CategoryReport {
  bool is_category = false;
  bool is_symmetric = false;
  bool is_separated = false;
  /// natural_order[x * n + y] iff k ≤ a(x,y)
  std::vector<bool> natural_order;
  std::vector<std::size_t> reflexivity_failures;
  /// (x, y, z) with a(x,y) ⊗ a(y,z) ≰ a(x,z)
  std::vector<std::array<std::size_t, 3>> transitivity_failures;
};

CategoryReport validate_category(const VCategory& c);

VRelation identity_relation(const Quantale& q, const Carrier& x);
/// The graph of f, sending pairs (x, f x) to k and everything else to ⊥.
VRelation graph(const Quantale& q, const MapWitness& f, const Carrier& source, const Carrier& target);

/// (s · r)(x,z) = ⋁_y r(x,y) ⊗ s(y,z), for r: X↛Y and s: Y↛Z.
VRelation compose(const VRelation& s, const VRelation& r);
VRelation converse(const VRelation& r);
/// r ⊸ s : Z↛Y for r: X↛Y and s: X↛Z, the largest t with t · s ≤ r.
VRelation kan_extension(const VRelation& r, const VRelation& s);
VRelation meet(const VRelation& a, const VRelation& b);
/// (u ⊗ r)(x,y) = u ⊗ r(x,y)
VRelation scale(const Value& u, const VRelation& r);

struct ConeLeg {
  MapWitness map;
  VCategory target;
};

/// a(x,y) = ⋀_i a_i(f_i x, f_i y). The empty cone yields the indiscrete
/// structure.
VCategory initial_structure(const Quantale& q, const Carrier& carrier, std::span<const ConeLeg> cone);

/// Initial structure w.r.t. predicates p_i: X → V^κ given as relations
/// p_i♭ : κ↛X, computed as ⋀_i p_i♭ ⊸ p_i♭.
VCategory initial_structure_residual(const Quantale& q, const Carrier& carrier,
                                     std::span<const VRelation> flat_predicates);

bool is_vfunctor(const MapWitness& f, const VCategory& dom, const VCategory& cod);
bool is_initial_morphism(const MapWitness& f, const VCategory& dom, const VCategory& cod);

/// a_s(x,y) = a(x,y) ∧ a(y,x)
VCategory symmetrize(const VCategory& c);
VCategory dualize(const VCategory& c);
VCategory discrete(const Quantale& q, const Carrier& carrier);
VCategory indiscrete(const Quantale& q, const Carrier& carrier);

/// (X,a)^S with S = {0..exponent-1}: functions S → X under the pointwise
/// meet. Throws BudgetError when |X|^|S| exceeds `max_size`.
VCategory power(const VCategory& c, std::size_t exponent, std::size_t max_size = 4096);

/// (V, hom) restricted to the given values.
VCategory value_category(const Quantale& q, std::span<const Value> values);

/// Pullback of a structure along a map: a(x,y) = b(f x, f y).
VCategory restrict_along(const MapWitness& f, const VCategory& cod, const Carrier& carrier);

/// Smallest V-category structure above the given reflexive matrix.
/// (Transitive closure under ⊗; terminates on the finite and rational
/// quantales because each pass only composes existing entries.)
VCategory transitive_closure(VCategory c);

std::string format_matrix(const Quantale& q, const Carrier& rows, const Carrier& cols,
                          std::span<const Value> matrix);

}  // namespace qk

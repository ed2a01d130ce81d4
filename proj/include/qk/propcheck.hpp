#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qk/extension.hpp"
#include "qk/io.hpp"
#include "qk/lifting.hpp"

namespace qk {

struct CheckOptions {
  std::uint64_t seed = 1;
  /// Instance cap. Exhaustive runs stop (and are flagged partial) past it.
  std::size_t budget = 2000;
  /// Witnesses kept per report; every failure is still counted.
  std::size_t max_witnesses = 5;
};

struct CheckReport {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::vector<Json> witnesses;
  bool exhaustive = false;
  bool partial = false;
  std::uint64_t seed = 0;
  /// Expected to fail: a deliberately broken fixture or a lifting known not
  /// to have the property.
  bool negative_control = false;

  bool passed() const { return failures == 0; }
  bool trivial() const { return instances == 0; }
  /// Pass for ordinary checks, failure for negative controls; trivial runs
  /// count as expected.
  bool as_expected() const { return trivial() || (negative_control ? !passed() : passed()); }

  void fail(Json witness);
  Json to_json() const;
  std::string summary() const;
};

/// L1, L2 and both halves of L3 on carriers of at most `max_size` points.
/// Exhaustive on finite quantales; grid-sampled otherwise.
CheckReport check_lax_axioms(const LaxExtension& e, const Quantale& q, const CheckOptions& opts = {},
                             std::size_t max_size = 2);

/// Images of initial morphisms under the lifting are initial. Instances:
/// the inclusion (2,1_2) ↪ (3,∨), the collapse of an indiscrete pair onto a
/// point, then random maps into random V-categories with the pulled-back
/// structure. Witnesses replay from (seed, instance).
CheckReport check_preserves_initial(const Lifting& l, const Quantale& q, const CheckOptions& opts = {});

/// F̄ = F^{P(F̄)} on V-categories with at most `max_size` points, where
/// P(F̄) is every F̄-compatible lifting of arity 1..max_arity, enumerated
/// through its Yoneda table. Finite quantales and enumerable functors only.
CheckReport check_galois_lifting(const Lifting& l, const Quantale& q, const CheckOptions& opts = {},
                                 std::size_t max_size = 2, std::size_t max_arity = 2);

/// Every member of Λ is compatible with F^Λ.
CheckReport check_galois_family(const std::vector<PredicateLifting>& family, const Functor& f, const Quantale& q,
                                const CheckOptions& opts = {});

/// F̂ = F̂^Λ with Λ every lifting induced by F̂ (arity ≤ max_arity),
/// exhaustively over relations between carriers of at most `max_size` points.
CheckReport check_galois_extension(const LaxExtension& e, const Quantale& q, const CheckOptions& opts = {},
                                   std::size_t max_size = 2, std::size_t max_arity = 2);

/// u ⊗ 1_{FX} ≤ F̂(u ⊗ 1_X) for u in the grid.
CheckReport check_enriched(const LaxExtension& e, const Quantale& q, const std::vector<Value>& grid,
                           const CheckOptions& opts = {}, std::size_t max_size = 2);

struct LiftingCase {
  Lifting lifting;
  Quantale quantale;
  bool negative_control = false;
};

/// The liftings exercised by the initial-morphism suite: Kantorovich
/// liftings (expected to pass) and the discrete, equivalence and TV
/// liftings (expected to fail).
std::vector<LiftingCase> registered_liftings();

/// "lax", "initial", "galois", "enriched" or "all".
std::vector<CheckReport> run_suite(const std::string& suite, const CheckOptions& opts = {});

}  // namespace qk

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qk/behaviour.hpp"
#include "qk/predicate.hpp"

namespace qk {

enum class FormulaKind { Top, Or, And, Tensor, Hom, Modal };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

/// Immutable formula node. `constant` is used by Tensor and Hom; `name` by
/// Modal. Hom(u, φ) means the symmetric hom_s(u, φ).
struct FormulaNode {
  FormulaKind kind = FormulaKind::Top;
  Value constant;
  std::string name;
  std::vector<Formula> args;
};

Formula f_top();
Formula f_or(Formula a, Formula b);
Formula f_and(Formula a, Formula b);
Formula f_tensor(Value u, Formula a);
Formula f_hom(Value u, Formula a);
Formula f_modal(std::string name, std::vector<Formula> args);

bool formula_equal(const Formula& a, const Formula& b);
std::size_t modal_depth(const Formula& f);
std::size_t formula_size(const Formula& f);

/// Grammar (whitespace-insensitive):
///   φ ::= T | (φ | φ) | (φ & φ) | u * φ | hom(u, φ) | name(φ, ...) | name
/// u is anything q.parse accepts ("1/2", "0.25", "top", "{a,b}"), optionally
/// in angle brackets. With a family, modality names and arities are checked.
Formula parse_formula(std::string_view text, const Quantale& q, const std::vector<PredicateLifting>* family = nullptr);
std::string format_formula(const Formula& f, const Quantale& q);

/// ⟦φ⟧ as a per-state vector.
std::vector<Value> eval_formula(const Formula& f, const Coalgebra& c, const std::vector<PredicateLifting>& family);

/// Constants used by the enumeration: all of V when finite, the grid of the
/// given denominator otherwise.
std::vector<Value> default_grid(const Quantale& q, int max_denominator = 4);

struct LogicOptions {
  std::size_t depth = 2;
  std::vector<Value> grid;  // empty: default_grid
  /// Cap on new semantic vectors per depth; hitting it marks the level and
  /// every later one partial.
  std::size_t budget = 1000;
};

struct LogicLevel {
  std::size_t depth = 0;
  VCategory matrix;
  std::size_t formulas = 0;  // distinct vectors realized up to this depth
  bool partial = false;
};

struct LogicalDistance {
  VCategory matrix;  // the deepest level
  std::vector<LogicLevel> levels;
  /// One formula per realized vector, in discovery order.
  std::vector<Formula> witnesses;
  std::vector<std::vector<Value>> vectors;
  bool partial = false;
};

/// ⋀ hom_s(⟦φ⟧x, ⟦φ⟧y) over formulas of modal depth ≤ depth, enumerated up
/// to semantic equality on this system. The dedup is relative to the system.
LogicalDistance logical_distance(const Coalgebra& c, const std::vector<PredicateLifting>& family,
                                 const LogicOptions& opts = {});

struct ExpressivityRow {
  std::size_t depth = 0;
  Rational max_gap = 0;
  std::size_t formulas = 0;
  bool bd_below_ld = true;  // bd ≤ ld in the quantale order
  bool partial = false;
};

struct ExpressivityReport {
  DistanceResult bd;
  std::vector<ExpressivityRow> rows;
  bool gap_non_increasing = true;
  std::vector<Value> grid;
};

/// Compares ld at each depth with bd. bd is iterated at least max(depths)
/// rounds, so the comparison is exact even when bd stopped on ε. The gap is
/// the largest numeric difference, or 0/1 per pair on non-numeric V.
ExpressivityReport expressivity_report(const Coalgebra& c, const Lifting& l, const std::vector<PredicateLifting>& family,
                                       std::size_t max_depth, const LogicOptions& opts = {},
                                       const DistanceOptions& bd_opts = {});

}  // namespace qk

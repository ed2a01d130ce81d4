#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "qk/error.hpp"

namespace qk {

using Rational = mpq_class;

/// Accepts "p/q", integers and finite decimals ("0.25").
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

/// A rational with an optional point at infinity.
struct Extended {
  Rational value;
  bool infinite = false;

  friend bool operator==(const Extended& a, const Extended& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
};

enum class QuantaleKind { Bool2, Luk01, LawvereCost, LawvereMax, FreeOnMonoid };

/// Finite commutative monoid given by its multiplication table.
struct FiniteMonoid {
  std::vector<std::string> elements;
  std::vector<std::vector<std::size_t>> table;
  std::size_t unit = 0;

  /// Throws DomainError unless the table is total, associative, commutative
  /// and `unit` is neutral.
  void validate() const;
  std::size_t index_of(std::string_view name) const;

  /// Free commutative monoid on `generators`, with words longer than
  /// `max_length` collapsed into one absorbing element "~".
  static FiniteMonoid truncated_free_commutative(const std::vector<std::string>& generators,
                                                 std::size_t max_length);
};

/// An element of one of the built-in quantales. Values are plain data; all
/// algebra goes through `Quantale`.
class Value {
 public:
  Value() = default;

  static Value boolean(bool b);
  static Value number(QuantaleKind kind, Rational r);
  static Value infinity(QuantaleKind kind);
  static Value subset(std::uint64_t bits);

  QuantaleKind kind() const { return kind_; }
  bool as_bool() const;
  const Extended& as_number() const;
  std::uint64_t as_subset() const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  QuantaleKind kind_ = QuantaleKind::Bool2;
  std::variant<bool, Extended, std::uint64_t> payload_ = false;
};

/// Total order on representations, for use as a container key only. It is
/// unrelated to the quantale order.
struct ValueKeyLess {
  bool operator()(const Value& a, const Value& b) const;
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const;
};

/// A commutative unital quantale. The order is always the quantale order; for
/// the numeric quantales it is the reverse of the numeric order, so `top()` is
/// the number 0.
class Quantale {
 public:
  static Quantale bool2();
  static Quantale luk01();
  static Quantale lawvere_cost();
  static Quantale lawvere_max();
  static Quantale free_on_monoid(FiniteMonoid monoid);

  QuantaleKind kind() const { return kind_; }
  std::string name() const;
  const FiniteMonoid* monoid() const { return monoid_.get(); }

  bool is_finite() const;
  bool is_integral() const;
  bool is_numeric() const;

  Value top() const;
  Value bottom() const;
  Value unit() const;

  Value boolean(bool b) const;
  Value number(const Rational& r) const;
  Value infinity() const;
  Value subset(std::uint64_t bits) const;

  /// Throws DomainError if `v` is not an element of this quantale.
  void check(const Value& v) const;

  bool leq(const Value& a, const Value& b) const;
  bool equal(const Value& a, const Value& b) const;
  Value join(const Value& a, const Value& b) const;
  Value meet(const Value& a, const Value& b) const;
  Value tensor(const Value& a, const Value& b) const;
  /// Right adjoint of `u ⊗ -`.
  Value hom(const Value& u, const Value& w) const;
  /// hom(u,v) ∧ hom(v,u), the structure of the symmetrization of (V, hom).
  Value hom_s(const Value& u, const Value& v) const;

  Value join_all(std::span<const Value> values) const;
  Value meet_all(std::span<const Value> values) const;

  /// All elements, for finite quantales; throws UnsupportedError otherwise.
  std::vector<Value> elements() const;
  /// Elements for law checks: every element of a finite quantale, or the
  /// rationals with denominator ≤ `max_denominator` (up to 2 plus ∞ for the
  /// Lawvere quantales).
  std::vector<Value> grid(int max_denominator) const;

  /// Numeric distance reading: ⊤ ↦ 0, ⊥ ↦ 1 for Bool2; the number itself
  /// for the numeric quantales. Free quantales have none.
  Extended numeric(const Value& v) const;

  std::string format(const Value& v) const;
  Value parse(std::string_view text) const;

  friend bool operator==(const Quantale& a, const Quantale& b);

 private:
  Quantale(QuantaleKind kind, std::shared_ptr<const FiniteMonoid> monoid)
      : kind_(kind), monoid_(std::move(monoid)) {}

  void require(const Value& v) const;
  std::uint64_t carrier_mask() const;

  QuantaleKind kind_;
  std::shared_ptr<const FiniteMonoid> monoid_;
};

/// Parses a quantale selector ("bool2", "luk01", "cost", "maxcost",
/// "free:<monoid-file>"). `base_dir` resolves relative monoid files.
Quantale quantale_by_name(std::string_view name, const std::string& base_dir = ".");
FiniteMonoid load_monoid(const std::string& path);

}  // namespace qk

#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qk/enriched.hpp"
#include "qk/quantale.hpp"

namespace qk {

/// An element of F X for one of the functors below. Atoms index into X.
struct FElem {
  enum class Tag : unsigned char { Atom, Set, Dist, Tagged, Tuple };

  Tag tag = Tag::Atom;
  std::size_t index = 0;         // atom index, or label / summand index for Tagged
  std::vector<FElem> items;      // set members, support, tagged child (0 or 1), tuple components
  std::vector<Rational> weights;  // Dist only, aligned with items

  static FElem atom(std::size_t i);
  /// Sorts and deduplicates.
  static FElem set(std::vector<FElem> members);
  /// Merges repeated support points and drops zero masses.
  static FElem dist(std::vector<FElem> support, std::vector<Rational> masses);
  static FElem tagged(std::size_t tag, std::vector<FElem> child);
  static FElem tuple(std::vector<FElem> parts);

  friend std::strong_ordering operator<=>(const FElem& a, const FElem& b);
  friend bool operator==(const FElem& a, const FElem& b) { return (a <=> b) == 0; }
};

/// Enumerable set functors, composed as a tree. Every node except Identity
/// and Neighbourhood wraps an inner functor.
class Functor {
 public:
  enum class Kind { Identity, Powerset, Distribution, Labelled, Power, Maybe, Neighbourhood };

  static Functor identity();
  static Functor powerset(Functor inner = identity());
  static Functor distribution(Functor inner = identity());
  /// A × F'
  static Functor labelled(std::vector<std::string> labels, Functor inner);
  /// F'^A
  static Functor power(std::vector<std::string> labels, Functor inner);
  /// 1 + F'
  static Functor maybe(Functor inner);
  static Functor neighbourhood();

  Kind kind() const { return kind_; }
  const Functor& inner() const;
  const std::vector<std::string>& labels() const { return labels_; }
  std::string name() const;

  /// Whether F X is finite and listable (false as soon as a distribution
  /// node occurs).
  bool enumerable() const;
  /// F X for X = {0..n-1}, sorted. Throws BudgetError past `max_elements`.
  std::vector<FElem> enumerate(std::size_t n, std::size_t max_elements = 1 << 17) const;
  FElem map(const FElem& e, const MapWitness& f) const;
  /// Throws ValidationError (with `path`) unless e ∈ F X, |X| = n.
  void validate(const FElem& e, std::size_t n, const std::string& path = "element") const;
  std::string format(const FElem& e, const Carrier& carrier) const;
  /// Atoms of X mentioned by e.
  std::vector<std::size_t> support(const FElem& e) const;

  friend bool operator==(const Functor& a, const Functor& b);

 private:
  Functor(Kind kind, std::shared_ptr<const Functor> inner, std::vector<std::string> labels)
      : kind_(kind), inner_(std::move(inner)), labels_(std::move(labels)) {}

  Kind kind_;
  std::shared_ptr<const Functor> inner_;
  std::vector<std::string> labels_;
};

/// A random element of F X, |X| = n ≥ 1. Distributions get masses with
/// denominators dividing `max_denominator`; sets have at most `max_members`.
FElem random_element(const Functor& f, std::size_t n, std::mt19937_64& rng, int max_denominator = 4,
                     std::size_t max_members = 3);

/// Parses "id", "powerset", "dist", "nbhd", "powerset(F)", "dist(F)",
/// "(1+F)", "F^A", "A×F" (also "A*F"). The letter A stands for `labels`;
/// an explicit label set can be written "{a,b}".
Functor parse_functor(std::string_view text, const std::vector<std::string>& labels = {});

}  // namespace qk

#pragma once

#include <cstddef>
#include <vector>

#include "qk/enriched.hpp"
#include "qk/quantale.hpp"

namespace qk {

/// Dense probability vector over a carrier.
using Distribution = std::vector<Rational>;

/// Throws DomainError on negative mass or a total other than 1.
void validate_distribution(const Distribution& d, std::size_t n);

struct LpResult {
  Rational value;
  std::vector<Rational> x;
  std::size_t pivots = 0;
};

/// max cᵀx subject to Ax ≤ b, x ≥ 0, for b ≥ 0 (the origin is feasible).
/// Exact simplex with Bland's rule. Throws DomainError if unbounded.
LpResult maximize(const std::vector<Rational>& c, const std::vector<std::vector<Rational>>& a,
                  const std::vector<Rational>& b);

/// Kantorovich distance between μ and υ over a luk01 V-category, as the
/// largest Σ f(x)(υ(x) − μ(x)) over non-expansive f: X → [0,1].
Value wasserstein_lp(const VCategory& c, const Distribution& mu, const Distribution& nu);

/// min Σ π(x,y) cost(x,y) over couplings π of μ (rows) and υ (columns).
/// Transportation simplex: north-west corner start, u-v potentials.
Rational transport_primal(const std::vector<std::vector<Rational>>& cost, const Distribution& mu,
                          const Distribution& nu, std::size_t max_iterations = 10000);

/// Σ_x max(υ(x) − μ(x), 0)
Value tv_lift(const Quantale& q, const Distribution& mu, const Distribution& nu);

}  // namespace qk

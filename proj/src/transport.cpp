#include "qk/transport.hpp"

#include <algorithm>
#include <optional>
#include <queue>

namespace qk {

namespace {

// mpq arithmetic assumes canonical operands; inputs built from Rational(p, q)
// may not be.
Distribution canonical(Distribution d) {
  for (auto& m : d) m.canonicalize();
  return d;
}

}  // namespace

void validate_distribution(const Distribution& d_in, std::size_t n) {
  const Distribution d = canonical(d_in);
  if (d.size() != n) throw ShapeError("distribution has " + std::to_string(d.size()) + " entries, expected " + std::to_string(n));
  Rational total = 0;
  for (const auto& m : d) {
    if (m < 0) throw DomainError("negative probability mass " + m.get_str());
    total += m;
  }
  if (total != 1) throw DomainError("probabilities sum to " + total.get_str() + ", not 1");
}

LpResult maximize(const std::vector<Rational>& c, const std::vector<std::vector<Rational>>& a,
                  const std::vector<Rational>& b) {
  const std::size_t n = c.size();
  const std::size_t m = b.size();
  if (a.size() != m) throw ShapeError("constraint matrix and bounds differ in length");
  for (const auto& row : a)
    if (row.size() != n) throw ShapeError("constraint row has the wrong length");
  for (const auto& v : b)
    if (v < 0) throw DomainError("maximize() needs non-negative bounds");

  // Tableau: m rows of [A | I | b], objective row z - cᵀx = 0.
  const std::size_t cols = n + m;
  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(cols + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1;
    t[i][cols] = b[i];
  }
  std::vector<Rational> z(cols + 1);
  for (std::size_t j = 0; j < n; ++j) z[j] = -c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  LpResult res;
  while (true) {
    // Bland: smallest entering index with negative reduced cost.
    std::optional<std::size_t> enter;
    for (std::size_t j = 0; j < cols; ++j)
      if (z[j] < 0) {
        enter = j;
        break;
      }
    if (!enter) break;
    const std::size_t e = *enter;
    std::optional<std::size_t> leave;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][e] <= 0) continue;
      Rational ratio = t[i][cols] / t[i][e];
      if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (!leave) throw DomainError("linear program is unbounded");
    const std::size_t l = *leave;
    const Rational piv = t[l][e];
    for (auto& v : t[l]) v /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == l || t[i][e] == 0) continue;
      const Rational f = t[i][e];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[l][j];
    }
    if (z[e] != 0) {
      const Rational f = z[e];
      for (std::size_t j = 0; j <= cols; ++j) z[j] -= f * t[l][j];
    }
    basis[l] = e;
    ++res.pivots;
  }
  res.value = z[cols];
  res.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][cols];
  return res;
}

Value wasserstein_lp(const VCategory& c, const Distribution& mu_in, const Distribution& nu_in) {
  const Distribution mu = canonical(mu_in), nu = canonical(nu_in);
  const auto& q = c.quantale;
  if (q.kind() != QuantaleKind::Luk01) throw DomainError("wasserstein_lp needs a luk01 V-category");
  const std::size_t n = c.size();
  validate_distribution(mu, n);
  validate_distribution(nu, n);
  if (mu == nu) return q.top();

  std::vector<Rational> obj(n);
  for (std::size_t x = 0; x < n; ++x) obj[x] = nu[x] - mu[x];
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const Rational& d = c.at(x, y).as_number().value;
      if (d >= 1) continue;  // implied by the box constraints
      std::vector<Rational> row(n);
      row[y] = 1;
      row[x] = -1;
      a.push_back(std::move(row));
      b.push_back(d);
    }
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<Rational> row(n);
    row[x] = 1;
    a.push_back(std::move(row));
    b.push_back(1);
  }
  Rational v = maximize(obj, a, b).value;
  if (v < 0) v = 0;
  if (v > 1) v = 1;
  return q.number(v);
}

Rational transport_primal(const std::vector<std::vector<Rational>>& cost, const Distribution& mu_in,
                          const Distribution& nu_in, std::size_t max_iterations) {
  const Distribution mu = canonical(mu_in), nu = canonical(nu_in);
  // Restrict to the supports; zero rows and columns carry no mass.
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] != 0) rows.push_back(i);
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (nu[j] != 0) cols.push_back(j);
  Rational ms = 0, ns = 0;
  for (const auto& v : mu) ms += v;
  for (const auto& v : nu) ns += v;
  if (ms != ns) throw DomainError("transport problem is unbalanced");
  const std::size_t m = rows.size(), n = cols.size();
  if (m == 0) return 0;
  auto c = [&](std::size_t i, std::size_t j) -> const Rational& { return cost.at(rows[i]).at(cols[j]); };

  // North-west corner; ties move down so the basis stays a spanning tree.
  std::vector<std::vector<Rational>> flow(m, std::vector<Rational>(n));
  std::vector<std::vector<bool>> basic(m, std::vector<bool>(n, false));
  {
    std::vector<Rational> s(m), d(n);
    for (std::size_t i = 0; i < m; ++i) s[i] = mu[rows[i]];
    for (std::size_t j = 0; j < n; ++j) d[j] = nu[cols[j]];
    std::size_t i = 0, j = 0;
    while (i < m && j < n) {
      Rational x = std::min(s[i], d[j]);
      flow[i][j] = x;
      basic[i][j] = true;
      s[i] -= x;
      d[j] -= x;
      if (s[i] == 0 && i + 1 < m)
        ++i;
      else
        ++j;
    }
  }

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    // Potentials u_i + v_j = c_ij on basic cells (tree walk from u_0 = 0).
    std::vector<std::optional<Rational>> u(m), v(n);
    u[0] = Rational(0);
    std::queue<std::pair<bool, std::size_t>> work;  // (is_row, index)
    work.push({true, 0});
    while (!work.empty()) {
      auto [is_row, k] = work.front();
      work.pop();
      if (is_row) {
        for (std::size_t j = 0; j < n; ++j)
          if (basic[k][j] && !v[j]) {
            v[j] = c(k, j) - *u[k];
            work.push({false, j});
          }
      } else {
        for (std::size_t i = 0; i < m; ++i)
          if (basic[i][k] && !u[i]) {
            u[i] = c(i, k) - *v[k];
            work.push({true, i});
          }
      }
    }
    // Entering cell: first with negative reduced cost.
    std::optional<std::pair<std::size_t, std::size_t>> enter;
    for (std::size_t i = 0; i < m && !enter; ++i)
      for (std::size_t j = 0; j < n && !enter; ++j)
        if (!basic[i][j] && c(i, j) - *u[i] - *v[j] < 0) enter = {i, j};
    if (!enter) {
      Rational total = 0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) total += flow[i][j] * c(i, j);
      return total;
    }
    // Path in the basis tree from column ej back to row ei; node ids: rows
    // 0..m-1, columns m..m+n-1.
    const auto [ei, ej] = *enter;
    std::vector<long> parent(m + n, -1);
    std::vector<bool> seen(m + n, false);
    std::queue<std::size_t> bfs;
    bfs.push(m + ej);
    seen[m + ej] = true;
    while (!bfs.empty() && !seen[ei]) {
      std::size_t node = bfs.front();
      bfs.pop();
      if (node >= m) {
        std::size_t j = node - m;
        for (std::size_t i = 0; i < m; ++i)
          if (basic[i][j] && !seen[i]) {
            seen[i] = true;
            parent[i] = static_cast<long>(node);
            bfs.push(i);
          }
      } else {
        for (std::size_t j = 0; j < n; ++j)
          if (basic[node][j] && !seen[m + j]) {
            seen[m + j] = true;
            parent[m + j] = static_cast<long>(node);
            bfs.push(m + j);
          }
      }
    }
    if (!seen[ei]) throw DomainError("transport basis is not connected");
    // Walk from row ei to column ej; cells alternate -, +, -, ... after the
    // entering (+) cell.
    std::vector<std::pair<std::size_t, std::size_t>> cycle;
    std::size_t node = ei;
    while (node != m + ej) {
      std::size_t next = static_cast<std::size_t>(parent[node]);
      if (node < m)
        cycle.push_back({node, next - m});
      else
        cycle.push_back({next, node - m});
      node = next;
    }
    std::optional<std::size_t> leave;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      auto [i, j] = cycle[k];
      if (!leave || flow[i][j] < flow[cycle[*leave].first][cycle[*leave].second]) leave = k;
    }
    const Rational theta = flow[cycle[*leave].first][cycle[*leave].second];
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      auto [i, j] = cycle[k];
      if (k % 2 == 0)
        flow[i][j] -= theta;
      else
        flow[i][j] += theta;
    }
    flow[ei][ej] += theta;
    basic[ei][ej] = true;
    basic[cycle[*leave].first][cycle[*leave].second] = false;
  }
  throw DomainError("transportation simplex did not terminate within the iteration cap");
}

Value tv_lift(const Quantale& q, const Distribution& mu_in, const Distribution& nu_in) {
  const Distribution mu = canonical(mu_in), nu = canonical(nu_in);
  if (q.kind() != QuantaleKind::Luk01) throw DomainError("tv_lift needs luk01");
  if (mu.size() != nu.size()) throw ShapeError("distributions over different carriers");
  validate_distribution(mu, mu.size());
  validate_distribution(nu, nu.size());
  Rational acc = 0;
  for (std::size_t x = 0; x < mu.size(); ++x)
    if (nu[x] > mu[x]) acc += nu[x] - mu[x];
  return q.number(acc);
}

}  // namespace qk

#pragma once

#include <queue>
#include <tuple>
#include <vector>

#include "ergodic/measure.hpp"

namespace ergodic {

struct TransportPlan {
  std::size_t rows = 0, cols = 0;
  std::vector<Rational> flow;  // row-major

  const Rational& at(std::size_t i, std::size_t j) const { return flow[i * cols + j]; }
  Rational& at(std::size_t i, std::size_t j) { return flow[i * cols + j]; }

  std::vector<std::tuple<std::size_t, std::size_t, Rational>> triples() const {
    std::vector<std::tuple<std::size_t, std::size_t, Rational>> out;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (sgn(at(i, j)) != 0) out.emplace_back(i, j, at(i, j));
    return out;
  }

  bool has_marginals(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    for (std::size_t i = 0; i < rows; ++i) {
      Rational s = 0;
      for (std::size_t j = 0; j < cols; ++j) {
        if (sgn(at(i, j)) < 0) return false;
        s += at(i, j);
      }
      if (s != a[i]) return false;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      Rational s = 0;
      for (std::size_t i = 0; i < rows; ++i) s += at(i, j);
      if (s != b[j]) return false;
    }
    return true;
  }
};

struct TransportResult {
  Rational value;
  TransportPlan plan;
};

// Exact transportation simplex: northwest-corner start, potentials for the
// reduced costs, Bland's rule for entering and leaving cells.
inline TransportResult transport_simplex(const std::vector<Rational>& a, const std::vector<Rational>& b,
                                         const std::vector<Rational>& cost) {
  const std::size_t m = a.size(), n = b.size();
  require(m > 0 && n > 0, "empty marginal");
  TransportPlan plan{m, n, std::vector<Rational>(m * n)};
  std::vector<char> basic(m * n, 0);

  {
    std::vector<Rational> s = a, d = b;
    std::size_t i = 0, j = 0;
    while (i < m && j < n) {
      Rational x = qmin(s[i], d[j]);
      plan.at(i, j) = x;
      basic[i * n + j] = 1;
      s[i] -= x;
      d[j] -= x;
      if (sgn(s[i]) == 0 && i + 1 < m) ++i;
      else ++j;
    }
  }

  StepBudget budget;
  std::vector<Rational> u(m), v(n);
  for (;;) {
    budget.charge(m * n, "transport simplex");
    // potentials over the basis tree: nodes 0..m-1 rows, m..m+n-1 columns
    std::vector<char> seen(m + n, 0);
    std::queue<std::size_t> q;
    u[0] = 0;
    seen[0] = 1;
    q.push(0);
    while (!q.empty()) {
      std::size_t k = q.front();
      q.pop();
      if (k < m) {
        for (std::size_t j = 0; j < n; ++j)
          if (basic[k * n + j] && !seen[m + j]) {
            v[j] = cost[k * n + j] - u[k];
            seen[m + j] = 1;
            q.push(m + j);
          }
      } else {
        std::size_t j = k - m;
        for (std::size_t i = 0; i < m; ++i)
          if (basic[i * n + j] && !seen[i]) {
            u[i] = cost[i * n + j] - v[j];
            seen[i] = 1;
            q.push(i);
          }
      }
    }

    std::size_t enter = m * n;
    for (std::size_t c = 0; c < m * n && enter == m * n; ++c)
      if (!basic[c] && sgn(cost[c] - u[c / n] - v[c % n]) < 0) enter = c;
    if (enter == m * n) break;

    // path in the tree from column node of the entering cell to its row node
    std::size_t ei = enter / n, ej = enter % n;
    std::vector<std::size_t> parent(m + n, m + n), via(m + n, m * n);
    std::vector<char> vis(m + n, 0);
    std::queue<std::size_t> bq;
    bq.push(m + ej);
    vis[m + ej] = 1;
    while (!bq.empty() && !vis[ei]) {
      std::size_t k = bq.front();
      bq.pop();
      for (std::size_t t = 0; t < (k < m ? n : m); ++t) {
        std::size_t cell = k < m ? k * n + t : t * n + (k - m);
        std::size_t other = k < m ? m + t : t;
        if (basic[cell] && !vis[other]) {
          vis[other] = 1;
          parent[other] = k;
          via[other] = cell;
          bq.push(other);
        }
      }
    }
    // cycle: enter(+), then cells along row ei -> ... -> column ej alternate -, +, ...
    std::vector<std::size_t> cycle{enter};
    for (std::size_t k = ei; k != m + ej; k = parent[k]) cycle.push_back(via[k]);
    Rational theta;
    std::size_t leave = m * n;
    for (std::size_t t = 1; t < cycle.size(); t += 2) {
      const Rational& f = plan.flow[cycle[t]];
      if (leave == m * n || f < theta || (f == theta && cycle[t] < leave)) {
        theta = f;
        leave = cycle[t];
      }
    }
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      if (t % 2 == 0) plan.flow[cycle[t]] += theta;
      else plan.flow[cycle[t]] -= theta;
    }
    basic[enter] = 1;
    basic[leave] = 0;
  }

  Rational value = 0;
  for (std::size_t c = 0; c < m * n; ++c) value += plan.flow[c] * cost[c];
  return {value, std::move(plan)};
}

inline TransportResult w1_ideal(const IdealMeasure& mu1, const IdealMeasure& mu2) {
  require(mu1.space() == mu2.space(), "measures on different spaces");
  std::vector<Rational> a, b, cost;
  for (auto& x : mu1.atoms()) a.push_back(x.weight);
  for (auto& y : mu2.atoms()) b.push_back(y.weight);
  for (auto& x : mu1.atoms())
    for (auto& y : mu2.atoms()) cost.push_back(distance(x.point, y.point));
  return transport_simplex(a, b, cost);
}

}  // namespace ergodic

#pragma once

// Brute-force W1 oracle over the vertices of the transport polytope.

#include <optional>
#include <random>

#include "ergodic/transport.hpp"

namespace oracles {

using namespace ergodic;

inline IdealMeasure random_measure(std::mt19937_64& rng, SpaceKind s, std::size_t max_atoms) {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::uniform_int_distribution<int> weight(1, 6), coord(0, 15), len(0, 4), bit(0, 1);
  std::size_t n = count(rng);
  std::vector<IdealPoint> pts;
  while (pts.size() < n) {
    IdealPoint p;
    if (s == SpaceKind::circle) p = IdealPoint::circle(rat(coord(rng), 16));
    else {
      Word w;
      for (int i = len(rng); i > 0; --i) w.push_back(bit(rng) ? '1' : '0');
      p = IdealPoint::cantor(w);
    }
    bool dup = false;
    for (const auto& q : pts) dup |= q == p;
    if (!dup) pts.push_back(p);
  }
  std::vector<Rational> w;
  Rational total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w.push_back(Rational(weight(rng)));
    total += w.back();
  }
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back({pts[i], w[i] / total});
  return IdealMeasure(s, atoms);
}

// minimum cost over all vertices of the transport polytope: each vertex is
// supported on an acyclic set of m + n - 1 cells and its flow follows by
// peeling leaves
inline Rational brute_force_w1(const IdealMeasure& mu, const IdealMeasure& nu) {
  std::size_t m = mu.size(), n = nu.size(), cells = m * n, k = m + n - 1;
  std::optional<Rational> best;
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<Rational> a, b, flow(cells, Rational(0));
    for (auto& x : mu.atoms()) a.push_back(x.weight);
    for (auto& y : nu.atoms()) b.push_back(y.weight);
    std::vector<bool> open(cells, false);
    for (std::size_t c = 0; c < cells; ++c) open[c] = (mask >> c) & 1;
    std::size_t assigned = 0;
    bool progress = true;
    while (assigned < k && progress) {
      progress = false;
      for (std::size_t i = 0; i < m && !progress; ++i) {
        std::vector<std::size_t> cs;
        for (std::size_t j = 0; j < n; ++j)
          if (open[i * n + j]) cs.push_back(i * n + j);
        if (cs.size() == 1) {
          std::size_t c = cs[0];
          flow[c] = a[i];
          b[c % n] -= a[i];
          a[i] = 0;
          open[c] = false;
          ++assigned;
          progress = true;
        }
      }
      for (std::size_t j = 0; j < n && !progress; ++j) {
        std::vector<std::size_t> cs;
        for (std::size_t i = 0; i < m; ++i)
          if (open[i * n + j]) cs.push_back(i * n + j);
        if (cs.size() == 1) {
          std::size_t c = cs[0];
          flow[c] = b[j];
          a[c / n] -= b[j];
          b[j] = 0;
          open[c] = false;
          ++assigned;
          progress = true;
        }
      }
    }
    if (assigned < k) continue;
    bool ok = true;
    for (auto& q : flow) ok &= sgn(q) >= 0;
    for (auto& q : a) ok &= sgn(q) == 0;
    for (auto& q : b) ok &= sgn(q) == 0;
    if (!ok) continue;
    Rational cost = 0;
    for (std::size_t c = 0; c < cells; ++c) cost += flow[c] * distance(mu.atoms()[c / n].point, nu.atoms()[c % n].point);
    if (!best || cost < *best) best = cost;
  }
  return *best;
}

}  // namespace oracles

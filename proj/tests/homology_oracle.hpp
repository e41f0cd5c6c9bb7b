#pragma once

// Brute-force Betti numbers of a Vietoris-Rips 2-skeleton at a single scale,
// computed from GF(2) ranks of explicit boundary matrices. Shares no code with
// the filtration or persistence implementation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

using Row = std::vector<std::uint64_t>;

inline int gf2_rank(std::vector<Row> rows) {
  int rank = 0;
  if (rows.empty()) return 0;
  const std::size_t words = rows.front().size();
  for (std::size_t col = 0; col < words * 64; ++col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    auto pivot = std::find_if(rows.begin() + rank, rows.end(),
                              [&](const Row& r) { return (r[w] & bit) != 0; });
    if (pivot == rows.end()) continue;
    std::iter_swap(rows.begin() + rank, pivot);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != static_cast<std::size_t>(rank) && (rows[r][w] & bit)) {
        for (std::size_t k = 0; k < words; ++k) rows[r][k] ^= rows[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

struct Betti {
  int beta0 = 0;
  int beta1 = 0;
};

/// `dist` is a dense row-major n x n matrix.
inline Betti betti_at(const std::vector<double>& dist, std::size_t n, double eps) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dist[i * n + j] <= eps) edges.emplace_back(i, j);
  std::vector<std::array<std::size_t, 3>> tris;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (dist[i * n + j] <= eps && dist[i * n + k] <= eps && dist[j * n + k] <= eps)
          tris.push_back({i, j, k});

  auto edge_index = [&](std::size_t a, std::size_t b) {
    return static_cast<std::size_t>(
        std::find(edges.begin(), edges.end(), std::make_pair(a, b)) - edges.begin());
  };

  // Boundary of each edge as a row over vertices.
  const std::size_t vwords = (n + 63) / 64;
  std::vector<Row> d1;
  for (auto [a, b] : edges) {
    Row r(vwords, 0);
    r[a / 64] ^= std::uint64_t{1} << (a % 64);
    r[b / 64] ^= std::uint64_t{1} << (b % 64);
    d1.push_back(r);
  }
  // Boundary of each triangle as a row over edges.
  const std::size_t ewords = (edges.size() + 63) / 64 + 1;
  std::vector<Row> d2;
  for (auto t : tris) {
    Row r(ewords, 0);
    for (auto [a, b] : {std::pair{t[0], t[1]}, std::pair{t[0], t[2]}, std::pair{t[1], t[2]}}) {
      const std::size_t e = edge_index(a, b);
      r[e / 64] ^= std::uint64_t{1} << (e % 64);
    }
    d2.push_back(r);
  }
  const int r1 = gf2_rank(d1);
  const int r2 = gf2_rank(d2);
  Betti b;
  b.beta0 = static_cast<int>(n) - r1;
  b.beta1 = static_cast<int>(edges.size()) - r1 - r2;
  return b;
}

}  // namespace oracle

#include "eccmark/filtration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace eccmark {

bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.vertices < b.vertices;
}

Filtration::Filtration(std::size_t n, double epsilon_max, std::vector<Simplex> simplices)
    : n_(n), epsilon_max_(epsilon_max), simplices_(std::move(simplices)) {}

std::size_t Filtration::count(int dim) const {
  return static_cast<std::size_t>(std::count_if(
      simplices_.begin(), simplices_.end(), [dim](const Simplex& s) { return s.dim == dim; }));
}

namespace {

Simplex make_vertex(std::uint32_t v) {
  Simplex s;
  s.vertices[0] = v;
  s.dim = 0;
  s.value = 0.0;
  return s;
}

Simplex make_edge(std::uint32_t a, std::uint32_t b, double value) {
  Simplex s;
  s.vertices[0] = std::min(a, b);
  s.vertices[1] = std::max(a, b);
  s.dim = 1;
  s.value = value;
  return s;
}

Simplex make_triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c, double value) {
  std::array<std::uint32_t, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  Simplex s;
  s.vertices = v;
  s.dim = 2;
  s.value = value;
  return s;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

// out = a xor b for sorted index sets.
void symmetric_difference(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                          std::vector<std::uint32_t>& out) {
  out.clear();
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
}

}  // namespace

Filtration build_filtration(const DistanceMatrix& dist, double epsilon_max) {
  if (!std::isfinite(epsilon_max)) throw Error("epsilon_max must be finite");
  if (!(epsilon_max > 0.0)) throw Error("epsilon_max must be positive");
  const std::size_t n = dist.size();

  std::vector<Simplex> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto row = dist.row(i);
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (row[j] <= epsilon_max) edges.push_back(make_edge(i, j, row[j]));
    }
  }
  std::sort(edges.begin(), edges.end(), filtration_less);

  // Each triangle is emitted when its last edge enters: the common neighbours
  // of that edge's endpoints among the edges already seen.
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> seen(n * words, 0);
  std::vector<Simplex> triangles;
  for (const Simplex& e : edges) {
    const std::uint32_t a = e.vertices[0], b = e.vertices[1];
    const std::uint64_t* ra = seen.data() + a * words;
    const std::uint64_t* rb = seen.data() + b * words;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t common = ra[w] & rb[w];
      while (common != 0) {
        const auto bit = static_cast<std::uint32_t>(std::countr_zero(common));
        common &= common - 1;
        triangles.push_back(make_triangle(a, b, static_cast<std::uint32_t>(w * 64 + bit), e.value));
      }
    }
    seen[a * words + b / 64] |= std::uint64_t{1} << (b % 64);
    seen[b * words + a / 64] |= std::uint64_t{1} << (a % 64);
  }
  // Values are already non-decreasing; this only orders ties.
  std::sort(triangles.begin(), triangles.end(), filtration_less);

  std::vector<Simplex> simplices;
  simplices.reserve(n + edges.size() + triangles.size());
  for (std::uint32_t v = 0; v < n; ++v) simplices.push_back(make_vertex(v));
  std::merge(edges.begin(), edges.end(), triangles.begin(), triangles.end(),
             std::back_inserter(simplices), filtration_less);
  return Filtration(n, epsilon_max, std::move(simplices));
}

PersistenceDiagram compute_persistence(const Filtration& filtration) {
  const std::size_t n = filtration.vertex_count();
  std::vector<std::int32_t> edge_id(n * n, -1);
  std::vector<std::array<std::uint32_t, 2>> edges;
  std::vector<double> edge_value;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<double> triangle_value;

  for (const Simplex& s : filtration.simplices()) {
    if (s.dim == 1) {
      const auto id = static_cast<std::int32_t>(edges.size());
      edge_id[s.vertices[0] * n + s.vertices[1]] = id;
      edge_id[s.vertices[1] * n + s.vertices[0]] = id;
      edges.push_back({s.vertices[0], s.vertices[1]});
      edge_value.push_back(s.value);
    } else if (s.dim == 2) {
      triangles.push_back(s.vertices);
      triangle_value.push_back(s.value);
    }
  }
  const std::size_t num_edges = edges.size();
  const std::size_t num_triangles = triangles.size();

  // Coboundary of every edge in CSR form; rows come out sorted because
  // triangles are visited in filtration order.
  std::vector<std::uint32_t> offsets(num_edges + 1, 0);
  auto faces = [&](const std::array<std::uint32_t, 3>& t) {
    return std::array<std::int32_t, 3>{edge_id[t[0] * n + t[1]], edge_id[t[0] * n + t[2]],
                                       edge_id[t[1] * n + t[2]]};
  };
  for (const auto& t : triangles) {
    for (std::int32_t e : faces(t)) ++offsets[static_cast<std::size_t>(e) + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::uint32_t> cofaces(offsets.back());
  {
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t t = 0; t < num_triangles; ++t) {
      for (std::int32_t e : faces(triangles[t])) cofaces[cursor[static_cast<std::size_t>(e)]++] = t;
    }
  }
  auto coboundary = [&](std::size_t e) {
    return std::span<const std::uint32_t>(cofaces.data() + offsets[e], offsets[e + 1] - offsets[e]);
  };

  PersistenceDiagram diagram;
  diagram.dim0.reserve(n);

  UnionFind components(n);
  std::vector<char> merging(num_edges, 0);
  for (std::size_t e = 0; e < num_edges; ++e) {
    if (components.unite(edges[e][0], edges[e][1])) {
      merging[e] = 1;
      diagram.dim0.push_back({0.0, edge_value[e]});
    }
  }
  while (diagram.dim0.size() < n) diagram.dim0.push_back({0.0, kInfinity});

  // Reduced columns are kept only when they differ from the raw coboundary.
  constexpr std::int32_t kUnowned = -1;
  std::vector<std::int32_t> pivot_owner(num_triangles, kUnowned);
  std::vector<std::vector<std::uint32_t>> reduced(num_edges);
  std::vector<char> modified(num_edges, 0);
  std::vector<std::uint32_t> column, scratch;

  for (std::size_t e = num_edges; e-- > 0;) {
    if (merging[e]) continue;
    auto raw = coboundary(e);
    bool touched = false;
    std::span<const std::uint32_t> current = raw;
    while (!current.empty()) {
      const std::uint32_t pivot = current.front();
      const std::int32_t owner = pivot_owner[pivot];
      if (owner == kUnowned) break;
      const auto other = static_cast<std::size_t>(owner);
      std::span<const std::uint32_t> other_col =
          modified[other] ? std::span<const std::uint32_t>(reduced[other]) : coboundary(other);
      symmetric_difference(current, other_col, scratch);
      column.swap(scratch);
      current = column;
      touched = true;
    }
    if (current.empty()) {
      diagram.dim1.push_back({edge_value[e], kInfinity});
      continue;
    }
    const std::uint32_t pivot = current.front();
    pivot_owner[pivot] = static_cast<std::int32_t>(e);
    if (touched) {
      reduced[e] = column;
      modified[e] = 1;
    }
    if (edge_value[e] < triangle_value[pivot]) {
      diagram.dim1.push_back({edge_value[e], triangle_value[pivot]});
    }
  }
  std::reverse(diagram.dim1.begin(), diagram.dim1.end());
  return diagram;
}

EulerCurve betti_curves(const PersistenceDiagram& diagram, std::span<const double> grid) {
  for (std::size_t t = 1; t < grid.size(); ++t) {
    if (!(grid[t - 1] < grid[t])) throw Error("epsilon grid must be strictly increasing");
  }
  auto count_alive = [&grid](const std::vector<PersistencePair>& pairs, std::vector<int>& out) {
    std::vector<double> births, deaths;
    births.reserve(pairs.size());
    deaths.reserve(pairs.size());
    for (const auto& p : pairs) {
      births.push_back(p.birth);
      deaths.push_back(p.death);
    }
    std::sort(births.begin(), births.end());
    std::sort(deaths.begin(), deaths.end());
    out.resize(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t) {
      // birth <= death, so every pair dead by eps was also born by eps.
      const auto born = std::upper_bound(births.begin(), births.end(), grid[t]) - births.begin();
      const auto dead = std::upper_bound(deaths.begin(), deaths.end(), grid[t]) - deaths.begin();
      out[t] = static_cast<int>(born - dead);
    }
  };

  EulerCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  count_alive(diagram.dim0, curve.beta0);
  count_alive(diagram.dim1, curve.beta1);
  curve.chi.resize(grid.size());
  for (std::size_t t = 0; t < grid.size(); ++t) curve.chi[t] = curve.beta0[t] - curve.beta1[t];
  return curve;
}

EulerCurve euler_curve(const DistanceMatrix& dist, std::span<const double> grid) {
  if (grid.empty()) throw Error("epsilon grid is empty");
  const double top = grid.back();
  if (!(top > 0.0)) {
    // Only the eps = 0 slice: every vertex is its own class unless duplicated.
    return betti_curves(compute_persistence(build_filtration(dist, 1.0)), grid);
  }
  return betti_curves(compute_persistence(build_filtration(dist, top)), grid);
}

double mst_max_edge(const DistanceMatrix& dist) {
  const std::size_t n = dist.size();
  if (n < 2) return 0.0;
  std::vector<double> best(n, kInfinity);
  std::vector<char> in_tree(n, 0);
  double longest = 0.0;
  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    const auto row = dist.row(current);
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      best[j] = std::min(best[j], row[j]);
      if (next == n || best[j] < best[next]) next = j;
    }
    longest = std::max(longest, best[next]);
    in_tree[next] = 1;
    current = next;
  }
  return longest;
}

double last_loop_death(const DistanceMatrix& dist) {
  const double top = *std::max_element(dist.entries().begin(), dist.entries().end());
  if (!(top > 0.0)) return 0.0;
  const PersistenceDiagram diagram = compute_persistence(build_filtration(dist, top));
  double last = 0.0;
  for (const auto& p : diagram.dim1) {
    // The full 2-skeleton of a simplex has no 1-cycles left.
    if (!p.essential()) last = std::max(last, p.death);
  }
  return last;
}

double auto_epsilon_max(const DistanceMatrix& dist) {
  if (dist.size() < 2) return 0.0;
  return 1.2 * std::max(mst_max_edge(dist), last_loop_death(dist));
}

std::vector<double> linear_grid(double epsilon_max, std::size_t k) {
  if (k < 2) throw Error("grid size must be at least 2");
  if (!std::isfinite(epsilon_max) || !(epsilon_max > 0.0)) {
    throw Error("grid upper end must be finite and positive");
  }
  std::vector<double> grid(k);
  const double steps = static_cast<double>(k - 1);
  for (std::size_t t = 0; t < k; ++t) grid[t] = epsilon_max * (static_cast<double>(t) / steps);
  grid.back() = epsilon_max;
  return grid;
}

std::vector<double> default_grid(const DistanceMatrix& dist, std::size_t k) {
  const double top = auto_epsilon_max(dist);
  return linear_grid(top > 0.0 ? top : 1.0, k);
}

}  // namespace eccmark

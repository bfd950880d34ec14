#include "mpoi/constraints.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

#include "mpoi/error.hpp"

namespace mpoi {

namespace {

void check_ground(const ElementSet& s, std::size_t n) {
  if (s.ground_size() != n)
    throw Error(ErrorCode::invalid_argument,
                "element set over " + std::to_string(s.ground_size()) +
                    " elements used with a constraint over " + std::to_string(n));
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

std::string edge_list(const std::vector<Edge>& edges) {
  std::string out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(edges[i].first) + "-" + std::to_string(edges[i].second);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matroid

Matroid Matroid::uniform(std::size_t ground_size, std::size_t k) {
  Matroid m;
  m.kind_ = MatroidKind::uniform;
  m.ground_size_ = ground_size;
  m.k_ = k;
  return m;
}

Matroid Matroid::partition(std::vector<std::size_t> part_of, std::vector<std::size_t> capacities) {
  for (auto p : part_of)
    if (p >= capacities.size())
      throw Error(ErrorCode::invalid_argument, "partition label without a capacity");
  Matroid m;
  m.kind_ = MatroidKind::partition;
  m.ground_size_ = part_of.size();
  m.part_of_ = std::move(part_of);
  m.capacities_ = std::move(capacities);
  return m;
}

Matroid Matroid::graphic(std::size_t vertices, std::vector<Edge> edges) {
  for (const auto& [a, b] : edges)
    if (a >= vertices || b >= vertices)
      throw Error(ErrorCode::invalid_argument, "graph edge endpoint out of range");
  Matroid m;
  m.kind_ = MatroidKind::graphic;
  m.ground_size_ = edges.size();
  m.vertices_ = vertices;
  m.edges_ = std::move(edges);
  return m;
}

bool Matroid::is_independent(const ElementSet& s) const {
  check_ground(s, ground_size_);
  switch (kind_) {
    case MatroidKind::uniform:
      return s.size() <= k_;
    case MatroidKind::partition: {
      std::vector<std::size_t> used(capacities_.size(), 0);
      for (auto e : s.elements())
        if (++used[part_of_[e]] > capacities_[part_of_[e]]) return false;
      return true;
    }
    case MatroidKind::graphic: {
      DisjointSets dsu(vertices_);
      for (auto e : s.elements())
        if (!dsu.unite(edges_[e].first, edges_[e].second)) return false;
      return true;
    }
  }
  return false;
}

std::size_t Matroid::rank(const ElementSet& s) const {
  check_ground(s, ground_size_);
  ElementSet basis(ground_size_);
  for (auto e : s.elements()) {
    basis.insert(e);
    if (!is_independent(basis)) basis.erase(e);
  }
  return basis.size();
}

std::string Matroid::describe() const {
  switch (kind_) {
    case MatroidKind::uniform:
      return "uniform_matroid(k=" + std::to_string(k_) + ")";
    case MatroidKind::partition: {
      std::string caps;
      for (std::size_t p = 0; p < capacities_.size(); ++p)
        caps += (p ? "," : "") + std::to_string(capacities_[p]);
      return "partition_matroid(capacities=" + caps + ")";
    }
    case MatroidKind::graphic:
      return "graphic_matroid(" + edge_list(edges_) + ")";
  }
  return "matroid";
}

// ---------------------------------------------------------------------------
// Matching

namespace {

bool matching_feasible(std::size_t vertices, const std::vector<Edge>& edges, const ElementSet& s) {
  std::vector<bool> used(vertices, false);
  for (auto e : s.elements()) {
    const auto [a, b] = edges[e];
    if (a == b || used[a] || used[b]) return false;
    used[a] = used[b] = true;
  }
  return true;
}

std::optional<std::vector<int>> two_coloring(std::size_t vertices, const std::vector<Edge>& edges) {
  std::vector<std::vector<std::size_t>> adj(vertices);
  for (const auto& [a, b] : edges) {
    if (a == b) return std::nullopt;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> color(vertices, -1);
  for (std::size_t s = 0; s < vertices; ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto v : adj[u]) {
        if (color[v] < 0) {
          color[v] = 1 - color[u];
          stack.push_back(v);
        } else if (color[v] == color[u]) {
          return std::nullopt;
        }
      }
    }
  }
  return color;
}

}  // namespace

std::size_t maximum_matching_size(std::size_t vertices, const std::vector<Edge>& edges) {
  if (auto color = two_coloring(vertices, edges)) {
    std::vector<std::vector<std::size_t>> adj(vertices);
    for (const auto& [a, b] : edges) {
      if ((*color)[a] == 0) {
        adj[a].push_back(b);
      } else {
        adj[b].push_back(a);
      }
    }
    std::vector<long> match_right(vertices, -1);
    std::vector<bool> seen;
    std::function<bool(std::size_t)> augment = [&](std::size_t u) {
      for (auto v : adj[u]) {
        if (seen[v]) continue;
        seen[v] = true;
        if (match_right[v] < 0 || augment(static_cast<std::size_t>(match_right[v]))) {
          match_right[v] = static_cast<long>(u);
          return true;
        }
      }
      return false;
    };
    std::size_t size = 0;
    for (std::size_t u = 0; u < vertices; ++u) {
      if ((*color)[u] != 0) continue;
      seen.assign(vertices, false);
      if (augment(u)) ++size;
    }
    return size;
  }
  // General graph: branch on edges, bounded by remaining vertices.
  std::vector<bool> used(vertices, false);
  std::size_t best = 0;
  std::function<void(std::size_t, std::size_t, std::size_t)> branch =
      [&](std::size_t next, std::size_t size, std::size_t free_vertices) {
        best = std::max(best, size);
        if (next == edges.size() || size + free_vertices / 2 <= best) return;
        const auto [a, b] = edges[next];
        if (a != b && !used[a] && !used[b]) {
          used[a] = used[b] = true;
          branch(next + 1, size + 1, free_vertices - 2);
          used[a] = used[b] = false;
        }
        branch(next + 1, size, free_vertices);
      };
  branch(0, 0, vertices);
  return best;
}

// ---------------------------------------------------------------------------
// PackingOracle

std::string_view to_string(PackingKind kind) {
  switch (kind) {
    case PackingKind::uniform_matroid: return "uniform_matroid";
    case PackingKind::partition_matroid: return "partition_matroid";
    case PackingKind::graphic_matroid: return "graphic_matroid";
    case PackingKind::matching: return "matching";
    case PackingKind::k_system: return "k_system";
  }
  return "unknown";
}

PackingOracle PackingOracle::matroid(Matroid m) {
  PackingOracle o;
  switch (m.kind()) {
    case MatroidKind::uniform: o.kind_ = PackingKind::uniform_matroid; break;
    case MatroidKind::partition: o.kind_ = PackingKind::partition_matroid; break;
    case MatroidKind::graphic: o.kind_ = PackingKind::graphic_matroid; break;
  }
  o.ground_size_ = m.ground_size();
  o.matroids_.push_back(std::move(m));
  return o;
}

PackingOracle PackingOracle::matching(std::size_t vertices, std::vector<Edge> edges) {
  for (const auto& [a, b] : edges)
    if (a >= vertices || b >= vertices)
      throw Error(ErrorCode::invalid_argument, "graph edge endpoint out of range");
  PackingOracle o;
  o.kind_ = PackingKind::matching;
  o.ground_size_ = edges.size();
  o.vertices_ = vertices;
  o.edges_ = std::move(edges);
  return o;
}

PackingOracle PackingOracle::k_system(std::vector<Matroid> matroids) {
  if (matroids.empty()) throw Error(ErrorCode::invalid_argument, "k_system needs a matroid");
  for (const auto& m : matroids)
    if (m.ground_size() != matroids.front().ground_size())
      throw Error(ErrorCode::invalid_argument, "k_system matroids disagree on ground size");
  PackingOracle o;
  o.kind_ = PackingKind::k_system;
  o.ground_size_ = matroids.front().ground_size();
  o.matroids_ = std::move(matroids);
  return o;
}

bool PackingOracle::is_feasible(const ElementSet& s) const {
  check_ground(s, ground_size_);
  if (kind_ == PackingKind::matching) return matching_feasible(vertices_, edges_, s);
  return std::all_of(matroids_.begin(), matroids_.end(),
                     [&](const Matroid& m) { return m.is_independent(s); });
}

bool PackingOracle::can_extend(const ElementSet& s, std::size_t element) const {
  if (!is_feasible(s))
    throw Error(ErrorCode::infeasible_base, s.to_string() + " is not feasible");
  if (element >= ground_size_) throw Error(ErrorCode::invalid_argument, "element out of range");
  return is_feasible(s.with(element));
}

std::size_t PackingOracle::max_feasible_size() const {
  switch (kind_) {
    case PackingKind::matching:
      return maximum_matching_size(vertices_, edges_);
    case PackingKind::k_system: {
      if (ground_size_ > 20) {
        std::size_t bound = ground_size_;
        for (const auto& m : matroids_) bound = std::min(bound, m.rank());
        return bound;
      }
      ElementSet current(ground_size_);
      std::size_t best = 0;
      std::function<void(std::size_t)> branch = [&](std::size_t next) {
        best = std::max(best, current.size());
        if (next == ground_size_ || current.size() + (ground_size_ - next) <= best) return;
        current.insert(next);
        if (is_feasible(current)) branch(next + 1);
        current.erase(next);
        branch(next + 1);
      };
      branch(0);
      return best;
    }
    default:
      return matroids_.front().rank();
  }
}

std::string PackingOracle::describe() const {
  switch (kind_) {
    case PackingKind::matching:
      return "matching(" + edge_list(edges_) + ")";
    case PackingKind::k_system: {
      std::string out = "k_system[";
      for (std::size_t i = 0; i < matroids_.size(); ++i)
        out += (i ? "; " : "") + matroids_[i].describe();
      return out + "]";
    }
    default:
      return matroids_.front().describe();
  }
}

// ---------------------------------------------------------------------------
// CoveringOracle

std::string_view to_string(CoveringKind kind) {
  return kind == CoveringKind::matroid_base ? "matroid_base" : "set_cover";
}

CoveringOracle CoveringOracle::matroid_base(Matroid m) {
  CoveringOracle o;
  o.kind_ = CoveringKind::matroid_base;
  o.ground_size_ = m.ground_size();
  o.matroids_.push_back(std::move(m));
  return o;
}

CoveringOracle CoveringOracle::set_cover(std::size_t universe,
                                         std::vector<std::vector<std::size_t>> sets) {
  std::vector<std::size_t> count(universe, 0);
  for (auto& set : sets) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    for (auto item : set) {
      if (item >= universe)
        throw Error(ErrorCode::invalid_argument, "set-cover item outside the universe");
      ++count[item];
    }
  }
  for (std::size_t item = 0; item < universe; ++item)
    if (count[item] == 0)
      throw Error(ErrorCode::invalid_argument,
                  "universe item " + std::to_string(item) + " is in no set");
  CoveringOracle o;
  o.kind_ = CoveringKind::set_cover;
  o.ground_size_ = sets.size();
  o.universe_ = universe;
  o.sets_ = std::move(sets);
  o.frequency_ = count.empty() ? 0 : *std::max_element(count.begin(), count.end());
  return o;
}

bool CoveringOracle::is_feasible(const ElementSet& s) const {
  check_ground(s, ground_size_);
  if (kind_ == CoveringKind::matroid_base) {
    const auto& m = matroids_.front();
    return m.rank(s) == m.rank();
  }
  std::vector<bool> covered(universe_, false);
  std::size_t count = 0;
  for (auto e : s.elements())
    for (auto item : sets_[e])
      if (!covered[item]) {
        covered[item] = true;
        ++count;
      }
  return count == universe_;
}

std::size_t CoveringOracle::newly_covered(const ElementSet& s, std::size_t element) const {
  check_ground(s, ground_size_);
  if (kind_ != CoveringKind::set_cover) return 0;
  std::vector<bool> covered(universe_, false);
  for (auto e : s.elements())
    for (auto item : sets_[e]) covered[item] = true;
  std::size_t fresh = 0;
  for (auto item : sets_[element])
    if (!covered[item]) ++fresh;
  return fresh;
}

bool CoveringOracle::raises_rank(const ElementSet& s, std::size_t element) const {
  if (kind_ != CoveringKind::matroid_base) return false;
  const auto& m = matroids_.front();
  return !s.contains(element) && m.rank(s.with(element)) > m.rank(s);
}

std::string CoveringOracle::describe() const {
  if (kind_ == CoveringKind::matroid_base) return "matroid_base[" + matroids_.front().describe() + "]";
  return "set_cover(universe=" + std::to_string(universe_) + ", sets=" +
         std::to_string(sets_.size()) + ", f=" + std::to_string(frequency_) + ")";
}

}  // namespace mpoi

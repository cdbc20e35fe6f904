#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <ranges>
#include <vector>

#include "vrjp/offspring.hpp"

namespace vrjp {

using VertexId = std::uint32_t;

inline constexpr VertexId kNoParent = std::numeric_limits<VertexId>::max();

/// Independent removal of each non-root vertex (with its descendants).
struct PercolationLayer {
  double eta = 0.0;
  std::uint64_t seed = 0;
};

/// Everything needed to (re)generate any vertex's children: the offspring
/// law, the tree seed, an optional height cutoff and percolation layers.
struct TreeLaw {
  OffspringDistribution nu = OffspringDistribution::deterministic(2);
  std::uint64_t seed = 0;
  std::optional<int> max_depth;
  std::vector<PercolationLayer> percolation;
};

/// Rooted tree whose vertices are materialized on demand. The children of
/// a vertex depend only on the law and the vertex's path from the root (its
/// path key), so expansion order never changes the tree.
///
/// Vertex ids are dense and allocated at expansion; siblings get
/// consecutive ids. A tree is single-writer: children() may expand.
class RootedTree {
 public:
  using ChildRange = std::ranges::iota_view<VertexId, VertexId>;

  explicit RootedTree(TreeLaw law);

  const TreeLaw& law() const { return law_; }
  VertexId root() const { return 0; }
  std::size_t size() const { return parent_.size(); }

  VertexId parent(VertexId v) const { return parent_[v]; }
  int height(VertexId v) const { return height_[v]; }
  std::uint64_t path_key(VertexId v) const { return path_key_[v]; }
  bool expanded(VertexId v) const { return expanded_[v]; }

  /// Children of v, expanding v first if needed.
  ChildRange children(VertexId v);
  /// Number of neighbours (parent plus children), expanding v if needed.
  std::size_t degree(VertexId v);

  /// Expands every vertex of height < depth (and those at depth when the
  /// law's cutoff stops them anyway). Breadth-first, so ids follow BFS order.
  void expand_to_depth(int depth);

  /// Number of vertices at height n; expands the tree to depth n.
  std::size_t count_at_height(int n);

  /// Materialized vertices as "id parent_id height" lines, one per vertex,
  /// renumbered breadth-first (root 0, parent -1). Two trees with the same
  /// law and materialized region produce identical text.
  void write_text(std::ostream& out) const;

 private:
  friend RootedTree percolate(const RootedTree& tree, double eta, std::uint64_t seed);
  friend RootedTree truncate(const RootedTree& tree, int max_height);

  // Children of v under the law, as the path keys of the retained children.
  std::vector<std::uint64_t> draw_children(VertexId v) const;
  void expand(VertexId v);
  VertexId add_vertex(VertexId parent, int height, std::uint64_t key);

  // Copy of the materialized part of `source` under a stricter law: kept
  // vertices are those whose ancestors were all kept by `keep`.
  template <class Keep>
  static RootedTree rebuild(const RootedTree& source, TreeLaw law, Keep keep);

  TreeLaw law_;
  std::vector<VertexId> parent_;
  std::vector<int> height_;
  std::vector<std::uint64_t> path_key_;
  std::vector<VertexId> first_child_;
  std::vector<VertexId> child_count_;
  std::vector<bool> expanded_;
};

/// Galton-Watson tree with offspring law nu, expanded to height `depth`
/// and cut off there.
RootedTree generate_gw(const OffspringDistribution& nu, int depth, std::uint64_t seed);

/// Lazily expanded Galton-Watson tree without a height cutoff.
RootedTree lazy_gw(const OffspringDistribution& nu, std::uint64_t seed);

/// Regular b-ary tree (every vertex has b children), lazily expanded;
/// b = 1 is the half-line {0, 1, 2, ...}. Optional height cutoff.
RootedTree regular_tree(std::uint32_t b, std::optional<int> max_depth = std::nullopt);

/// Removes each non-root vertex, with its descendants, independently with
/// probability eta. The root is never removed.
RootedTree percolate(const RootedTree& tree, double eta, std::uint64_t seed);

/// Restriction to vertices of height <= max_height.
RootedTree truncate(const RootedTree& tree, int max_height);

}  // namespace vrjp

#pragma once

// Quadtree forest over a rectangular domain and immutable leaf-set views
// (meshes) on it. Every mesh used by a run shares one forest, so the union of
// two meshes is a tree overlay rather than a geometric intersection.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "dgcd/common.hpp"

namespace dgcd {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Deepest refinement level a forest accepts.
inline constexpr int kMaxLevel = 20;

struct ForestNode {
  NodeId parent = kNoNode;
  NodeId first_child = kNoNode;  // children are first_child + {0:SW, 1:SE, 2:NW, 3:NE}
  std::int32_t level = 0;
  std::int64_t ix = 0;  // integer position on the level-`level` grid of the whole domain
  std::int64_t iy = 0;
};

/// Persistent quadtree forest. Roots form a uniform nx-by-ny grid over the
/// domain; children, once created, are never removed, so node ids are stable
/// for the forest's lifetime.
///
/// Mutation (child creation) is single-writer; views hold shared ownership.
class QuadForest {
 public:
  static std::shared_ptr<QuadForest> create(const Rect& domain, int nx, int ny);

  const Rect& domain() const { return domain_; }
  int roots_x() const { return nx_; }
  int roots_y() const { return ny_; }
  std::size_t size() const { return nodes_.size(); }

  const ForestNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  Rect rect(NodeId id) const;
  bool has_children(NodeId id) const { return node(id).first_child != kNoNode; }
  NodeId child(NodeId id, int quadrant) const { return node(id).first_child + quadrant; }

  /// Creates the four children if they do not exist yet; returns the first.
  NodeId ensure_children(NodeId id);

  /// Node at (level, ix, iy), or kNoNode if it was never created.
  NodeId find(int level, std::int64_t ix, std::int64_t iy) const;

  /// Number of cells per direction on the given level.
  std::int64_t cells_x(int level) const { return static_cast<std::int64_t>(nx_) << level; }
  std::int64_t cells_y(int level) const { return static_cast<std::int64_t>(ny_) << level; }

 private:
  QuadForest(const Rect& domain, int nx, int ny);
  static std::uint64_t key(int level, std::int64_t ix, std::int64_t iy);

  Rect domain_;
  int nx_;
  int ny_;
  std::vector<ForestNode> nodes_;
  std::unordered_map<std::uint64_t, NodeId> lookup_;
};

enum class EdgeOrientation { Vertical, Horizontal };

/// A face piece between two leaves (or a leaf and the boundary). Interior
/// segments always match the finer side's edge. The normal points from the
/// left cell to the right cell; on the boundary it points out of the domain.
struct EdgeSegment {
  Vec2 a;
  Vec2 b;
  EdgeOrientation orientation = EdgeOrientation::Vertical;
  std::size_t left = 0;                  // local cell index in the owning mesh
  std::optional<std::size_t> right;      // empty on the boundary
  Vec2 normal;
  double length = 0.0;

  bool boundary() const { return !right.has_value(); }
};

/// Immutable set of leaves tiling the domain. Copies are cheap.
class MeshView {
 public:
  MeshView(std::shared_ptr<QuadForest> forest, std::vector<NodeId> leaves);

  /// Fresh forest with nx-by-ny roots; the mesh is the set of roots.
  static MeshView uniform(const Rect& domain, int nx, int ny);

  const QuadForest& forest() const { return *forest_; }
  const std::shared_ptr<QuadForest>& forest_ptr() const { return forest_; }
  std::uint64_t id() const { return data_->id; }

  std::size_t num_cells() const { return data_->leaves.size(); }
  std::span<const NodeId> cells() const { return data_->leaves; }
  NodeId node(std::size_t cell) const { return data_->leaves[cell]; }
  Rect cell_rect(std::size_t cell) const { return forest_->rect(node(cell)); }
  int cell_level(std::size_t cell) const { return forest_->node(node(cell)).level; }

  bool is_leaf(NodeId id) const;
  std::optional<std::size_t> cell_index(NodeId id) const;

  /// Leaf containing the level-`level` cell (ix, iy); empty if that region is
  /// subdivided further in this mesh. Coordinates must lie in the domain.
  std::optional<NodeId> covering_leaf(int level, std::int64_t ix, std::int64_t iy) const;

  /// Leaf containing the point (ties resolved towards larger coordinates).
  std::optional<std::size_t> locate(Vec2 p) const;

  const std::vector<EdgeSegment>& edges() const { return data_->edges; }

  bool same_leaves(const MeshView& other) const;

 private:
  struct Data {
    std::uint64_t id = 0;
    std::vector<NodeId> leaves;
    std::vector<std::int32_t> index;  // node id -> local cell index, -1 otherwise
    std::vector<EdgeSegment> edges;
  };
  std::shared_ptr<QuadForest> forest_;
  std::shared_ptr<const Data> data_;
};

/// Refines each marked leaf into four children plus whatever closure is needed
/// to keep at most one hanging node per edge.
MeshView refine_cells(const MeshView& mesh, std::span<const NodeId> marked);

/// Replaces a sibling group by its parent when all four siblings are marked
/// and the result stays 1-irregular; groups are visited by ascending parent id.
MeshView coarsen_cells(const MeshView& mesh, std::span<const NodeId> marked);

/// Union (finest common refinement) of two meshes on the same forest.
struct Overlay {
  MeshView mesh;
  std::vector<std::size_t> cell_in_a;  // overlay cell -> containing cell of A
  std::vector<std::size_t> cell_in_b;  // overlay cell -> containing cell of B
};

Overlay overlay(const MeshView& a, const MeshView& b);

/// True when every interior segment joins cells whose levels differ by <= 1.
bool is_one_irregular(const MeshView& mesh);

/// Mesh obtained from `mesh` by `times` rounds of uniform refinement.
MeshView refine_uniformly(const MeshView& mesh, int times = 1);

}  // namespace dgcd

#include "dgcd/forest.hpp"

#include <algorithm>
#include <atomic>
#include <functional>

namespace dgcd {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

enum Side { West = 0, East = 1, South = 2, North = 3 };

// Walks from the root towards (level, ix, iy); returns the first node that
// satisfies `is_leaf`, or nullopt if the region is subdivided below `level`.
template <class IsLeaf>
std::optional<NodeId> covering(const QuadForest& forest, const IsLeaf& is_leaf, int level,
                               std::int64_t ix, std::int64_t iy) {
  const auto rx = ix >> level;
  const auto ry = iy >> level;
  NodeId n = static_cast<NodeId>(rx + ry * forest.roots_x());
  for (int k = 0;; ++k) {
    if (is_leaf(n)) return n;
    if (k == level) return std::nullopt;
    if (!forest.has_children(n)) throw Error("mesh does not tile the domain");
    const int shift = level - k - 1;
    const int q = static_cast<int>((ix >> shift) & 1) + 2 * static_cast<int>((iy >> shift) & 1);
    n = forest.child(n, q);
  }
}

bool in_domain(const QuadForest& f, int level, std::int64_t ix, std::int64_t iy) {
  return ix >= 0 && iy >= 0 && ix < f.cells_x(level) && iy < f.cells_y(level);
}

void neighbour_coords(const ForestNode& n, int side, std::int64_t& ix, std::int64_t& iy) {
  ix = n.ix;
  iy = n.iy;
  switch (side) {
    case West: --ix; break;
    case East: ++ix; break;
    case South: --iy; break;
    default: ++iy; break;
  }
}

// Mutable leaf flags over the forest, used while building a new mesh.
struct LeafFlags {
  std::shared_ptr<QuadForest> forest;
  std::vector<char> flag;

  explicit LeafFlags(const MeshView& mesh) : forest(mesh.forest_ptr()), flag(forest->size(), 0) {
    for (NodeId n : mesh.cells()) flag[static_cast<std::size_t>(n)] = 1;
  }
  bool operator()(NodeId n) const {
    return static_cast<std::size_t>(n) < flag.size() && flag[static_cast<std::size_t>(n)] != 0;
  }
  void set(NodeId n, bool v) {
    if (static_cast<std::size_t>(n) >= flag.size()) flag.resize(forest->size(), 0);
    flag[static_cast<std::size_t>(n)] = v ? 1 : 0;
  }
  std::vector<NodeId> leaves() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < flag.size(); ++i)
      if (flag[i]) out.push_back(static_cast<NodeId>(i));
    return out;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// QuadForest

QuadForest::QuadForest(const Rect& domain, int nx, int ny) : domain_(domain), nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1) throw Error("forest needs at least one root per direction");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) throw Error("degenerate domain");
  nodes_.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      ForestNode n;
      n.ix = i;
      n.iy = j;
      nodes_.push_back(n);
    }
}

std::shared_ptr<QuadForest> QuadForest::create(const Rect& domain, int nx, int ny) {
  return std::shared_ptr<QuadForest>(new QuadForest(domain, nx, ny));
}

Rect QuadForest::rect(NodeId id) const {
  const ForestNode& n = node(id);
  const double hx = domain_.width() / static_cast<double>(cells_x(n.level));
  const double hy = domain_.height() / static_cast<double>(cells_y(n.level));
  const double x0 = domain_.x0 + static_cast<double>(n.ix) * hx;
  const double y0 = domain_.y0 + static_cast<double>(n.iy) * hy;
  // Snap the outer faces onto the domain so leaf areas add up exactly.
  const double x1 = n.ix + 1 == cells_x(n.level) ? domain_.x1 : x0 + hx;
  const double y1 = n.iy + 1 == cells_y(n.level) ? domain_.y1 : y0 + hy;
  return {x0, x1, y0, y1};
}

NodeId QuadForest::ensure_children(NodeId id) {
  if (has_children(id)) return node(id).first_child;
  const ForestNode parent = node(id);
  if (parent.level + 1 > kMaxLevel) throw Error("maximum refinement level exceeded");
  const auto first = static_cast<NodeId>(nodes_.size());
  for (int q = 0; q < 4; ++q) {
    ForestNode c;
    c.parent = id;
    c.level = parent.level + 1;
    c.ix = 2 * parent.ix + (q & 1);
    c.iy = 2 * parent.iy + (q >> 1);
    nodes_.push_back(c);
  }
  nodes_[static_cast<std::size_t>(id)].first_child = first;
  return first;
}

NodeId QuadForest::find(int level, std::int64_t ix, std::int64_t iy) const {
  if (level < 0 || !in_domain(*this, level, ix, iy)) return kNoNode;
  NodeId n = static_cast<NodeId>((ix >> level) + (iy >> level) * nx_);
  for (int k = 0; k < level; ++k) {
    if (!has_children(n)) return kNoNode;
    const int shift = level - k - 1;
    n = child(n, static_cast<int>((ix >> shift) & 1) + 2 * static_cast<int>((iy >> shift) & 1));
  }
  return n;
}

// ---------------------------------------------------------------------------
// MeshView

MeshView::MeshView(std::shared_ptr<QuadForest> forest, std::vector<NodeId> leaves)
    : forest_(std::move(forest)) {
  if (!forest_) throw Error("mesh view needs a forest");
  auto data = std::make_shared<Data>();
  data->id = next_mesh_id++;
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
  data->index.assign(forest_->size(), -1);
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const NodeId n = leaves[k];
    if (n < 0 || static_cast<std::size_t>(n) >= forest_->size()) throw Error("leaf id out of range");
    data->index[static_cast<std::size_t>(n)] = static_cast<std::int32_t>(k);
  }
  data->leaves = std::move(leaves);

  const QuadForest& f = *forest_;
  auto leaf = [&](NodeId n) {
    return static_cast<std::size_t>(n) < data->index.size() && data->index[static_cast<std::size_t>(n)] >= 0;
  };

  for (std::size_t k = 0; k < data->leaves.size(); ++k) {
    const ForestNode& n = f.node(data->leaves[k]);
    const Rect r = f.rect(data->leaves[k]);
    for (int side = 0; side < 4; ++side) {
      EdgeSegment seg;
      const bool vertical = side == West || side == East;
      seg.orientation = vertical ? EdgeOrientation::Vertical : EdgeOrientation::Horizontal;
      switch (side) {
        case West: seg.a = {r.x0, r.y0}; seg.b = {r.x0, r.y1}; break;
        case East: seg.a = {r.x1, r.y0}; seg.b = {r.x1, r.y1}; break;
        case South: seg.a = {r.x0, r.y0}; seg.b = {r.x1, r.y0}; break;
        default: seg.a = {r.x0, r.y1}; seg.b = {r.x1, r.y1}; break;
      }
      seg.length = vertical ? r.height() : r.width();

      std::int64_t jx = 0;
      std::int64_t jy = 0;
      neighbour_coords(n, side, jx, jy);
      if (!in_domain(f, n.level, jx, jy)) {
        seg.left = k;
        static constexpr Vec2 outward[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        seg.normal = outward[side];
        data->edges.push_back(seg);
        continue;
      }
      const auto cov = covering(f, leaf, n.level, jx, jy);
      if (!cov) continue;  // the finer neighbours own this face
      const std::size_t other = static_cast<std::size_t>(data->index[static_cast<std::size_t>(*cov)]);
      const bool coarser = f.node(*cov).level < n.level;
      if (!coarser && (side == West || side == South)) continue;  // emitted from the other cell
      const bool we_are_left = side == East || side == North;
      seg.left = we_are_left ? k : other;
      seg.right = we_are_left ? other : k;
      seg.normal = vertical ? Vec2{1, 0} : Vec2{0, 1};
      data->edges.push_back(seg);
    }
  }
  data_ = std::move(data);
}

MeshView MeshView::uniform(const Rect& domain, int nx, int ny) {
  auto forest = QuadForest::create(domain, nx, ny);
  std::vector<NodeId> roots(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = static_cast<NodeId>(i);
  return MeshView(std::move(forest), std::move(roots));
}

bool MeshView::is_leaf(NodeId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < data_->index.size() &&
         data_->index[static_cast<std::size_t>(id)] >= 0;
}

std::optional<std::size_t> MeshView::cell_index(NodeId id) const {
  if (!is_leaf(id)) return std::nullopt;
  return static_cast<std::size_t>(data_->index[static_cast<std::size_t>(id)]);
}

std::optional<NodeId> MeshView::covering_leaf(int level, std::int64_t ix, std::int64_t iy) const {
  return covering(*forest_, [this](NodeId n) { return is_leaf(n); }, level, ix, iy);
}

std::optional<std::size_t> MeshView::locate(Vec2 p) const {
  const Rect& d = forest_->domain();
  if (!d.contains(p)) return std::nullopt;
  const double sx = (p.x - d.x0) / d.width();
  const double sy = (p.y - d.y0) / d.height();
  const std::int64_t nx = forest_->cells_x(kMaxLevel);
  const std::int64_t ny = forest_->cells_y(kMaxLevel);
  const auto ix = std::clamp<std::int64_t>(static_cast<std::int64_t>(sx * static_cast<double>(nx)), 0, nx - 1);
  const auto iy = std::clamp<std::int64_t>(static_cast<std::int64_t>(sy * static_cast<double>(ny)), 0, ny - 1);
  const auto leaf = covering(*forest_, [this](NodeId n) { return is_leaf(n); }, kMaxLevel, ix, iy);
  if (!leaf) return std::nullopt;
  return cell_index(*leaf);
}

bool MeshView::same_leaves(const MeshView& other) const {
  return forest_ == other.forest_ && data_->leaves == other.data_->leaves;
}

// ---------------------------------------------------------------------------
// Refinement, coarsening, overlay

MeshView refine_cells(const MeshView& mesh, std::span<const NodeId> marked) {
  LeafFlags flags(mesh);
  QuadForest& forest = *flags.forest;

  for (NodeId m : marked)
    if (!mesh.is_leaf(m)) throw std::invalid_argument("refine_cells: marked cell is not a leaf");

  // Refining a cell at level l requires every edge neighbour to be at level >= l.
  std::function<void(NodeId)> refine = [&](NodeId id) {
    if (!flags(id)) return;
    const ForestNode n = forest.node(id);
    for (int side = 0; side < 4; ++side) {
      std::int64_t jx = 0;
      std::int64_t jy = 0;
      neighbour_coords(n, side, jx, jy);
      if (!in_domain(forest, n.level, jx, jy)) continue;
      const auto cov = covering(forest, flags, n.level, jx, jy);
      if (cov && forest.node(*cov).level < n.level) refine(*cov);
    }
    const NodeId first = forest.ensure_children(id);
    flags.set(id, false);
    for (int q = 0; q < 4; ++q) flags.set(first + q, true);
  };

  std::vector<NodeId> order(marked.begin(), marked.end());
  std::sort(order.begin(), order.end());
  for (NodeId m : order) refine(m);
  return MeshView(mesh.forest_ptr(), flags.leaves());
}

MeshView coarsen_cells(const MeshView& mesh, std::span<const NodeId> marked) {
  LeafFlags flags(mesh);
  const QuadForest& forest = *flags.forest;

  std::vector<char> is_marked(forest.size(), 0);
  std::vector<NodeId> parents;
  for (NodeId m : marked) {
    if (!mesh.is_leaf(m)) throw std::invalid_argument("coarsen_cells: marked cell is not a leaf");
    is_marked[static_cast<std::size_t>(m)] = 1;
    const NodeId p = forest.node(m).parent;
    if (p != kNoNode) parents.push_back(p);
  }
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());

  for (NodeId p : parents) {
    const NodeId first = forest.node(p).first_child;
    bool group = true;
    for (int q = 0; q < 4 && group; ++q)
      group = flags(first + q) && is_marked[static_cast<std::size_t>(first + q)];
    if (!group) continue;

    // The parent may only neighbour leaves at most one level finer than itself.
    const ForestNode& n = forest.node(p);
    bool legal = true;
    for (int side = 0; side < 4 && legal; ++side) {
      std::int64_t jx = 0;
      std::int64_t jy = 0;
      neighbour_coords(n, side, jx, jy);
      if (!in_domain(forest, n.level, jx, jy)) continue;
      for (int s = 0; s < 2 && legal; ++s) {
        std::int64_t cx = 2 * jx;
        std::int64_t cy = 2 * jy;
        if (side == West) cx += 1;
        if (side == South) cy += 1;
        if (side == West || side == East)
          cy += s;
        else
          cx += s;
        legal = covering(forest, flags, n.level + 1, cx, cy).has_value();
      }
    }
    if (!legal) continue;
    for (int q = 0; q < 4; ++q) flags.set(first + q, false);
    flags.set(p, true);
  }
  return MeshView(mesh.forest_ptr(), flags.leaves());
}

Overlay overlay(const MeshView& a, const MeshView& b) {
  if (a.forest_ptr() != b.forest_ptr()) throw Error("overlay: meshes live on different forests");
  const QuadForest& forest = a.forest();

  struct Item {
    NodeId node;
    std::size_t in_a;
    std::size_t in_b;
  };
  std::vector<Item> items;
  items.reserve(std::max(a.num_cells(), b.num_cells()));

  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::function<void(NodeId, std::size_t, std::size_t)> visit = [&](NodeId n, std::size_t ia, std::size_t ib) {
    if (ia == none) {
      if (auto k = a.cell_index(n)) ia = *k;
    }
    if (ib == none) {
      if (auto k = b.cell_index(n)) ib = *k;
    }
    if (ia != none && ib != none) {
      items.push_back({n, ia, ib});
      return;
    }
    if (!forest.has_children(n)) throw Error("overlay: mesh does not tile the domain");
    for (int q = 0; q < 4; ++q) visit(forest.child(n, q), ia, ib);
  };
  const auto roots = static_cast<NodeId>(forest.roots_x() * forest.roots_y());
  for (NodeId r = 0; r < roots; ++r) visit(r, none, none);

  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.node < y.node; });
  std::vector<NodeId> leaves;
  Overlay out{MeshView(a.forest_ptr(), [&] {
                for (const Item& it : items) leaves.push_back(it.node);
                return leaves;
              }()),
              {},
              {}};
  out.cell_in_a.reserve(items.size());
  out.cell_in_b.reserve(items.size());
  for (const Item& it : items) {
    out.cell_in_a.push_back(it.in_a);
    out.cell_in_b.push_back(it.in_b);
  }
  return out;
}

bool is_one_irregular(const MeshView& mesh) {
  for (const EdgeSegment& e : mesh.edges()) {
    if (e.boundary()) continue;
    if (std::abs(mesh.cell_level(e.left) - mesh.cell_level(*e.right)) > 1) return false;
  }
  return true;
}

MeshView refine_uniformly(const MeshView& mesh, int times) {
  MeshView out = mesh;
  for (int i = 0; i < times; ++i) {
    std::vector<NodeId> all(out.cells().begin(), out.cells().end());
    out = refine_cells(out, all);
  }
  return out;
}

}  // namespace dgcd

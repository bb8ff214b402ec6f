#include <doctest.h>

#include <map>
#include <set>

#include "helpers.hpp"

using namespace dgcd;
using namespace testing;

namespace {

// Length of the shared boundary of two rectangles (0 if they only touch at a
// corner or not at all).
double shared_length(const Rect& a, const Rect& b) {
  const double tol = 1e-14;
  if (std::abs(a.x1 - b.x0) < tol || std::abs(b.x1 - a.x0) < tol)
    return std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  if (std::abs(a.y1 - b.y0) < tol || std::abs(b.y1 - a.y0) < tol)
    return std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  return 0.0;
}

// Exhaustive pairwise check: face neighbours differ by at most one level.
bool one_irregular_by_pairs(const MeshView& mesh) {
  for (std::size_t i = 0; i < mesh.num_cells(); ++i)
    for (std::size_t j = i + 1; j < mesh.num_cells(); ++j)
      if (shared_length(mesh.cell_rect(i), mesh.cell_rect(j)) > 1e-14 &&
          std::abs(mesh.cell_level(i) - mesh.cell_level(j)) > 1)
        return false;
  return true;
}

MeshView refine_one(const MeshView& mesh, NodeId id) { return refine_cells(mesh, std::vector<NodeId>{id}); }

}  // namespace

TEST_CASE("refining the single root gives four level-1 leaves") {
  const MeshView m = MeshView::uniform(unit_square(), 1, 1);
  const MeshView r = refine_one(m, m.node(0));
  REQUIRE(r.num_cells() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(r.cell_level(k) == 1);
  CHECK(m.num_cells() == 1);
  CHECK(sum_leaf_areas(r) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("children quadrisect the parent") {
  auto f = QuadForest::create({-1.0, 1.0, -1.0, 1.0}, 2, 2);
  const NodeId c = f->ensure_children(0);
  const Rect p = f->rect(0);
  double area = 0.0;
  for (int q = 0; q < 4; ++q) {
    const Rect r = f->rect(c + q);
    CHECK(r.width() == doctest::Approx(0.5 * p.width()));
    CHECK(r.height() == doctest::Approx(0.5 * p.height()));
    CHECK(p.contains(r.center()));
    area += r.area();
  }
  CHECK(area == doctest::Approx(p.area()));
  CHECK(f->rect(c + 0).x0 == p.x0);
  CHECK(f->rect(c + 3).x1 == p.x1);
  CHECK(f->ensure_children(0) == c);
}

TEST_CASE("refining nothing keeps the leaf set") {
  const MeshView m = MeshView::uniform(unit_square(), 3, 2);
  const MeshView r = refine_cells(m, std::vector<NodeId>{});
  CHECK(r.same_leaves(m));
}

TEST_CASE("refine rejects non-leaves") {
  const MeshView m = MeshView::uniform(unit_square(), 1, 1);
  const MeshView r = refine_one(m, m.node(0));
  CHECK_THROWS_AS(refine_one(r, m.node(0)), std::invalid_argument);
}

TEST_CASE("closure refines neighbours of a twice-refined root") {
  const MeshView m = MeshView::uniform(unit_square(), 2, 2);
  // Root 0 is the south-west root; its north-east child touches roots 1 and 2.
  const MeshView once = refine_one(m, m.node(0));
  const NodeId ne = once.forest().child(m.node(0), 3);
  const MeshView twice = refine_one(once, ne);
  CHECK(is_one_irregular(twice));
  CHECK(one_irregular_by_pairs(twice));
  CHECK_FALSE(twice.is_leaf(m.node(1)));
  CHECK_FALSE(twice.is_leaf(m.node(2)));
  CHECK(twice.is_leaf(m.node(3)));
  CHECK(sum_leaf_areas(twice) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("closure on random meshes keeps one hanging node per edge") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const MeshView m = random_mesh(rng, unit_square(), 2, 3, 5);
    CHECK(one_irregular_by_pairs(m));
    CHECK(is_one_irregular(m));
    CHECK(sum_leaf_areas(m) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("coarsening a full sibling group restores the parent") {
  const MeshView m = MeshView::uniform(unit_square(), 1, 1);
  const MeshView r = refine_one(m, m.node(0));
  const MeshView c = coarsen_cells(r, std::vector<NodeId>(r.cells().begin(), r.cells().end()));
  CHECK(c.same_leaves(m));
}

TEST_CASE("coarsening needs all four siblings") {
  const MeshView m = MeshView::uniform(unit_square(), 1, 1);
  const MeshView r = refine_one(m, m.node(0));
  std::vector<NodeId> three(r.cells().begin(), r.cells().end());
  three.pop_back();
  CHECK(coarsen_cells(r, three).same_leaves(r));
}

TEST_CASE("coarsening that would leave two hanging nodes on an edge is skipped") {
  const MeshView m = MeshView::uniform(unit_square(), 2, 2);
  const MeshView once = refine_one(m, m.node(0));
  const MeshView twice = refine_one(once, once.forest().child(m.node(0), 3));
  // Root 1 (south-east) was refined by closure; its west children border level-2 cells.
  std::vector<NodeId> group;
  for (int q = 0; q < 4; ++q) group.push_back(twice.forest().child(m.node(1), q));
  for (NodeId id : group) REQUIRE(twice.is_leaf(id));
  const MeshView c = coarsen_cells(twice, group);
  CHECK(c.same_leaves(twice));
  CHECK(one_irregular_by_pairs(c));
}

TEST_CASE("refine then coarsen with the same marks restores the mesh") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MeshView m = MeshView::uniform(unit_square(), 4, 4);
    std::vector<NodeId> marks{m.node(static_cast<std::size_t>(rng() % 16))};
    const MeshView r = refine_cells(m, marks);
    std::vector<NodeId> kids;
    for (int q = 0; q < 4; ++q) kids.push_back(r.forest().child(marks[0], q));
    CHECK(coarsen_cells(r, kids).same_leaves(m));
  }
}

TEST_CASE("overlay of a mesh with itself is the mesh") {
  std::mt19937 rng(3);
  const MeshView m = random_mesh(rng, unit_square(), 2, 2, 3);
  const Overlay o = overlay(m, m);
  CHECK(o.mesh.same_leaves(m));
  for (std::size_t k = 0; k < o.mesh.num_cells(); ++k) {
    CHECK(m.node(o.cell_in_a[k]) == o.mesh.node(k));
    CHECK(m.node(o.cell_in_b[k]) == o.mesh.node(k));
  }
}

TEST_CASE("overlay of root and its children is the children") {
  const MeshView a = MeshView::uniform(unit_square(), 1, 1);
  const MeshView b = refine_one(a, a.node(0));
  const Overlay o = overlay(a, b);
  CHECK(o.mesh.same_leaves(b));
  for (std::size_t k = 0; k < 4; ++k) CHECK(o.cell_in_a[k] == 0);
}

TEST_CASE("overlay of NW-refined and SE-refined meshes has ten leaves") {
  const MeshView root = MeshView::uniform(unit_square(), 1, 1);
  const MeshView base = refine_one(root, root.node(0));
  const auto& f = base.forest();
  const MeshView a = refine_one(base, f.child(root.node(0), 2));
  const MeshView b = refine_one(base, f.child(root.node(0), 1));
  REQUIRE(a.num_cells() == 7);
  REQUIRE(b.num_cells() == 7);
  const Overlay o = overlay(a, b);
  CHECK(o.mesh.num_cells() == 10);
  CHECK(sum_leaf_areas(o.mesh) == doctest::Approx(1.0));
}

TEST_CASE("overlay is commutative, conserves area and nests in both meshes") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const MeshView base = random_mesh(rng, {-1.0, 1.0, -1.0, 1.0}, 2, 2, 2);
    MeshView a = base, b = base;
    for (int r = 0; r < 2; ++r) {
      std::vector<NodeId> la(a.cells().begin(), a.cells().end()), lb(b.cells().begin(), b.cells().end());
      std::shuffle(la.begin(), la.end(), rng);
      std::shuffle(lb.begin(), lb.end(), rng);
      la.resize(la.size() / 4 + 1);
      lb.resize(lb.size() / 3 + 1);
      a = refine_cells(a, la);
      b = refine_cells(b, lb);
      std::vector<NodeId> lc(b.cells().begin(), b.cells().end());
      std::shuffle(lc.begin(), lc.end(), rng);
      lc.resize(lc.size() / 2);
      b = coarsen_cells(b, lc);
    }
    const Overlay ab = overlay(a, b);
    const Overlay ba = overlay(b, a);
    CHECK(sorted_leaves(ab.mesh) == sorted_leaves(ba.mesh));
    CHECK(sum_leaf_areas(ab.mesh) == doctest::Approx(4.0).epsilon(1e-12));
    for (std::size_t k = 0; k < ab.mesh.num_cells(); ++k) {
      const Rect r = ab.mesh.cell_rect(k);
      const Rect ra = a.cell_rect(ab.cell_in_a[k]);
      const Rect rb = b.cell_rect(ab.cell_in_b[k]);
      CHECK(ra.contains({r.x0, r.y0}, 1e-14));
      CHECK(ra.contains({r.x1, r.y1}, 1e-14));
      CHECK(rb.contains({r.x0, r.y0}, 1e-14));
      CHECK(rb.contains({r.x1, r.y1}, 1e-14));
      CHECK(ab.mesh.cell_level(k) == std::max(a.cell_level(ab.cell_in_a[k]), b.cell_level(ab.cell_in_b[k])));
    }
  }
}

TEST_CASE("overlay rejects meshes on different forests") {
  const MeshView a = MeshView::uniform(unit_square(), 1, 1);
  const MeshView b = MeshView::uniform(unit_square(), 1, 1);
  CHECK_THROWS_AS(overlay(a, b), Error);
}

TEST_CASE("edge counts on simple meshes") {
  const MeshView one = MeshView::uniform(unit_square(), 1, 1);
  CHECK(one.edges().size() == 4);
  for (const auto& e : one.edges()) CHECK(e.boundary());

  const MeshView two = MeshView::uniform(unit_square(), 2, 2);
  int interior = 0, boundary = 0;
  for (const auto& e : two.edges()) (e.boundary() ? boundary : interior)++;
  CHECK(interior == 4);
  CHECK(boundary == 8);
}

TEST_CASE("a hanging node splits the coarse edge into two half segments") {
  const MeshView m = MeshView::uniform(unit_square(), 2, 1);
  const MeshView r = refine_one(m, m.node(0));
  int on_interface = 0;
  for (const auto& e : r.edges()) {
    if (e.boundary() || e.orientation != EdgeOrientation::Vertical) continue;
    if (std::abs(e.a.x - 0.5) > 1e-14) continue;
    ++on_interface;
    CHECK(e.length == doctest::Approx(0.5));
  }
  CHECK(on_interface == 2);
}

TEST_CASE("edge segments are complete, oriented and match the finer side") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Rect dom{-1.0, 1.0, -1.0, 1.0};
    const MeshView m = random_mesh(rng, dom, 2, 2, 4);
    std::map<std::size_t, double> perimeter;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& e : m.edges()) {
      CHECK(e.length == doctest::Approx(norm(e.b - e.a)));
      CHECK(norm(e.normal) == doctest::Approx(1.0));
      const Vec2 mid = 0.5 * (e.a + e.b);
      const Rect L = m.cell_rect(e.left);
      perimeter[e.left] += e.length;
      if (e.boundary()) {
        CHECK(dot(e.normal, mid - dom.center()) > 0.0);
        const bool on_boundary = std::abs(std::abs(mid.x) - 1.0) < 1e-14 || std::abs(std::abs(mid.y) - 1.0) < 1e-14;
        CHECK(on_boundary);
        continue;
      }
      const Rect R = m.cell_rect(*e.right);
      perimeter[*e.right] += e.length;
      CHECK(dot(e.normal, R.center() - L.center()) > 0.0);
      CHECK(std::abs(m.cell_level(e.left) - m.cell_level(*e.right)) <= 1);
      const double side = e.orientation == EdgeOrientation::Vertical ? std::min(L.height(), R.height())
                                                                      : std::min(L.width(), R.width());
      CHECK(e.length == doctest::Approx(side));
      CHECK(shared_length(L, R) == doctest::Approx(e.length));
      CHECK(pairs.insert({std::min(e.left, *e.right), std::max(e.left, *e.right)}).second);
    }
    for (std::size_t k = 0; k < m.num_cells(); ++k) {
      const Rect r = m.cell_rect(k);
      CHECK(perimeter[k] == doctest::Approx(2.0 * (r.width() + r.height())));
    }
  }
}

TEST_CASE("locate finds the containing leaf") {
  std::mt19937 rng(29);
  const MeshView m = random_mesh(rng, unit_square(), 3, 3, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{u(rng), u(rng)};
    const auto k = m.locate(p);
    REQUIRE(k.has_value());
    CHECK(m.cell_rect(*k).contains(p));
  }
}

TEST_CASE("meshes get distinct ids") {
  const MeshView m = MeshView::uniform(unit_square(), 1, 1);
  const MeshView r = refine_one(m, m.node(0));
  CHECK(m.id() != r.id());
}

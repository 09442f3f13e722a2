#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helmtg/mesh.hpp"

using namespace helmtg;

TEST_CASE("unit square counts") {
    // n=1 square: 1 cell, 4 vertices, 4 boundary edges
    StructuredMesh m1 = StructuredMesh::unit_square(1, ElementKind::Square);
    CHECK(m1.n_elements() == 1);
    CHECK(m1.n_vertices() == 4);
    CHECK(m1.boundary_edges().size() == 4);
    CHECK(m1.spacing() == doctest::Approx(1.0));

    // n=2 square: 4 cells, 9 vertices, 8 boundary edges
    StructuredMesh m2 = StructuredMesh::unit_square(2, ElementKind::Square);
    CHECK(m2.n_elements() == 4);
    CHECK(m2.n_vertices() == 9);
    CHECK(m2.boundary_edges().size() == 8);
    CHECK(m2.spacing() == doctest::Approx(0.5));

    // n=2 triangle: 8 cells, 9 vertices, 8 boundary edges
    // (enumerated by hand: 12 lattice edges + 4 diagonals = 16 edges total)
    StructuredMesh t2 = StructuredMesh::unit_square(2, ElementKind::Triangle);
    CHECK(t2.n_elements() == 8);
    CHECK(t2.n_vertices() == 9);
    CHECK(t2.boundary_edges().size() == 8);
    CHECK(t2.n_edges() == 16);

    CHECK_THROWS(StructuredMesh::unit_square(0, ElementKind::Square));
}

TEST_CASE("Euler formula V - E + F = 1 on the meshed unit square") {
    for (ElementKind kind : {ElementKind::Square, ElementKind::Triangle}) {
        for (int n : {1, 2, 3, 5}) {
            StructuredMesh m = StructuredMesh::unit_square(n, kind);
            const long V = static_cast<long>(m.n_vertices());
            const long E = static_cast<long>(m.n_edges());
            const long F = static_cast<long>(m.n_elements());
            CHECK(V - E + F == 1);
        }
    }
}

TEST_CASE("general unions of cells") {
    // L-shaped domain
    StructuredMesh L = StructuredMesh::from_cells({{0, 0}, {1, 0}, {0, 1}}, 1.0, ElementKind::Square);
    CHECK(L.n_elements() == 3);
    CHECK(L.boundary_edges().size() == 8);
    CHECK_FALSE(L.is_rectangle());
    // disconnected set rejected
    CHECK_THROWS(StructuredMesh::from_cells({{0, 0}, {2, 2}}, 1.0, ElementKind::Square));
}

TEST_CASE("boundary tagging by side") {
    StructuredMesh m = StructuredMesh::unit_square(4, ElementKind::Square);

    SUBCASE("all sides absorbing covers every boundary edge") {
        BoundaryTags tags = tag_all(m, BoundaryTag::Absorbing);
        CHECK(tags.complete(m));
        CHECK(tags.count(BoundaryTag::Absorbing) == m.boundary_edges().size());
    }

    SUBCASE("two non-opposite absorbing sides partition the boundary") {
        BoundaryTags tags = tag_boundary(m, {{Side::Left, BoundaryTag::Absorbing},
                                             {Side::Bottom, BoundaryTag::Absorbing},
                                             {Side::Right, BoundaryTag::Neumann},
                                             {Side::Top, BoundaryTag::Neumann}});
        CHECK(tags.complete(m));
        CHECK(tags.count(BoundaryTag::Absorbing) == 8);
        CHECK(tags.count(BoundaryTag::Neumann) == 8);
        CHECK(tags.count(BoundaryTag::Dirichlet) == 0);
    }

    SUBCASE("missing side is an error") {
        CHECK_THROWS(tag_boundary(m, {{Side::Left, BoundaryTag::Dirichlet}}));
    }

    SUBCASE("re-tagging is idempotent") {
        BoundaryTags a = tag_all(m, BoundaryTag::Absorbing);
        BoundaryTags b = tag_all(m, BoundaryTag::Absorbing);
        for (EdgeKey e : m.boundary_edges()) CHECK(a.get(e) == b.get(e));
    }
}

TEST_CASE("boundary edges enumerated counterclockwise on rectangles") {
    StructuredMesh m = StructuredMesh::unit_square(2, ElementKind::Square);
    const auto& b = m.boundary_edges();
    REQUIRE(b.size() == 8);
    CHECK(b[0] == EdgeKey{0, 0, 'h'}); // bottom, left to right
    CHECK(b[1] == EdgeKey{1, 0, 'h'});
    CHECK(b[2] == EdgeKey{2, 0, 'v'}); // right, bottom to top
    CHECK(b[4] == EdgeKey{1, 2, 'h'}); // top, right to left
    CHECK(b[6] == EdgeKey{0, 1, 'v'}); // left, top to bottom
}

TEST_CASE("coefficient fields") {
    SUBCASE("constant k is translation consistent") {
        CoefficientField f = CoefficientField::constant(3.0, 0.5);
        CHECK(f.k({0, 0}) == 3.0);
        CHECK(f.k({7, -2}) == 3.0);
        CHECK(f.eps({4, 4}) == 0.5);
        CHECK_THROWS(CoefficientField::constant(-1.0));
    }

    SUBCASE("layer profile endpoints and midpoint") {
        const double k = 2.0;
        // full depth: 2 k^2 / pi
        CHECK(layer_epsilon(k, 1.0, 1.0) == doctest::Approx(2.0 * k * k / M_PI));
        // outside the layer
        CHECK(layer_epsilon(k, 0.0, 1.0) == 0.0);
        CHECK(layer_epsilon(k, -0.3, 1.0) == 0.0);
        // half depth: sin^2(pi/4) = 1/2 -> k^2/pi
        CHECK(layer_epsilon(k, 0.5, 1.0) == doctest::Approx(k * k / M_PI));
    }

    SUBCASE("absorbing layer on a mesh") {
        StructuredMesh m = StructuredMesh::unit_square(8, ElementKind::Square);
        const double k = 5.0;
        CoefficientField f = absorbing_layer(m, k, {Side::Left}, 0.25); // 2 cells
        // outside the layer
        CHECK(f.eps({4, 3}) == 0.0);
        // boundary cell midpoint: depth 0.25 - 0.0625
        CHECK(f.eps({0, 5}) == doctest::Approx(layer_epsilon(k, 0.25 - 0.0625, 0.25)));
        CHECK(f.eps({1, 5}) == doctest::Approx(layer_epsilon(k, 0.25 - 3 * 0.0625, 0.25)));
        // layer wider than the domain rejected
        CHECK_THROWS(absorbing_layer(m, k, {Side::Left}, 2.0));
        // non-integer cell widths rejected
        CHECK_THROWS(absorbing_layer(m, k, {Side::Left}, 0.3));
    }

    SUBCASE("subdivided field inherits parent-cell values") {
        StructuredMesh m = StructuredMesh::unit_square(4, ElementKind::Square);
        CoefficientField f = absorbing_layer(m, 1.0, {Side::Bottom}, 0.5);
        CoefficientField f2 = f.subdivided(3);
        for (int x = 0; x < 12; ++x)
            for (int y = 0; y < 12; ++y)
                CHECK(f2.eps({x, y}) == f.eps({x / 3, y / 3}));
    }
}

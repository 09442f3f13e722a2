#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helmtg/fespace.hpp"

using namespace helmtg;

namespace {

DenseComplexMatrix dense(const SparseComplexMatrix& A) { return DenseComplexMatrix(A); }

// 3x3 vertex stencil of an interior vertex from an assembled p=1 matrix
Eigen::Matrix3d vertex_stencil(const SparseComplexMatrix& A, const FeSpace& s, int cx, int cy,
                               bool imag = false) {
    Eigen::Matrix3d st;
    const int row = s.vertex_dof(cx, cy);
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const Complex v = A.coeff(row, s.vertex_dof(cx + dx, cy + dy));
            st(1 + dy, 1 + dx) = imag ? v.imag() : v.real();
        }
    return st;
}

} // namespace

TEST_CASE("dof counts") {
    // 1x1 square mesh, p=2: 4 vertex + 4 edge + 1 interior = 9
    StructuredMesh m1 = StructuredMesh::unit_square(1, ElementKind::Square);
    CHECK(FeSpace::build(m1, 2).ndof() == 9);

    // 2x2 mesh, p=4: (2*4+1)^2 = 81 (tensor-product count (np+1)^2)
    StructuredMesh m2 = StructuredMesh::unit_square(2, ElementKind::Square);
    CHECK(FeSpace::build(m2, 4).ndof() == 81);
    for (int n : {1, 3}) {
        for (int p : {2, 4, 6, 8}) {
            StructuredMesh m = StructuredMesh::unit_square(n, ElementKind::Square);
            CHECK(FeSpace::build(m, p).ndof() == (n * p + 1) * (n * p + 1));
        }
    }

    // 1x1 triangle mesh, p=2: 4 vertices + 5 edges - no interior = 9
    StructuredMesh t1 = StructuredMesh::unit_square(1, ElementKind::Triangle);
    CHECK(FeSpace::build(t1, 2).ndof() == 9);

    // odd p rejected by the public builder
    CHECK_THROWS(FeSpace::build(m1, 3));
    CHECK_THROWS(FeSpace::build(m1, 10));
    CHECK(FeSpace::build_any(m1, 1).ndof() == 4);
    CHECK(FeSpace::build_any(m1, 3).ndof() == 16);
}

TEST_CASE("unit-cell dof count is p^2 for both element kinds") {
    for (ElementKind kind : {ElementKind::Square, ElementKind::Triangle}) {
        StructuredMesh m = StructuredMesh::unit_square(4, kind);
        for (int p : {2, 4, 6}) {
            FeSpace s = FeSpace::build(m, p);
            CHECK(s.unit_cell_dofs({1, 1}).size() == static_cast<std::size_t>(p * p));
        }
    }
}

TEST_CASE("p=1 reference stencils match the bilinear element matrices") {
    StructuredMesh m = StructuredMesh::unit_square(4, ElementKind::Square);
    FeSpace s = FeSpace::build_any(m, 1);
    BoundaryTags tags = tag_all(m, BoundaryTag::Neumann);
    const double h2 = m.spacing() * m.spacing();

    // stiffness: [[-1/3,-1/3,-1/3],[-1/3,8/3,-1/3],[-1/3,-1/3,-1/3]]
    CoefficientField zero_k = CoefficientField::constant(1e-30); // k^2 ~ 0
    SparseComplexMatrix K = assemble_helmholtz(s, zero_k, tags, 0.0);
    Eigen::Matrix3d Ks = vertex_stencil(K, s, 2, 2);
    Eigen::Matrix3d Kexact;
    Kexact << -1.0 / 3, -1.0 / 3, -1.0 / 3, -1.0 / 3, 8.0 / 3, -1.0 / 3, -1.0 / 3, -1.0 / 3,
        -1.0 / 3;
    CHECK((Ks - Kexact).cwiseAbs().maxCoeff() < 1e-14);

    // mass: h^2 [[1/36,1/9,1/36],[1/9,4/9,1/9],[1/36,1/9,1/36]]
    SparseComplexMatrix M = assemble_mass_weighted(s, [](CellIndex) { return Complex(1, 0); });
    Eigen::Matrix3d Ms = vertex_stencil(M, s, 2, 2);
    Eigen::Matrix3d Mexact;
    Mexact << 1.0 / 36, 1.0 / 9, 1.0 / 36, 1.0 / 9, 4.0 / 9, 1.0 / 9, 1.0 / 36, 1.0 / 9, 1.0 / 36;
    CHECK((Ms - h2 * Mexact).cwiseAbs().maxCoeff() < 1e-14 * h2);
}

TEST_CASE("patch test: pure stiffness annihilates constants") {
    for (ElementKind kind : {ElementKind::Square, ElementKind::Triangle}) {
        for (int p : {2, 4, 6, 8}) {
            StructuredMesh m = StructuredMesh::unit_square(3, kind);
            FeSpace s = FeSpace::build(m, p);
            BoundaryTags tags = tag_all(m, BoundaryTag::Neumann);
            CoefficientField cf = CoefficientField::constant(1e-30);
            SparseComplexMatrix A = assemble_helmholtz(s, cf, tags, 0.0);
            // constant function: vertex dofs 1, hierarchical dofs 0
            ComplexVector ones = interpolate(s, [](double, double) { return Complex(1, 0); });
            CHECK((A * ones).norm() < 1e-12 * A.norm());
            // real symmetric positive semidefinite
            DenseComplexMatrix Ad = dense(A);
            CHECK(Ad.imag().cwiseAbs().maxCoeff() < 1e-14);
            CHECK((Ad - Ad.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad.real());
            CHECK(es.eigenvalues().minCoeff() > -1e-10);
        }
    }
}

TEST_CASE("assembled operator structure") {
    StructuredMesh m = StructuredMesh::unit_square(2, ElementKind::Square);
    FeSpace s = FeSpace::build(m, 4);
    CoefficientField cf = CoefficientField::constant(3.0, 0.7);

    SUBCASE("complex symmetric without absorbing boundary, real when eps=0") {
        BoundaryTags tags = tag_all(m, BoundaryTag::Neumann);
        SparseComplexMatrix A = assemble_helmholtz(s, cf, tags, 0.0);
        DenseComplexMatrix Ad = dense(A);
        CHECK((Ad - Ad.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CoefficientField cf0 = CoefficientField::constant(3.0, 0.0);
        DenseComplexMatrix A0 = dense(assemble_helmholtz(s, cf0, tags, 0.0));
        CHECK(A0.imag().cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("shift enters as -i alpha k^2 mass") {
        BoundaryTags tags = tag_all(m, BoundaryTag::Neumann);
        const double alpha = 0.25;
        DenseComplexMatrix A0 = dense(assemble_helmholtz(s, cf, tags, 0.0));
        DenseComplexMatrix As = dense(assemble_helmholtz(s, cf, tags, alpha));
        DenseComplexMatrix M = dense(assemble_mass_weighted(
            s, [&](CellIndex c) { return Complex(cf.k(c) * cf.k(c), 0); }));
        CHECK((As - (A0 - Complex(0, alpha) * M)).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("Dirichlet rows and columns are identity") {
        BoundaryTags tags = tag_boundary(m, {{Side::Left, BoundaryTag::Dirichlet},
                                             {Side::Right, BoundaryTag::Absorbing},
                                             {Side::Bottom, BoundaryTag::Absorbing},
                                             {Side::Top, BoundaryTag::Absorbing}});
        SparseComplexMatrix A = assemble_helmholtz(s, cf, tags, 0.0);
        const auto dir = s.dirichlet_dofs(tags);
        // p=4, 2 cells: left side has 2 edges: 3 vertices + 2*3 edge dofs = 9
        CHECK(dir.size() == 9);
        DenseComplexMatrix Ad = dense(A);
        for (int d : dir) {
            CHECK(Ad.row(d).cwiseAbs().sum() == doctest::Approx(1.0));
            CHECK(Ad.col(d).cwiseAbs().sum() == doctest::Approx(1.0));
            CHECK(Ad(d, d) == Complex(1, 0));
        }
    }
}

TEST_CASE("weighted mass matrix") {
    StructuredMesh m = StructuredMesh::unit_square(2, ElementKind::Square);
    FeSpace s = FeSpace::build(m, 2);
    // zero weight -> zero matrix
    SparseComplexMatrix Z = assemble_mass_weighted(s, [](CellIndex) { return Complex(0, 0); });
    CHECK(Z.nonZeros() == 0);
    // linearity: weight i*eps = i*eps * (weight 1)
    const Complex w(0, 0.37);
    DenseComplexMatrix Mw = dense(assemble_mass_weighted(s, [&](CellIndex) { return w; }));
    DenseComplexMatrix M1 = dense(assemble_mass_weighted(s, [](CellIndex) { return Complex(1, 0); }));
    CHECK((Mw - w * M1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("boundary mass") {
    StructuredMesh m = StructuredMesh::unit_square(2, ElementKind::Square);
    FeSpace p1 = FeSpace::build_any(m, 1);
    CoefficientField cf = CoefficientField::constant(2.5);

    SUBCASE("empty absorbing set gives the zero matrix") {
        BoundaryTags tags = tag_all(m, BoundaryTag::Neumann);
        CHECK(boundary_mass(p1, cf, tags).nonZeros() == 0);
    }

    SUBCASE("single absorbing edge carries ik h [[1/3,1/6],[1/6,1/3]]") {
        BoundaryTags tags;
        for (EdgeKey e : m.boundary_edges())
            tags.set(e, e == EdgeKey{0, 0, 'h'} ? BoundaryTag::Absorbing : BoundaryTag::Neumann);
        SparseComplexMatrix B = boundary_mass(p1, cf, tags);
        const double kh = 2.5 * m.spacing();
        const int v0 = p1.vertex_dof(0, 0), v1 = p1.vertex_dof(1, 0);
        CHECK(std::abs(B.coeff(v0, v0) - Complex(0, kh / 3.0)) < 1e-14);
        CHECK(std::abs(B.coeff(v0, v1) - Complex(0, kh / 6.0)) < 1e-14);
        CHECK(std::abs(B.coeff(v1, v1) - Complex(0, kh / 3.0)) < 1e-14);
    }

    SUBCASE("adjacent absorbing edges sum at the shared vertex") {
        BoundaryTags tags;
        for (EdgeKey e : m.boundary_edges())
            tags.set(e, (e == EdgeKey{0, 0, 'h'} || e == EdgeKey{1, 0, 'h'})
                            ? BoundaryTag::Absorbing
                            : BoundaryTag::Neumann);
        SparseComplexMatrix B = boundary_mass(p1, cf, tags);
        const double kh = 2.5 * m.spacing();
        CHECK(std::abs(B.coeff(p1.vertex_dof(1, 0), p1.vertex_dof(1, 0)) -
                       Complex(0, 2.0 * kh / 3.0)) < 1e-14);
    }
}

TEST_CASE("interpolation exactness and Dirichlet energy") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (ElementKind kind : {ElementKind::Square, ElementKind::Triangle}) {
        for (int p : {2, 4, 6}) {
            StructuredMesh m = StructuredMesh::unit_square(2, kind);
            FeSpace s = FeSpace::build(m, p);
            // random polynomial of total degree <= p
            std::vector<std::array<double, 3>> terms; // (coef, i, j)
            for (int i = 0; i <= p; ++i)
                for (int j = 0; i + j <= p; ++j)
                    terms.push_back({uni(rng), static_cast<double>(i), static_cast<double>(j)});
            auto f = [&](double x, double y) {
                double v = 0;
                for (const auto& t : terms) v += t[0] * std::pow(x, t[1]) * std::pow(y, t[2]);
                return Complex(v, 0);
            };
            ComplexVector u = interpolate(s, f);
            // pointwise reproduction at off-node points
            for (auto [x, y] : {std::pair{0.37, 0.81}, {0.03, 0.44}, {0.99, 0.52}}) {
                CHECK(std::abs(evaluate(s, u, x, y) - f(x, y)) <
                      1e-10 * (1.0 + std::abs(f(x, y))));
            }
            // Dirichlet energy u^T K u equals the exact integral of |grad f|^2,
            // computed here with an independent high-order quadrature
            BoundaryTags tags = tag_all(m, BoundaryTag::Neumann);
            CoefficientField cf = CoefficientField::constant(1e-30);
            SparseComplexMatrix K = assemble_helmholtz(s, cf, tags, 0.0);
            const Complex energy = u.dot(K * u); // u real
            std::vector<double> gx, gw;
            gauss_legendre_01(p + 2, gx, gw);
            double exact = 0.0;
            auto dfx = [&](double x, double y) {
                double v = 0;
                for (const auto& t : terms)
                    if (t[1] > 0) v += t[0] * t[1] * std::pow(x, t[1] - 1) * std::pow(y, t[2]);
                return v;
            };
            auto dfy = [&](double x, double y) {
                double v = 0;
                for (const auto& t : terms)
                    if (t[2] > 0) v += t[0] * t[2] * std::pow(x, t[1]) * std::pow(y, t[2] - 1);
                return v;
            };
            for (std::size_t a = 0; a < gx.size(); ++a)
                for (std::size_t b = 0; b < gx.size(); ++b) {
                    const double x = gx[a], y = gx[b];
                    exact += gw[a] * gw[b] *
                             (dfx(x, y) * dfx(x, y) + dfy(x, y) * dfy(x, y));
                }
            CHECK(std::abs(energy.real() - exact) < 1e-10 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("translation invariance of interior blocks") {
    for (ElementKind kind : {ElementKind::Square, ElementKind::Triangle}) {
        StructuredMesh m = StructuredMesh::unit_square(6, kind);
        FeSpace s = FeSpace::build(m, 4);
        BoundaryTags tags = tag_all(m, BoundaryTag::Neumann);
        CoefficientField cf = CoefficientField::constant(7.0, 0.3);
        SparseComplexMatrix A = assemble_helmholtz(s, cf, tags, 0.1);
        const auto c1 = s.unit_cell_dofs({2, 2});
        const auto c2 = s.unit_cell_dofs({3, 3});
        for (int bx = -1; bx <= 1; ++bx) {
            for (int by = -1; by <= 1; ++by) {
                const auto d1 = s.unit_cell_dofs({2 + bx, 2 + by});
                const auto d2 = s.unit_cell_dofs({3 + bx, 3 + by});
                double diff = 0.0;
                for (std::size_t i = 0; i < c1.size(); ++i)
                    for (std::size_t j = 0; j < d1.size(); ++j)
                        diff = std::max(diff, std::abs(A.coeff(c1[i], d1[j]) - A.coeff(c2[i], d2[j])));
                CHECK(diff < 1e-12);
            }
        }
    }
}

TEST_CASE("deterministic dof numbering") {
    StructuredMesh m = StructuredMesh::unit_square(3, ElementKind::Square);
    FeSpace a = FeSpace::build(m, 4), b = FeSpace::build(m, 4);
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 3; ++j) CHECK(a.vertex_dof(i, j) == b.vertex_dof(i, j));
    // lexicographic by (y, x): vertex (0,0) first
    CHECK(a.vertex_dof(0, 0) == 0);
    CHECK(a.vertex_dof(1, 0) > a.vertex_dof(0, 0));
    CHECK(a.vertex_dof(0, 1) > a.vertex_dof(3, 0));
}

TEST_CASE("triplet export") {
    StructuredMesh m = StructuredMesh::unit_square(1, ElementKind::Square);
    FeSpace s = FeSpace::build_any(m, 1);
    CoefficientField cf = CoefficientField::constant(1.0);
    SparseComplexMatrix A = assemble_helmholtz(s, cf, tag_all(m, BoundaryTag::Neumann), 0.0);
    std::ostringstream os;
    write_triplets(os, A);
    // one "row col re im" line per stored entry
    std::istringstream is(os.str());
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == A.nonZeros());
}

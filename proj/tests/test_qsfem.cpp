#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helmtg/qsfem.hpp"

using namespace helmtg;
using qsfem::QsfemStencil;

TEST_CASE("stencil coefficients") {
    SUBCASE("P0 = 4 for any eta") {
        for (double eta : {0.3, 0.9, 1.7, 2.6}) CHECK(qsfem::stencil_coefficients(eta).P0 == 4.0);
    }

    SUBCASE("eta outside (0, pi) rejected") {
        CHECK_THROWS(qsfem::stencil_coefficients(0.0));
        CHECK_THROWS(qsfem::stencil_coefficients(-0.5));
        CHECK_THROWS(qsfem::stencil_coefficients(M_PI));
        CHECK_THROWS(qsfem::stencil_coefficients(3.5));
    }

    SUBCASE("scaled symbol at xi = 0 is exactly -k^2") {
        for (double eta : {0.3, 0.7854, 1.2566, 2.0, 2.9}) {
            const double k = 5.0, hc = eta / k;
            CHECK(std::abs(qsfem::scaled_symbol(0.0, 0.0, k, hc) + k * k) <= 1e-12 * k * k);
        }
    }

    SUBCASE("symbol vanishes on the circle in the construction directions") {
        // the coefficients are built by interpolating the zero set at t = pi/16
        // and 3 pi/16, so the symbol is zero there up to roundoff
        for (double ppw : {4.0, 6.0, 8.0}) {
            const double eta = 2.0 * M_PI / ppw;
            const QsfemStencil s = qsfem::stencil_coefficients(eta);
            for (double t : {M_PI / 16.0, 3.0 * M_PI / 16.0}) {
                const double v = qsfem::stencil_symbol(s, eta * std::cos(t), eta * std::sin(t));
                CHECK(std::abs(v) < 1e-3 * eta); // far tighter in practice
                CHECK(std::abs(v) < 1e-10);
            }
        }
    }

    SUBCASE("cosine symmetries of the symbol") {
        const QsfemStencil s = qsfem::stencil_coefficients(1.3);
        const double a = 0.4, b = 0.9;
        CHECK(qsfem::stencil_symbol(s, a, b) == doctest::Approx(qsfem::stencil_symbol(s, b, a)));
        CHECK(qsfem::stencil_symbol(s, a, b) == doctest::Approx(qsfem::stencil_symbol(s, -a, b)));
    }
}

TEST_CASE("zero-set distance") {
    const double k = 2.0 * M_PI; // one wavelength per unit

    SUBCASE("8 coarse points per wavelength: D_P/k below 1e-3") {
        const double hc = 1.0 / 8.0;
        CHECK(qsfem::zero_set_distance(k, hc) / k < 1e-3);
    }

    SUBCASE("monotone decrease over points-per-wavelength") {
        double prev = 1e9;
        for (double ppw : {4.0, 6.0, 8.0, 12.0}) {
            const double d = qsfem::zero_set_distance(k, 1.0 / ppw) / k;
            CHECK(d < prev);
            prev = d;
        }
    }

    SUBCASE("radial zero in direction pi/16 equals k") {
        // construction's interpolation direction: scaled_symbol vanishes at
        // radius k, so a bisection of the radial function brackets k itself
        for (double ppw : {4.0, 6.0, 10.0}) {
            const double hc = 1.0 / ppw;
            const double ct = std::cos(M_PI / 16.0), st = std::sin(M_PI / 16.0);
            double lo = 0.5 * k, hi = std::min(1.5 * k, M_PI / hc * 0.999);
            auto f = [&](double r) { return qsfem::scaled_symbol(r * ct, r * st, k, hc); };
            REQUIRE(f(lo) * f(hi) < 0);
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (f(lo) * f(mid) <= 0)
                    hi = mid;
                else
                    lo = mid;
            }
            CHECK(std::abs(0.5 * (lo + hi) - k) <= 1e-6 * k);
        }
    }
}

TEST_CASE("element weights reconstruct the stencil") {
    const QsfemStencil s = qsfem::stencil_coefficients(1.1);
    // 4 cells share the center, 2 cells an edge neighbor, 1 cell a diagonal
    CHECK(4.0 * s.q_weight(0, 0) == doctest::Approx(s.N * s.P0));
    CHECK(2.0 * s.q_weight(1, 0) == doctest::Approx(s.N * s.P1));
    CHECK(2.0 * s.q_weight(0, -1) == doctest::Approx(s.N * s.P1));
    CHECK(1.0 * s.q_weight(1, 1) == doctest::Approx(s.N * s.P2));
    CHECK(1.0 * s.q_weight(-1, 1) == doctest::Approx(s.N * s.P2));
}

TEST_CASE("quasi-FE assembly") {
    const double k = 2.0 * M_PI;
    const int n = 8;
    StructuredMesh mesh = StructuredMesh::unit_square(n, ElementKind::Square);
    FeSpace p1 = FeSpace::build_any(mesh, 1);
    const double hc = mesh.spacing();
    const QsfemStencil s = qsfem::stencil_coefficients(k * hc);

    SUBCASE("interior row equals the scaled stencil") {
        CoefficientField cf = CoefficientField::constant(k);
        BoundaryTags tags = tag_all(mesh, BoundaryTag::Neumann);
        SparseComplexMatrix A = qsfem::assemble(p1, cf, tags);
        const int row = p1.vertex_dof(4, 4);
        CHECK(A.coeff(row, row) == Complex(s.N * s.P0, 0));
        CHECK(A.coeff(row, p1.vertex_dof(5, 4)) == Complex(s.N * s.P1, 0));
        CHECK(A.coeff(row, p1.vertex_dof(4, 3)) == Complex(s.N * s.P1, 0));
        CHECK(A.coeff(row, p1.vertex_dof(3, 3)) == Complex(s.N * s.P2, 0));
        CHECK(A.coeff(row, p1.vertex_dof(5, 5)) == Complex(s.N * s.P2, 0));
        // complex symmetric
        DenseComplexMatrix Ad(A);
        CHECK((Ad - Ad.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("all-Neumann corner vertex sees one cell: diagonal N P0 / 4") {
        CoefficientField cf = CoefficientField::constant(k);
        BoundaryTags tags = tag_all(mesh, BoundaryTag::Neumann);
        SparseComplexMatrix A = qsfem::assemble(p1, cf, tags);
        const int corner = p1.vertex_dof(0, 0);
        CHECK(A.coeff(corner, corner) == Complex(s.N * s.P0 / 4.0, 0));
    }

    SUBCASE("eps in one cell shifts the matrix by -i eps times that cell's mass") {
        BoundaryTags tags = tag_all(mesh, BoundaryTag::Neumann);
        CoefficientField cf0 = CoefficientField::constant(k);
        CoefficientField cf1 = CoefficientField::constant(k);
        const double eps = 0.8;
        cf1.set_eps({3, 5}, eps);
        DenseComplexMatrix A0(qsfem::assemble(p1, cf0, tags));
        DenseComplexMatrix A1(qsfem::assemble(p1, cf1, tags));
        CoefficientField mask = CoefficientField::constant(k);
        DenseComplexMatrix M(assemble_mass_weighted(p1, [&](CellIndex c) {
            return c == CellIndex{3, 5} ? Complex(0, eps) : Complex(0, 0);
        }));
        CHECK((A1 - (A0 - M)).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("absorbing boundary subtracts the p=1 boundary mass") {
        CoefficientField cf = CoefficientField::constant(k);
        BoundaryTags neu = tag_all(mesh, BoundaryTag::Neumann);
        BoundaryTags abs = tag_all(mesh, BoundaryTag::Absorbing);
        DenseComplexMatrix An(qsfem::assemble(p1, cf, neu));
        DenseComplexMatrix Aa(qsfem::assemble(p1, cf, abs));
        DenseComplexMatrix B(boundary_mass(p1, cf, abs));
        CHECK((Aa - (An - B)).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("Dirichlet rows eliminated") {
        CoefficientField cf = CoefficientField::constant(k);
        BoundaryTags tags = tag_boundary(mesh, {{Side::Left, BoundaryTag::Dirichlet},
                                                {Side::Right, BoundaryTag::Absorbing},
                                                {Side::Bottom, BoundaryTag::Absorbing},
                                                {Side::Top, BoundaryTag::Absorbing}});
        SparseComplexMatrix A = qsfem::assemble(p1, cf, tags);
        const int d = p1.vertex_dof(0, 4);
        DenseComplexMatrix Ad(A);
        CHECK(Ad.row(d).cwiseAbs().sum() == doctest::Approx(1.0));
        CHECK(Ad(d, d) == Complex(1, 0));
    }
}

#include "helmtg/qsfem.hpp"

#include <cmath>

namespace helmtg {
namespace qsfem {

QsfemStencil stencil_coefficients(double eta) {
    if (!(eta > 0.0) || !(eta < M_PI))
        throw std::invalid_argument("qsfem: eta = k*h_c must lie in (0, pi) "
                                    "(at least two coarse points per wavelength)");
    const double c1 = std::cos(eta * std::cos(M_PI / 16.0));
    const double s1 = std::cos(eta * std::sin(M_PI / 16.0));
    const double c2 = std::cos(eta * std::cos(3.0 * M_PI / 16.0));
    const double s2 = std::cos(eta * std::sin(3.0 * M_PI / 16.0));
    const double den = c2 * s2 * (c1 + s1) - c1 * s1 * (c2 + s2);
    if (std::abs(den) < 1e-14) throw std::runtime_error("qsfem: degenerate stencil (denominator ~ 0)");
    QsfemStencil s;
    s.eta = eta;
    s.P0 = 4.0;
    s.P1 = 2.0 * (c1 * s1 - c2 * s2) / den;
    s.P2 = (c2 + s2 - c1 - s1) / den;
    const double sig0 = stencil_symbol(s, 0.0, 0.0);
    if (sig0 == 0.0) throw std::runtime_error("qsfem: sigma_P(0) = 0, scaling undefined");
    s.N = -eta * eta / sig0;
    return s;
}

double stencil_symbol(const QsfemStencil& s, double t1, double t2) {
    return s.P0 + 2.0 * s.P1 * (std::cos(t1) + std::cos(t2)) +
           4.0 * s.P2 * std::cos(t1) * std::cos(t2);
}

double QsfemStencil::q_weight(int gx, int gy) const {
    const int m = std::abs(gx) + std::abs(gy);
    if (m == 0) return N * P0 / 4.0;
    if (m == 1) return N * P1 / 2.0;
    return N * P2;
}

double scaled_symbol(double xi1, double xi2, double k, double hc) {
    const QsfemStencil s = stencil_coefficients(k * hc);
    return s.N / (hc * hc) * stencil_symbol(s, hc * xi1, hc * xi2);
}

namespace {

// radial zero of sigma_P along direction t, nearest to eta (normalized units)
double radial_zero(const QsfemStencil& s, double t) {
    const double ct = std::cos(t), st = std::sin(t);
    auto f = [&](double r) { return stencil_symbol(s, r * ct, r * st); };
    const int nscan = 512;
    const double rmax = M_PI - 1e-12;
    double best = -1.0, prev_r = 1e-9, prev_v = f(prev_r);
    for (int i = 1; i <= nscan; ++i) {
        const double r = 1e-9 + (rmax - 1e-9) * i / nscan;
        const double v = f(r);
        if (prev_v == 0.0) best = prev_r;
        if (prev_v * v < 0.0) {
            double lo = prev_r, hi = r, flo = prev_v;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi), fm = f(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            const double z = 0.5 * (lo + hi);
            if (best < 0.0 || std::abs(z - s.eta) < std::abs(best - s.eta)) best = z;
        }
        prev_r = r;
        prev_v = v;
    }
    if (best < 0.0) throw std::runtime_error("qsfem: no radial zero found (non-propagating regime)");
    return best;
}

} // namespace

double zero_set_distance(double k, double hc, int n_directions) {
    const QsfemStencil s = stencil_coefficients(k * hc);
    auto dist = [&](double t) { return std::abs(radial_zero(s, t) - s.eta); };
    double best = -1.0, tbest = 0.0;
    for (int i = 0; i < n_directions; ++i) {
        const double t = -M_PI + 2.0 * M_PI * i / n_directions;
        const double d = dist(t);
        if (d > best) {
            best = d;
            tbest = t;
        }
    }
    // golden-section refinement around the grid maximizer
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = tbest - 2.0 * M_PI / n_directions, b = tbest + 2.0 * M_PI / n_directions;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = dist(x1), f2 = dist(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = dist(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = dist(x1);
        }
    }
    best = std::max(best, std::max(f1, f2));
    return best / hc; // physical units: |radial zero - k|
}

SparseComplexMatrix assemble(const FeSpace& p1_space, const CoefficientField& coeffs,
                             const BoundaryTags& tags) {
    if (p1_space.order() != 1)
        throw std::invalid_argument("qsfem::assemble expects the p=1 space on the coarse mesh");
    const StructuredMesh& mesh = p1_space.mesh();
    if (mesh.element_kind() != ElementKind::Square)
        throw std::invalid_argument("qsfem::assemble: coarse mesh must be a square mesh");
    if (!tags.complete(mesh)) throw std::invalid_argument("qsfem::assemble: untagged boundary edge");
    const double hc = mesh.spacing();

    std::vector<Eigen::Triplet<Complex>> trips;
    for (CellIndex c : mesh.cells()) {
        const QsfemStencil s = stencil_coefficients(hc * coeffs.k(c));
        const int vd[4] = {p1_space.vertex_dof(c.x, c.y), p1_space.vertex_dof(c.x + 1, c.y),
                           p1_space.vertex_dof(c.x, c.y + 1), p1_space.vertex_dof(c.x + 1, c.y + 1)};
        const int gx[4] = {0, 1, 0, 1}, gy[4] = {0, 0, 1, 1};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                trips.emplace_back(vd[a], vd[b], Complex(s.q_weight(gx[b] - gx[a], gy[b] - gy[a]), 0));
    }
    SparseComplexMatrix A(p1_space.ndof(), p1_space.ndof());
    A.setFromTriplets(trips.begin(), trips.end());

    // the remaining mass term i eps stays in finite-element form
    A -= assemble_mass_weighted(p1_space,
                                [&](CellIndex c) { return Complex(0.0, coeffs.eps(c)); });
    A -= boundary_mass(p1_space, coeffs, tags);
    eliminate_dirichlet(A, p1_space.dirichlet_dofs(tags));
    A.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex(0, 0); });
    A.makeCompressed();
    return A;
}

} // namespace qsfem
} // namespace helmtg

#ifndef HELMTG_QSFEM_HPP
#define HELMTG_QSFEM_HPP

#include "helmtg/fespace.hpp"
#include "helmtg/linalg.hpp"
#include "helmtg/mesh.hpp"

namespace helmtg {
namespace qsfem {

/// Dispersion-minimizing 9-point stencil at eta = k * h_c, with the scaling
/// N(eta) that makes the scaled symbol satisfy sigma(0) = -k^2.
struct QsfemStencil {
    double eta;
    double P0, P1, P2;
    double N;

    /// per-cell element weights: q0 = N P0 / 4, q1 = N P1 / 2, q2 = N P2
    double q_weight(int gx, int gy) const;
};

/// Closed-form stencil coefficients; valid for 0 < eta < pi away from the
/// denominator zero (checked).
QsfemStencil stencil_coefficients(double eta);

/// Unscaled stencil symbol P0 + 2 P1 (cos t1 + cos t2) + 4 P2 cos t1 cos t2
/// at normalized wave vector (t1, t2) = h_c * xi.
double stencil_symbol(const QsfemStencil& s, double t1, double t2);

/// h_c^{-2} N(eta) sigma_P at physical wave vector xi; equals -k^2 at xi = 0.
double scaled_symbol(double xi1, double xi2, double k, double hc);

/// Radial-distance surrogate of the zero-set distance D_P: max over directions
/// t of |radial zero of sigma_P - k|, zeros found by bisection and the
/// direction maximizer refined by golden section.
double zero_set_distance(double k, double hc, int n_directions = 720);

/// Quasi-finite-element QSFEM matrix on a coarse square mesh: stencil weights
/// summed per cell, minus the i eps p=1 mass term, minus the absorbing
/// boundary mass, with Dirichlet rows eliminated. Vertex dofs follow the p=1
/// FeSpace numbering of the given mesh.
SparseComplexMatrix assemble(const FeSpace& p1_space, const CoefficientField& coeffs,
                             const BoundaryTags& tags);

} // namespace qsfem
} // namespace helmtg

#endif

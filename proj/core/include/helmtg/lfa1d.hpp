#ifndef HELMTG_LFA1D_HPP
#define HELMTG_LFA1D_HPP

#include <vector>

#include "helmtg/linalg.hpp"

namespace helmtg {
namespace lfa1d {

/// 1-D finite-difference toy problem: central differences of width 2M+1 on a
/// grid of spacing h_f, coarse grid 2 h_f, linear-interpolation transfers,
/// exactly inverted complex-shifted smoother. Damping eps = k^2 D / pi.
struct ToyConfig {
    int M = 2;           // 1 = 2nd order, 2 = 4th order
    double h = 1.0;      // fine spacing
    double k = 1.0;      // wavenumber
    double D = 0.01;     // damping fraction per wavelength
    double alpha_s = 0.2;
    int nu1 = 1, nu2 = 1;

    double eps() const { return k * k * D / M_PI; }
    static ToyConfig from_ppw(int M, double ppw, double D = 0.01, double alpha_s = 0.2);
};

/// Symbol of the width-2M+1 central-difference Helmholtz operator at normalized
/// wavenumber theta: D_{2,M} - (k^2 + i eps).
Complex fd_symbol(double theta, int M, double h, double k, double eps);

/// Linear-interpolation / full-weighting transfer symbols.
struct TransferSymbols {
    Complex r0, r1; // I_R = [r0, r1];  I_P = I_R^T
};
TransferSymbols transfer_symbols(double theta);

/// M_hat(theta) = S^{nu2} K S^{nu1} with S = diag(1 - As^{-1} A) and
/// K = I - I_P Ac^{-1} I_R diag(A(theta), A(theta+pi)); the coarse symbol is
/// evaluated at the coarse-normalized wavenumber 2 theta with spacing 2h.
Eigen::Matrix2cd two_grid_symbol(double theta, const ToyConfig& cfg);

/// sup over a uniform theta grid on [-pi/2, pi/2) of the spectral radius of
/// M_hat, with golden-section refinement around the grid maximizer.
double asymptotic_rate(const ToyConfig& cfg, int n_theta = 1024);

/// Dispersion quantities at eps = 0: normalized propagating wavenumbers of the
/// fine and coarse operators, their mismatch delta = (zeta_c - zeta_f)/(k h),
/// and the predicted contraction R = 2 pi |delta| / D.
struct DispersionZeros {
    double zeta_f, zeta_c, delta, R;
};
DispersionZeros dispersion_zeros(const ToyConfig& cfg);

/// Closed-form maximum of |1 - c (t - zf - i e)/(t - zc - i e)| over real t,
/// sqrt((1-c)^2 + (cR/2)^2) + cR/2 with R = |zf - zc| / e.
double lemma_max(double c, double R);

struct SweepRow {
    double ppw, rho, R, zeta_f, zeta_c, delta;
};
std::vector<SweepRow> sweep(int M, const std::vector<double>& ppws, double D, double alpha_s,
                            int nu1 = 1, int nu2 = 1, int n_theta = 1024);

} // namespace lfa1d
} // namespace helmtg

#endif

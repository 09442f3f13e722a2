#include "helmtg/lfa1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace helmtg {
namespace lfa1d {

ToyConfig ToyConfig::from_ppw(int M, double ppw, double D, double alpha_s) {
    ToyConfig c;
    c.M = M;
    c.h = 1.0;
    c.k = 2.0 * M_PI / ppw; // points per wavelength on the fine grid
    c.D = D;
    c.alpha_s = alpha_s;
    return c;
}

Complex fd_symbol(double theta, int M, double h, double k, double eps) {
    double lap;
    if (M == 1) {
        lap = (2.0 - 2.0 * std::cos(theta)) / (h * h);
    } else if (M == 2) {
        // weights [-1/12, 4/3, -5/2, 4/3, -1/12]
        lap = (5.0 / 2.0 - 8.0 / 3.0 * std::cos(theta) + 1.0 / 6.0 * std::cos(2.0 * theta)) / (h * h);
    } else {
        throw std::invalid_argument("fd_symbol: M must be 1 or 2");
    }
    return Complex(lap - k * k, -eps);
}

TransferSymbols transfer_symbols(double theta) {
    return {Complex(0.5 + 0.5 * std::cos(theta), 0), Complex(0.5 - 0.5 * std::cos(theta), 0)};
}

Eigen::Matrix2cd two_grid_symbol(double theta, const ToyConfig& cfg) {
    const double eps = cfg.eps();
    const Complex shift = Complex(0, -cfg.alpha_s * cfg.k * cfg.k);
    const Complex A0 = fd_symbol(theta, cfg.M, cfg.h, cfg.k, eps);
    const Complex A1 = fd_symbol(theta + M_PI, cfg.M, cfg.h, cfg.k, eps);
    const Complex As0 = A0 + shift, As1 = A1 + shift;
    const Complex Ac = fd_symbol(2.0 * theta, cfg.M, 2.0 * cfg.h, cfg.k, eps);
    if (Ac == Complex(0, 0)) throw std::runtime_error("two_grid_symbol: coarse symbol zero");

    Eigen::Matrix2cd S = Eigen::Matrix2cd::Zero();
    S(0, 0) = 1.0 - A0 / As0;
    S(1, 1) = 1.0 - A1 / As1;

    const TransferSymbols t = transfer_symbols(theta);
    Eigen::Matrix2cd K;
    // K = I - I_P Ac^{-1} I_R diag(A0, A1)
    K(0, 0) = 1.0 - t.r0 * t.r0 / Ac * A0;
    K(0, 1) = -t.r0 * t.r1 / Ac * A1;
    K(1, 0) = -t.r1 * t.r0 / Ac * A0;
    K(1, 1) = 1.0 - t.r1 * t.r1 / Ac * A1;

    Eigen::Matrix2cd M = K;
    for (int i = 0; i < cfg.nu1; ++i) M = M * S;
    for (int i = 0; i < cfg.nu2; ++i) M = S * M;
    return M;
}

namespace {

double rho2x2(const Eigen::Matrix2cd& M) {
    const Complex tr = M(0, 0) + M(1, 1);
    const Complex det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

} // namespace

double asymptotic_rate(const ToyConfig& cfg, int n_theta) {
    if (n_theta < 64) throw std::invalid_argument("asymptotic_rate: n_theta must be >= 64");
    auto rho_at = [&](double th) { return rho2x2(two_grid_symbol(th, cfg)); };
    std::vector<double> vals(n_theta);
    for (int i = 0; i < n_theta; ++i) vals[i] = rho_at(-M_PI / 2.0 + M_PI * i / n_theta);
    double best = *std::max_element(vals.begin(), vals.end());

    // golden-section refinement around every grid-local maximizer; the sup can
    // sit in a resonance needle much narrower than the grid spacing
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < n_theta; ++i) {
        const double vm = vals[(i + n_theta - 1) % n_theta], vp = vals[(i + 1) % n_theta];
        if (vals[i] < vm || vals[i] < vp) continue;
        const double tc = -M_PI / 2.0 + M_PI * i / n_theta;
        double a = tc - M_PI / n_theta, b = tc + M_PI / n_theta;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = rho_at(x1), f2 = rho_at(x2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = rho_at(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = rho_at(x1);
            }
        }
        best = std::max(best, std::max(f1, f2));
    }
    return best;
}

namespace {

// bisection zero of the real eps=0 symbol in (0, pi); monotone for M = 1, 2
double symbol_zero(int M, double h, double k) {
    auto f = [&](double z) { return fd_symbol(z, M, h, k, 0.0).real(); };
    double lo = 1e-12, hi = M_PI - 1e-12;
    if (f(lo) * f(hi) > 0.0) throw std::runtime_error("dispersion_zeros: no zero in (0, pi)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

DispersionZeros dispersion_zeros(const ToyConfig& cfg) {
    DispersionZeros out;
    out.zeta_f = symbol_zero(cfg.M, cfg.h, cfg.k);
    // coarse zero found on the coarse-normalized scale, reported on the fine one
    out.zeta_c = symbol_zero(cfg.M, 2.0 * cfg.h, cfg.k) / 2.0;
    out.delta = (out.zeta_c - out.zeta_f) / (cfg.k * cfg.h);
    out.R = 2.0 * M_PI * std::abs(out.delta) / cfg.D;
    return out;
}

double lemma_max(double c, double R) {
    if (c < 0.0 || c > 1.0) throw std::invalid_argument("lemma_max: c must be in [0, 1]");
    if (R < 0.0) throw std::invalid_argument("lemma_max: R must be >= 0");
    const double cr2 = c * R / 2.0;
    return std::sqrt((1.0 - c) * (1.0 - c) + cr2 * cr2) + cr2;
}

std::vector<SweepRow> sweep(int M, const std::vector<double>& ppws, double D, double alpha_s,
                            int nu1, int nu2, int n_theta) {
    std::vector<SweepRow> rows;
    for (double ppw : ppws) {
        ToyConfig cfg = ToyConfig::from_ppw(M, ppw, D, alpha_s);
        cfg.nu1 = nu1;
        cfg.nu2 = nu2;
        const DispersionZeros dz = dispersion_zeros(cfg);
        rows.push_back({ppw, asymptotic_rate(cfg, n_theta), dz.R, dz.zeta_f, dz.zeta_c, dz.delta});
    }
    return rows;
}

} // namespace lfa1d
} // namespace helmtg

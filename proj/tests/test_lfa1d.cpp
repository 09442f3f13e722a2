#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helmtg/lfa1d.hpp"

using namespace helmtg;
using namespace helmtg::lfa1d;

TEST_CASE("fd symbols") {
    const double h = 0.7, k = 2.2, eps = 0.31;

    SUBCASE("theta = 0 leaves only the zeroth-order term") {
        for (int M : {1, 2}) {
            CHECK(std::abs(fd_symbol(0.0, M, h, k, eps) - Complex(-k * k, -eps)) < 1e-14);
        }
    }

    SUBCASE("M=1 at theta = pi: 4/h^2 - (k^2 + i eps)") {
        CHECK(std::abs(fd_symbol(M_PI, 1, h, k, eps) - Complex(4.0 / (h * h) - k * k, -eps)) <
              1e-14);
    }

    SUBCASE("M=2 Taylor: symbol + (k^2 + i eps) = theta^2/h^2 + O(theta^6)") {
        // fourth order: no theta^4 term; ratio of the residual to theta^6/h^2
        // approaches the known 1/90 coefficient
        for (double th : {0.1, 0.05, 0.025}) {
            const Complex resid =
                fd_symbol(th, 2, h, k, eps) + Complex(k * k, eps) - Complex(th * th / (h * h), 0);
            CHECK(std::abs(resid.imag()) == 0.0);
            CHECK(resid.real() == doctest::Approx(-std::pow(th, 6) / (90.0 * h * h)).epsilon(0.01));
        }
    }

    CHECK_THROWS(fd_symbol(0.1, 3, h, k, eps));
}

TEST_CASE("transfer symbols") {
    const TransferSymbols t0 = transfer_symbols(0.0);
    CHECK(t0.r0 == Complex(1, 0));
    CHECK(t0.r1 == Complex(0, 0));
    const TransferSymbols t1 = transfer_symbols(M_PI / 2);
    CHECK(std::abs(t1.r0 - Complex(0.5, 0)) < 1e-15);
    CHECK(std::abs(t1.r1 - Complex(0.5, 0)) < 1e-15);
}

TEST_CASE("two-grid symbol structure") {
    ToyConfig cfg = ToyConfig::from_ppw(2, 10.0);

    SUBCASE("huge shift freezes the smoother: M approaches K") {
        ToyConfig frozen = cfg;
        frozen.alpha_s = 1e9; // S -> I
        ToyConfig nosmooth = cfg;
        nosmooth.nu1 = nosmooth.nu2 = 0;
        const double th = 0.37;
        const Eigen::Matrix2cd M1 = two_grid_symbol(th, frozen);
        const Eigen::Matrix2cd K = two_grid_symbol(th, nosmooth);
        CHECK((M1 - K).cwiseAbs().maxCoeff() < 1e-6);
    }

    SUBCASE("rho is finite and positive at standard parameters") {
        for (int M : {1, 2}) {
            ToyConfig c = ToyConfig::from_ppw(M, 10.0);
            const double rho = asymptotic_rate(c, 256);
            CHECK(rho > 0.0);
            CHECK(std::isfinite(rho));
            // the paper's relation rho ~ R anchors the magnitude
            const double R = dispersion_zeros(c).R;
            CHECK(rho / R > 0.4);
            CHECK(rho / R < 2.5);
        }
    }

    SUBCASE("theta-grid refinement is converged") {
        ToyConfig c = ToyConfig::from_ppw(2, 12.0);
        const double r256 = asymptotic_rate(c, 256);
        const double r1024 = asymptotic_rate(c, 1024);
        CHECK(std::abs(r256 - r1024) < 1e-3 * std::max(1.0, r1024));
    }

    SUBCASE("heavy damping kills the rate") {
        ToyConfig c = ToyConfig::from_ppw(2, 10.0, /*D=*/1.0);
        CHECK(asymptotic_rate(c, 256) < 0.3);
    }
}

TEST_CASE("coarse grid beyond its propagation limit is an error") {
    // M=1 at 6 points per wavelength: kh > 1, the coarse symbol has no real zero
    ToyConfig c = ToyConfig::from_ppw(1, 6.0);
    CHECK_THROWS_AS(dispersion_zeros(c), std::runtime_error);
}

TEST_CASE("dispersion zeros") {
    SUBCASE("M=1 closed form: zeta_f = 2 asin(kh/2)") {
        // the coarse 2nd-order grid propagates only for kh < 1, i.e. ppw > 2 pi
        for (double ppw : {8.0, 10.0, 16.0}) {
            ToyConfig c = ToyConfig::from_ppw(1, ppw);
            const DispersionZeros dz = dispersion_zeros(c);
            const double kh = c.k * c.h;
            CHECK(dz.zeta_f == doctest::Approx(2.0 * std::asin(kh / 2.0)).epsilon(1e-12));
            // coarse zero on the fine scale: asin(kh)
            CHECK(dz.zeta_c == doctest::Approx(std::asin(kh)).epsilon(1e-12));
            // numerical waves too short: zeta_f > kh since asin(x) > x
            CHECK(dz.zeta_f > kh);
            CHECK(dz.delta > 0.0);
        }
    }

    SUBCASE("zeta_f approaches kh as ppw grows") {
        for (int M : {1, 2}) {
            double prev = 1e9;
            for (double ppw : {10.0, 20.0, 40.0, 80.0}) {
                ToyConfig c = ToyConfig::from_ppw(M, ppw);
                const double dev = std::abs(dispersion_zeros(c).zeta_f / (c.k * c.h) - 1.0);
                CHECK(dev < prev);
                prev = dev;
            }
            // leading error terms: (kh)^2/24 for M=1, (kh)^4/180 for M=2
            CHECK(prev < (M == 1 ? 5e-4 : 1e-6));
        }
    }
}

TEST_CASE("lemma closed form") {
    SUBCASE("boundary values") {
        CHECK(lemma_max(1.0, 0.0) == doctest::Approx(0.0));
        CHECK(lemma_max(0.0, 2.7) == doctest::Approx(1.0)); // no correction: |f| = 1
        CHECK_THROWS(lemma_max(-0.1, 1.0));
        CHECK_THROWS(lemma_max(1.5, 1.0));
        CHECK_THROWS(lemma_max(0.5, -1.0));
    }

    SUBCASE("paper operating point c = 0.73 against the brute-force oracle") {
        const double c = 0.73, R = 0.5;
        // independent maximization of |1 - c (t - dz - i e)/(t - i e)| over t
        const double e = 0.01, dz = R * e; // consistent R = |dz|/e
        double brute = 0.0;
        for (int i = 0; i < 200000; ++i) {
            const double phi = -M_PI / 2 + M_PI * (i + 0.5) / 200000;
            const double t = e * std::tan(phi);
            brute = std::max(brute,
                             std::abs(1.0 - c * (t - dz - Complex(0, e)) / (t - Complex(0, e))));
        }
        CHECK(lemma_max(c, R) == doctest::Approx(brute).epsilon(1e-4));
    }

    SUBCASE("random consistent tuples match brute force to 1e-3") {
        std::mt19937 rng(2024);
        std::uniform_real_distribution<double> uc(0.05, 1.0), uz(-0.5, 0.5), ue(1e-3, 0.2);
        for (int trial = 0; trial < 100; ++trial) {
            const double c = uc(rng), zf = uz(rng), zc = uz(rng), e = ue(rng);
            const double R = std::abs(zf - zc) / e;
            double brute = 0.0;
            for (int i = 0; i < 20000; ++i) {
                const double phi = -M_PI / 2 + M_PI * (i + 0.5) / 20000;
                const double t = e * std::tan(phi); // uniform on the image circle
                brute = std::max(brute, std::abs(1.0 - c * (t + zc - zf - Complex(0, e)) /
                                                           (t - Complex(0, e))));
            }
            CHECK(lemma_max(c, R) == doctest::Approx(brute).epsilon(1e-3));
        }
    }

    SUBCASE("sampled values lie on the lemma's circle") {
        const double c = 0.6, zf = 0.3, zc = 0.24, e = 0.05;
        const Complex center(1.0 - c, c * (zf - zc) / (2.0 * e));
        const double radius = c * std::abs(zf - zc) / (2.0 * e);
        for (double t : {-3.0, -0.4, 0.0, 0.17, 2.2, 50.0}) {
            const Complex f = 1.0 - c * (t + zc - zf - Complex(0, e)) / (t - Complex(0, e));
            CHECK(std::abs(std::abs(f - center) - radius) < 1e-10);
        }
    }
}

TEST_CASE("rho tracks R over the sweep (log-log slope near 1)") {
    const std::vector<double> ppws{8, 10, 12, 16, 20};
    auto rows = sweep(2, ppws, 0.01, 0.2);
    REQUIRE(rows.size() == ppws.size());
    // least-squares slope of log(rho) vs log(R)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double x = std::log(r.R), y = std::log(r.rho);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.3));
    // ratio band and monotone decrease
    double prev_rho = 1e99, prev_R = 1e99;
    for (const auto& r : rows) {
        CHECK(r.rho / r.R > 0.5);
        CHECK(r.rho / r.R < 2.0);
        CHECK(r.rho < prev_rho);
        CHECK(r.R < prev_R);
        prev_rho = r.rho;
        prev_R = r.R;
    }
}

TEST_CASE("symbols are 2pi periodic") {
    ToyConfig cfg = ToyConfig::from_ppw(2, 9.0);
    for (double th : {0.3, 1.1}) {
        CHECK((two_grid_symbol(th, cfg) - two_grid_symbol(th + 2.0 * M_PI, cfg))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

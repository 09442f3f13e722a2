#include "helmtg/dispersion.hpp"

#include <algorithm>
#include <cmath>

#include "helmtg/parallel.hpp"

namespace helmtg {
namespace dispersion {

namespace {

double wrap_pi(double x) {
    x = std::fmod(x + M_PI, 2.0 * M_PI);
    if (x < 0) x += 2.0 * M_PI;
    return x - M_PI;
}

constexpr int kPatch = 8;

} // namespace

double DispersionQuery::h() const {
    // dofs per wavelength: 2 pi p / (k h) for order-p FE, 2 pi / (k h) on the
    // QSFEM lattice
    const double p_eff = scheme == Scheme::Qsfem ? 1.0 : static_cast<double>(order);
    return 2.0 * M_PI * p_eff / (k * ppw);
}

SymbolProvider::SymbolProvider(const DispersionQuery& q) : q_(q) {
    if (q.scheme == Scheme::Qsfem) {
        hc_ = q.h();
        stencil_ = qsfem::stencil_coefficients(q.k * hc_);
        return;
    }
    hc_ = q.h();
    StructuredMesh mesh = StructuredMesh::rectangle(kPatch, kPatch, 1.0, q.kind);
    const BoundaryTags tags = tag_all(mesh, BoundaryTag::Neumann);
    FeSpace space = FeSpace::build_any(mesh, q.order);
    // h = 1 patch with k scaled so that k*h matches the query
    CoefficientField cf = CoefficientField::constant(q.k * hc_);
    SparseComplexMatrix A = assemble_helmholtz(space, cf, tags, 0.0);
    auto cells = [&space](CellIndex c) { return space.unit_cell_dofs(c); };
    fe_ = lfa2d::extract_blocks(A, cells, cells, {3, 3}, {4, 4}, 1);
}

DenseComplexMatrix SymbolProvider::symbol(double t1, double t2) const {
    DenseComplexMatrix S;
    symbol_into(t1, t2, S);
    return S;
}

void SymbolProvider::symbol_into(double t1, double t2, DenseComplexMatrix& S) const {
    if (stencil_) {
        S.resize(1, 1);
        S(0, 0) = stencil_->N / (hc_ * hc_) * qsfem::stencil_symbol(*stencil_, t1, t2);
        return;
    }
    fe_->symbol_into(t1, t2, S);
}

double SymbolProvider::lambda_min(double t1, double t2) const {
    if (stencil_)
        return stencil_->N / (hc_ * hc_) * qsfem::stencil_symbol(*stencil_, t1, t2);
    Eigen::SelfAdjointEigenSolver<DenseComplexMatrix> es(fe_->symbol(t1, t2),
                                                         Eigen::EigenvaluesOnly);
    double best = es.eigenvalues()(0);
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) < std::abs(best)) best = es.eigenvalues()(i);
    return best;
}

Complex smallest_eigenvalue(const DenseComplexMatrix& S) {
    Complex best;
    double bmag = std::numeric_limits<double>::max();
    for (const Complex& ev : dense_eigenvalues(S)) {
        if (std::abs(ev) < bmag) {
            bmag = std::abs(ev);
            best = ev;
        }
    }
    return best;
}

std::array<double, 2> identify_wave_vector(const std::array<double, 2>& theta_star,
                                           const DispersionQuery& q) {
    const double h = q.h();
    const int p = q.folding_order();
    const int win = p / 2 + 1;
    const double xmax = p * M_PI / h;
    std::array<double, 2> best{};
    double berr = std::numeric_limits<double>::max();
    std::array<int, 2> balpha{100, 100};
    for (int ax = -win; ax <= win; ++ax) {
        for (int ay = -win; ay <= win; ++ay) {
            const double x1 = (theta_star[0] + 2.0 * M_PI * ax) / h;
            const double x2 = (theta_star[1] + 2.0 * M_PI * ay) / h;
            if (std::abs(x1) > xmax + 1e-12 || std::abs(x2) > xmax + 1e-12) continue;
            const double err = std::abs(std::hypot(x1, x2) / q.k - 1.0);
            const std::array<int, 2> alpha{ax, ay};
            if (err < berr - 1e-14 ||
                (std::abs(err - berr) <= 1e-14 && alpha < balpha)) {
                berr = err;
                best = {x1, x2};
                balpha = alpha;
            }
        }
    }
    return best;
}

namespace {

struct RadialZero {
    double r;                    // physical radius
    std::array<double, 2> theta; // wrapped
};

// sign of the (real) determinant of a Hermitian symbol, overflow-safe: phase
// product of the U diagonal times the permutation parity. The workspace keeps
// the symbol buffer and LU storage out of the per-evaluation hot path.
struct DetWorkspace {
    DenseComplexMatrix S;
    Eigen::PartialPivLU<DenseComplexMatrix> lu;
};

double det_sign(const DenseComplexMatrix& S, DetWorkspace& ws) {
    if (S.rows() == 1) return S(0, 0).real() >= 0.0 ? 1.0 : -1.0;
    ws.lu.compute(S);
    Complex phase(static_cast<double>(ws.lu.permutationP().determinant()), 0.0);
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
        const Complex d = ws.lu.matrixLU()(i, i);
        const double m = std::abs(d);
        if (m == 0.0) return 0.0;
        phase *= d / m;
    }
    return phase.real() >= 0.0 ? 1.0 : -1.0;
}

double det_sign(const SymbolProvider& sym, double t1, double t2, DetWorkspace& ws) {
    sym.symbol_into(t1, t2, ws.S);
    return det_sign(ws.S, ws);
}

// all zeros of the symbol determinant along direction t for physical radius in
// (r_lo, r_hi); scanning tracks the determinant sign (cheap), the final
// residual is certified on the smallest eigenvalue
std::vector<RadialZero> radial_zeros(const SymbolProvider& sym, double h, double t, double r_lo,
                                     double r_hi, int nscan) {
    const double ct = std::cos(t), st = std::sin(t);
    DetWorkspace ws;
    auto fsign = [&](double r) {
        return det_sign(sym, wrap_pi(h * r * ct), wrap_pi(h * r * st), ws);
    };
    std::vector<RadialZero> zeros;
    double prev_r = r_lo, prev_v = fsign(r_lo);
    for (int i = 1; i <= nscan; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / nscan;
        const double v = fsign(r);
        if (prev_v * v < 0.0) {
            double lo = prev_r, hi = r, flo = prev_v;
            for (int it = 0; it < 48; ++it) {
                const double mid = 0.5 * (lo + hi), fm = fsign(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            const double z = 0.5 * (lo + hi);
            zeros.push_back({z, {wrap_pi(h * z * ct), wrap_pi(h * z * st)}});
        }
        prev_r = r;
        prev_v = v;
    }
    return zeros;
}

// self-intersections of the folded true circle in the theta torus
std::vector<std::array<double, 2>> fold_points(double kh) {
    std::vector<std::array<double, 2>> pts;
    if (kh <= M_PI) return pts;
    const int n = 2048;
    std::vector<std::array<double, 2>> img(n);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * i / n;
        img[i] = {wrap_pi(kh * std::cos(t)), wrap_pi(kh * std::sin(t))};
    }
    auto tdist = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
        return std::hypot(wrap_pi(a[0] - b[0]), wrap_pi(a[1] - b[1]));
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dt = std::min(std::abs(2.0 * M_PI * (i - j) / n),
                                       2.0 * M_PI - std::abs(2.0 * M_PI * (i - j) / n));
            if (dt < 0.3) continue;
            if (tdist(img[i], img[j]) < 0.05) {
                bool close = false;
                for (const auto& p : pts)
                    if (tdist(p, img[i]) < 0.15) close = true;
                if (!close) pts.push_back(img[i]);
            }
        }
    }
    return pts;
}

} // namespace

namespace {

// modes on the radial line in direction t; nearest_err reports the error of the
// zero closest to the true circle (the smooth per-direction objective)
std::vector<PropagatingMode> direction_modes(const SymbolProvider& sym, const DispersionQuery& q,
                                             double t, double* nearest_err, double r_lo = 0.0,
                                             double r_hi = 0.0, int nscan = 300) {
    const double h = q.h();
    const double kh = q.k * h;
    if (r_hi <= r_lo) {
        r_lo = 0.3 * q.k;
        r_hi = 1.7 * q.k;
    }
    std::vector<PropagatingMode> out;
    auto zeros = radial_zeros(sym, h, t, r_lo, r_hi, nscan);
    if (zeros.empty()) {
        out.push_back({{wrap_pi(kh * std::cos(t)), wrap_pi(kh * std::sin(t))},
                       {q.k * std::cos(t), q.k * std::sin(t)},
                       0.7,
                       false});
        if (nearest_err) *nearest_err = 0.7;
        return out;
    }
    double best_r = -1.0, best_e = 0.0;
    for (const RadialZero& z : zeros) {
        PropagatingMode m;
        m.theta = z.theta;
        m.xi = identify_wave_vector(z.theta, q);
        m.error = std::abs(std::hypot(m.xi[0], m.xi[1]) / q.k - 1.0);
        out.push_back(m);
        const double r = std::hypot(m.xi[0], m.xi[1]);
        if (best_r < 0.0 || std::abs(r - q.k) < std::abs(best_r - q.k)) {
            best_r = r;
            best_e = m.error;
        }
    }
    if (nearest_err) *nearest_err = best_e;
    return out;
}

} // namespace

namespace {

// dense sampling near fold self-intersections, where the zero curve is not a
// graph over the circle parameter
std::vector<PropagatingMode> fold_modes(const SymbolProvider& sym, const DispersionQuery& q) {
    const double kh = q.k * q.h();
    const auto fps = fold_points(kh);
    std::vector<std::vector<PropagatingMode>> per_fp(fps.size());
    parallel_for(fps.size(), [&](std::size_t fi) {
        const auto& fp = fps[fi];
        std::vector<PropagatingMode>& modes = per_fp[fi];
        const int ng = 33;
        const double rad = 0.2;
        DetWorkspace ws;
        Eigen::MatrixXd vals(ng, ng);
        for (int a = 0; a < ng; ++a)
            for (int b = 0; b < ng; ++b)
                vals(a, b) = det_sign(sym, wrap_pi(fp[0] - rad + 2.0 * rad * a / (ng - 1)),
                                      wrap_pi(fp[1] - rad + 2.0 * rad * b / (ng - 1)), ws);
        auto refine = [&](double x0, double y0, double x1, double y1) {
            auto g = [&](double s) {
                return det_sign(sym, wrap_pi(x0 + s * (x1 - x0)), wrap_pi(y0 + s * (y1 - y0)), ws);
            };
            double lo = 0.0, hi = 1.0, flo = g(0.0);
            for (int it = 0; it < 48; ++it) {
                const double mid = 0.5 * (lo + hi), fm = g(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            const double s = 0.5 * (lo + hi);
            PropagatingMode m;
            m.theta = {wrap_pi(x0 + s * (x1 - x0)), wrap_pi(y0 + s * (y1 - y0))};
            m.xi = identify_wave_vector(m.theta, q);
            m.error = std::abs(std::hypot(m.xi[0], m.xi[1]) / q.k - 1.0);
            modes.push_back(m);
        };
        for (int a = 0; a < ng; ++a) {
            for (int b = 0; b < ng; ++b) {
                const double x = fp[0] - rad + 2.0 * rad * a / (ng - 1);
                const double y = fp[1] - rad + 2.0 * rad * b / (ng - 1);
                const double step = 2.0 * rad / (ng - 1);
                if (a + 1 < ng && vals(a, b) * vals(a + 1, b) < 0.0)
                    refine(x, y, x + step, y);
                if (b + 1 < ng && vals(a, b) * vals(a, b + 1) < 0.0)
                    refine(x, y, x, y + step);
            }
        }
    });
    std::vector<PropagatingMode> modes;
    for (auto& v : per_fp) modes.insert(modes.end(), v.begin(), v.end());
    return modes;
}

} // namespace

std::vector<PropagatingMode> find_zero_curve(const DispersionQuery& q) {
    const SymbolProvider sym(q);
    std::vector<std::vector<PropagatingMode>> per_dir(q.n_directions);
    parallel_for(static_cast<std::size_t>(q.n_directions), [&](std::size_t i) {
        // normal-to-the-true-relation searches, directions over [0, pi/2]
        const double t = M_PI / 2.0 * i / std::max(q.n_directions - 1, 1);
        per_dir[i] = direction_modes(sym, q, t, nullptr);
    });
    std::vector<PropagatingMode> modes;
    for (auto& v : per_dir) modes.insert(modes.end(), v.begin(), v.end());
    for (const auto& m : fold_modes(sym, q)) modes.push_back(m);
    return modes;
}

double max_dispersion_error(const DispersionQuery& q) {
    const SymbolProvider sym(q);
    const int nd = q.n_directions;
    std::vector<std::vector<PropagatingMode>> per_dir(nd);
    std::vector<double> nearest(nd, 0.0);
    parallel_for(static_cast<std::size_t>(nd), [&](std::size_t i) {
        const double t = M_PI / 2.0 * i / std::max(nd - 1, 1);
        per_dir[i] = direction_modes(sym, q, t, &nearest[i]);
    });
    double worst = 0.0;
    int ibest = 0;
    for (int i = 0; i < nd; ++i) {
        for (const auto& m : per_dir[i]) worst = std::max(worst, m.error);
        if (nearest[i] > nearest[ibest]) ibest = i;
    }
    // fold neighborhoods when the circle self-intersects on the torus
    for (const auto& m : fold_modes(sym, q)) worst = std::max(worst, m.error);

    // golden-section refinement of the direction maximizer along the primary
    // branch, so the reported maximum does not depend on the direction grid;
    // the rescan is confined to a narrow radial window around the found branch
    double r_center = q.k;
    for (const auto& m : per_dir[ibest]) {
        const double r = std::hypot(m.xi[0], m.xi[1]);
        if (std::abs(r - q.k) < std::abs(r_center - q.k) || r_center == q.k) r_center = r;
    }
    const double half = std::max(0.05 * q.k, 2.0 * std::abs(r_center - q.k));
    auto err_at = [&](double t) {
        double e = 0.0;
        direction_modes(sym, q, t, &e, std::max(r_center - half, 0.05 * q.k), r_center + half, 80);
        if (e >= 0.7) direction_modes(sym, q, t, &e); // branch left the window
        return e;
    };
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    const double step = M_PI / 2.0 / std::max(nd - 1, 1);
    const double tbest = M_PI / 2.0 * ibest / std::max(nd - 1, 1);
    double a = tbest - step, b = tbest + step;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = err_at(x1), f2 = err_at(x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = err_at(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = err_at(x1);
        }
    }
    return std::max({worst, f1, f2});
}

DeltaR delta_and_R(const DispersionQuery& fine, const DispersionQuery& coarse, double D) {
    const SymbolProvider fsym(fine), csym(coarse);
    const int nd = fine.n_directions;
    DeltaR out;
    out.delta.assign(nd, 0.0);
    std::vector<char> ok(nd, 0);
    parallel_for(static_cast<std::size_t>(nd), [&](std::size_t i) {
        const double t = M_PI / 2.0 * i / std::max(nd - 1, 1);
        auto pick = [&](const SymbolProvider& sym, const DispersionQuery& q) -> double {
            auto zeros = radial_zeros(sym, q.h(), t, 0.3 * q.k, 1.7 * q.k, 300);
            double best = -1.0;
            for (const RadialZero& z : zeros) {
                const auto xi = identify_wave_vector(z.theta, q);
                const double r = std::hypot(xi[0], xi[1]);
                if (best < 0.0 || std::abs(r - q.k) < std::abs(best - q.k)) best = r;
            }
            return best;
        };
        const double rf = pick(fsym, fine), rc = pick(csym, coarse);
        if (rf > 0.0 && rc > 0.0) {
            out.delta[i] = (rc - rf) / fine.k;
            ok[i] = 1;
        }
    });
    double dmax = 0.0;
    for (int i = 0; i < nd; ++i)
        if (ok[i]) dmax = std::max(dmax, std::abs(out.delta[i]));
    out.R = 2.0 * M_PI * dmax / D;
    return out;
}

} // namespace dispersion
} // namespace helmtg

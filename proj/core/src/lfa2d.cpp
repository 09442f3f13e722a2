#include "helmtg/lfa2d.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "helmtg/parallel.hpp"
#include "helmtg/qsfem.hpp"

namespace helmtg {
namespace lfa2d {

DenseComplexMatrix BlockToeplitzView::symbol(double t1, double t2) const {
    DenseComplexMatrix S;
    symbol_into(t1, t2, S);
    return S;
}

void BlockToeplitzView::symbol_into(double t1, double t2, DenseComplexMatrix& S) const {
    S.setZero(rows_, cols_);
    for (int by = -window_; by <= window_; ++by)
        for (int bx = -window_; bx <= window_; ++bx)
            S.noalias() += std::exp(Complex(0, t1 * bx + t2 * by)) * blocks_[index(bx, by)];
}

namespace {

DenseComplexMatrix read_block(const SparseComplexMatrix& A, const std::vector<int>& rows,
                              const std::vector<int>& cols) {
    DenseComplexMatrix B = DenseComplexMatrix::Zero(rows.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows.size(); ++i) B(i, j) = A.coeff(rows[i], cols[j]);
    return B;
}

} // namespace

BlockToeplitzView extract_blocks(const SparseComplexMatrix& A,
                                 const std::function<std::vector<int>(CellIndex)>& row_cells,
                                 const std::function<std::vector<int>(CellIndex)>& col_cells,
                                 CellIndex anchor, CellIndex anchor2, int window, bool check_decay) {
    const auto r0 = row_cells(anchor);
    const auto c0 = col_cells(anchor);
    BlockToeplitzView view(window, static_cast<int>(r0.size()), static_cast<int>(c0.size()));
    double scale = 1e-30;
    for (int by = -window; by <= window; ++by) {
        for (int bx = -window; bx <= window; ++bx) {
            view.block(bx, by) =
                read_block(A, r0, col_cells({anchor.x + bx, anchor.y + by}));
            scale = std::max(scale, view.block(bx, by).cwiseAbs().maxCoeff());
        }
    }
    // translation invariance at a second anchor
    const auto r1 = row_cells(anchor2);
    for (int by = -window; by <= window; ++by) {
        for (int bx = -window; bx <= window; ++bx) {
            DenseComplexMatrix B1 =
                read_block(A, r1, col_cells({anchor2.x + bx, anchor2.y + by}));
            if ((B1 - view.block(bx, by)).cwiseAbs().maxCoeff() > 1e-12 * scale)
                throw std::runtime_error("extract_blocks: translation invariance check failed");
        }
    }
    if (check_decay) {
        const int w = window + 1;
        for (int bx = -w; bx <= w; ++bx) {
            for (int by : {-w, w}) {
                for (auto [ex, ey] : {std::pair{bx, by}, std::pair{by, bx}}) {
                    DenseComplexMatrix B = read_block(A, r0, col_cells({anchor.x + ex, anchor.y + ey}));
                    if (B.cwiseAbs().maxCoeff() > 1e-13 * scale)
                        throw std::runtime_error("extract_blocks: nonzero block outside window");
                }
            }
        }
    }
    return view;
}

DenseComplexMatrix inverse_symbol(const DenseComplexMatrix& S) {
    Eigen::PartialPivLU<DenseComplexMatrix> lu(S);
    DenseComplexMatrix inv = lu.inverse();
    const double cond_proxy = inv.cwiseAbs().maxCoeff() * S.cwiseAbs().maxCoeff();
    if (!inv.allFinite() || cond_proxy > 1e12)
        throw std::runtime_error("inverse_symbol: matrix near-singular (resonant theta)");
    return inv;
}

namespace {
constexpr int kPatch = 8; // interior patch size in cells; anchors at (3,3) and (4,4)
}

LfaOperators::LfaOperators(const LfaConfig& cfg) : cfg_(cfg) {
    const int p = cfg.p;
    if (p < 2 || p > 8 || p % 2) throw std::invalid_argument("LfaOperators: p must be even in [2,8]");
    kh_ = 2.0 * M_PI * p / cfg.ppw; // h = 1
    const double k = kh_;
    const double eps = k * k * cfg.D / M_PI;

    StructuredMesh mesh = StructuredMesh::rectangle(kPatch, kPatch, 1.0, cfg.kind);
    const BoundaryTags tags = tag_all(mesh, BoundaryTag::Neumann);
    FeSpace space = FeSpace::build(mesh, p);
    CoefficientField cf = CoefficientField::constant(k, eps);
    CoefficientField cf0 = CoefficientField::constant(k, 0.0);

    const SparseComplexMatrix A = assemble_helmholtz(space, cf, tags, 0.0);
    const SparseComplexMatrix As = assemble_helmholtz(space, cf, tags, cfg.alpha_s);
    const SparseComplexMatrix A0 = assemble_helmholtz(space, cf0, tags, 0.0);

    const CellIndex anchor{3, 3}, anchor2{4, 4};
    auto fine_cells = [&space](CellIndex c) { return space.unit_cell_dofs(c); };
    A_ = std::make_unique<BlockToeplitzView>(extract_blocks(A, fine_cells, fine_cells, anchor, anchor2, 1));
    As_ = std::make_unique<BlockToeplitzView>(extract_blocks(As, fine_cells, fine_cells, anchor, anchor2, 1));
    A0_ = std::make_unique<BlockToeplitzView>(extract_blocks(A0, fine_cells, fine_cells, anchor, anchor2, 1));

    const int m = p / 2;
    if (cfg.coarsening == Coarsening::OptimizedFD) {
        StructuredMesh cmesh = StructuredMesh::rectangle(kPatch * m, kPatch * m, 2.0 / p,
                                                         ElementKind::Square);
        const BoundaryTags ctags = tag_all(cmesh, BoundaryTag::Neumann);
        FeSpace cspace = FeSpace::build_any(cmesh, 1);
        const SparseComplexMatrix Ac = qsfem::assemble(cspace, cf.subdivided(m), ctags);
        const SparseComplexMatrix Ac0 = qsfem::assemble(cspace, cf0.subdivided(m), ctags);
        const SparseComplexMatrix IP = build_prolongation(space, cspace, {}, {});
        // coarse vertices grouped per fine h-cell so all symbols live on one torus
        auto coarse_cells = [&cspace, m](CellIndex c) {
            std::vector<int> dofs;
            dofs.reserve(m * m);
            for (int b = 0; b < m; ++b)
                for (int a = 0; a < m; ++a) dofs.push_back(cspace.vertex_dof(c.x * m + a, c.y * m + b));
            return dofs;
        };
        Ac_ = std::make_unique<BlockToeplitzView>(
            extract_blocks(Ac, coarse_cells, coarse_cells, anchor, anchor2, 1));
        Ac0_ = std::make_unique<BlockToeplitzView>(
            extract_blocks(Ac0, coarse_cells, coarse_cells, anchor, anchor2, 1));
        IP_ = std::make_unique<BlockToeplitzView>(
            extract_blocks(IP, fine_cells, coarse_cells, anchor, anchor2, 1));
    } else {
        GalerkinCoarse g = galerkin_p_coarse(space, cf, tags, cfg.alpha_c);
        const SparseComplexMatrix Ac0 = assemble_helmholtz(*g.space, cf0, tags, 0.0);
        auto coarse_cells = [&g](CellIndex c) { return g.space->unit_cell_dofs(c); };
        Ac_ = std::make_unique<BlockToeplitzView>(
            extract_blocks(g.Ac, coarse_cells, coarse_cells, anchor, anchor2, 1));
        Ac0_ = std::make_unique<BlockToeplitzView>(
            extract_blocks(Ac0, coarse_cells, coarse_cells, anchor, anchor2, 1));
        IP_ = std::make_unique<BlockToeplitzView>(
            extract_blocks(g.IP, fine_cells, coarse_cells, anchor, anchor2, 1));
    }
}

DenseComplexMatrix LfaOperators::two_grid_symbol(double t1, double t2, int n_s,
                                                 double omega_c) const {
    const DenseComplexMatrix SA = symbol_A(t1, t2);
    const DenseComplexMatrix SAs = symbol_As(t1, t2);
    const DenseComplexMatrix SC = symbol_Ac(t1, t2);
    const DenseComplexMatrix SIP = symbol_IP(t1, t2);
    const int n = fine_dim();
    const DenseComplexMatrix S =
        DenseComplexMatrix::Identity(n, n) - SAs.partialPivLu().solve(SA);
    const DenseComplexMatrix K =
        DenseComplexMatrix::Identity(n, n) -
        omega_c * (SIP * SC.partialPivLu().solve(SIP.adjoint() * SA));
    DenseComplexMatrix Spow = DenseComplexMatrix::Identity(n, n);
    for (int i = 0; i < n_s; ++i) Spow = Spow * S;
    DenseComplexMatrix M = Spow * K * Spow;
    if (!M.allFinite())
        throw std::runtime_error("two_grid_symbol: singular symbol (resonant theta)");
    return M;
}

namespace {

// smallest-|.| eigenvalue of a Hermitian symbol (real by symmetry of the
// eps = 0 operators)
double lambda_min_abs(const DenseComplexMatrix& S) {
    Eigen::SelfAdjointEigenSolver<DenseComplexMatrix> es(S, Eigen::EigenvaluesOnly);
    double best = std::numeric_limits<double>::max();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) < std::abs(best)) best = es.eigenvalues()(i);
    return best;
}

double wrap_pi(double x) {
    x = std::fmod(x + M_PI, 2.0 * M_PI);
    if (x < 0) x += 2.0 * M_PI;
    return x - M_PI;
}

// all radial zeros of the eps=0 symbol determinant along direction t (wrapped
// into the torus), up to physical radius rmax
std::vector<double> radial_zeros(const std::function<DenseComplexMatrix(double, double)>& sym,
                                 double t, double rmax, int nscan) {
    const double ct = std::cos(t), st = std::sin(t);
    auto f = [&](double r) { return lambda_min_abs(sym(wrap_pi(r * ct), wrap_pi(r * st))); };
    std::vector<double> zeros;
    double prev_r = 1e-9, prev_v = f(prev_r);
    for (int i = 1; i <= nscan; ++i) {
        const double r = 1e-9 + (rmax - 1e-9) * i / nscan;
        const double v = f(r);
        if (prev_v * v < 0.0) {
            double lo = prev_r, hi = r, flo = prev_v;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi), fm = f(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        prev_r = r;
        prev_v = v;
    }
    return zeros;
}

} // namespace

RateResult two_grid_rate(const LfaOperators& ops, const ThetaGrid& grid, int n_s, double omega_c) {
    RateResult res;
    const double kh = ops.kh();
    std::atomic<int> skipped{0};

    auto rho_at = [&](double t1, double t2) {
        try {
            return spectral_radius(ops.two_grid_symbol(t1, t2, n_s, omega_c));
        } catch (const std::runtime_error&) {
            // borderline coarse resonance: retry at a slightly perturbed theta
            ++skipped;
            try {
                return spectral_radius(ops.two_grid_symbol(t1 + 1e-6, t2 + 1e-6, n_s, omega_c));
            } catch (const std::runtime_error&) {
                return 0.0;
            }
        }
    };

    // 1) uniform grid
    std::vector<std::array<double, 3>> samples;
    const int nu = grid.uniform;
    samples.resize(static_cast<std::size_t>(nu) * nu);
    parallel_for(samples.size(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / nu, j = static_cast<int>(idx) % nu;
        const double t1 = -M_PI + 2.0 * M_PI * i / nu;
        const double t2 = -M_PI + 2.0 * M_PI * j / nu;
        samples[idx] = {t1, t2, rho_at(t1, t2)};
    });
    if (grid.keep_table) res.table = samples;
    for (const auto& s : samples) {
        if (s[2] > res.rho) {
            res.rho = s[2];
            res.theta_max = {s[0], s[1]};
        }
    }

    // 2) annulus ||theta|| in [0.8, 1.2] kh around the propagating circle
    {
        const int na = std::max(grid.annulus / 4, 1);
        std::vector<std::array<double, 3>> ann(static_cast<std::size_t>(na) * 4);
        parallel_for(ann.size(), [&](std::size_t idx) {
            const int ia = static_cast<int>(idx) / 4, ir = static_cast<int>(idx) % 4;
            const double ang = 2.0 * M_PI * ia / na;
            const double rad = (0.8 + 0.4 * ir / 3.0) * kh;
            const double t1 = wrap_pi(rad * std::cos(ang)), t2 = wrap_pi(rad * std::sin(ang));
            ann[idx] = {t1, t2, rho_at(t1, t2)};
        });
        for (const auto& s : ann) {
            if (s[2] > res.rho) {
                res.rho = s[2];
                res.theta_max = {s[0], s[1]};
            }
        }
    }

    // 3) resonance-circle refinement: the sup typically lives in radial needles
    // of width ~ kh D / (2 pi) around the fine and coarse dispersion circles,
    // far below the uniform grid resolution
    if (grid.refine) {
        const double eps_t = kh * ops.config().D / (2.0 * M_PI);
        const double rmax = std::min(1.45 * kh + 0.5, 1.05 * M_PI * M_SQRT2 + kh);
        static const double offs[] = {0.0, 0.3,  -0.3, 0.7,  -0.7, 1.0, -1.0, 1.5, -1.5, 2.0,
                                      -2.0, 3.0, -3.0, 5.0,  -5.0, 8.0, -8.0, 14.0, -14.0};
        const int nang = grid.refine_angles;
        std::vector<std::array<double, 3>> needle(nang);
        parallel_for(static_cast<std::size_t>(nang), [&](std::size_t ia) {
            const double t = M_PI / 4.0 * ia / (nang - 1); // dihedral symmetry
            auto fine_sym = [&](double a, double b) { return ops.symbol_A0(a, b); };
            auto coarse_sym = [&](double a, double b) { return ops.symbol_Ac0(a, b); };
            std::vector<double> centers = radial_zeros(fine_sym, t, rmax, 360);
            for (double z : radial_zeros(coarse_sym, t, rmax, 360)) centers.push_back(z);
            double best = 0.0, b1 = 0.0, b2 = 0.0;
            const double ct = std::cos(t), st = std::sin(t);
            for (double r0 : centers) {
                for (double o : offs) {
                    const double r = r0 + o * eps_t;
                    const double t1 = wrap_pi(r * ct), t2 = wrap_pi(r * st);
                    const double v = rho_at(t1, t2);
                    if (v > best) {
                        best = v;
                        b1 = t1;
                        b2 = t2;
                    }
                }
            }
            needle[ia] = {b1, b2, best};
        });
        for (const auto& s : needle) {
            if (s[2] > res.rho) {
                res.rho = s[2];
                res.theta_max = {s[0], s[1]};
            }
        }
    }
    res.skipped = skipped.load();
    return res;
}

std::vector<SweepRow> parameter_sweep(const std::vector<int>& orders,
                                      const std::vector<double>& ppws,
                                      const std::vector<Coarsening>& coarsenings,
                                      const std::vector<int>& n_s_list,
                                      const std::vector<double>& omega_c_list, ElementKind kind,
                                      double D, double alpha_s, double alpha_c,
                                      const ThetaGrid& grid) {
    std::vector<SweepRow> rows;
    for (int p : orders) {
        for (double ppw : ppws) {
            for (Coarsening c : coarsenings) {
                LfaConfig cfg;
                cfg.p = p;
                cfg.kind = kind;
                cfg.ppw = ppw;
                cfg.D = D;
                cfg.alpha_s = alpha_s;
                cfg.alpha_c = alpha_c;
                cfg.coarsening = c;
                LfaOperators ops(cfg);
                for (int n_s : n_s_list) {
                    for (double omega : omega_c_list) {
                        RateResult r = two_grid_rate(ops, grid, n_s, omega);
                        rows.push_back({p, ppw, c, n_s, omega, r.rho, r.theta_max[0], r.theta_max[1]});
                    }
                }
            }
        }
    }
    return rows;
}

} // namespace lfa2d
} // namespace helmtg

#include "helmtg/twogrid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "helmtg/parallel.hpp"

namespace helmtg {

namespace {

int floordiv(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

} // namespace

DomainDecomposition partition(const StructuredMesh& mesh, const FeSpace& space, int l_dd) {
    if (l_dd < 2) throw std::invalid_argument("partition: l_dd must be >= 2");
    const CellIndex lo = mesh.cell_min(), hi = mesh.cell_max();
    DomainDecomposition dd;

    std::unordered_map<CellIndex, char, CellIndexHash> u_set;
    for (int by = lo.y; by <= hi.y; by += l_dd) {
        for (int bx = lo.x; bx <= hi.x; bx += l_dd) {
            DomainDecomposition::Subdomain sub;
            u_set.clear();
            for (int y = by; y < std::min(by + l_dd, hi.y + 1); ++y)
                for (int x = bx; x < std::min(bx + l_dd, hi.x + 1); ++x)
                    if (mesh.has_cell(x, y)) {
                        sub.u_cells.push_back({x, y});
                        u_set.emplace(CellIndex{x, y}, 1);
                    }
            if (sub.u_cells.empty()) continue;
            // one layer of edge-or-vertex neighbors
            std::set<CellIndex> omega(sub.u_cells.begin(), sub.u_cells.end());
            for (CellIndex c : sub.u_cells)
                for (int dx = -1; dx <= 1; ++dx)
                    for (int dy = -1; dy <= 1; ++dy)
                        if (mesh.has_cell(c.x + dx, c.y + dy)) omega.insert({c.x + dx, c.y + dy});
            sub.omega_cells.assign(omega.begin(), omega.end());

            // local dof tables come later (build_subdomain_operators); here we
            // record U membership per entity for the multiplicity average
            StructuredMesh omesh = StructuredMesh::from_cells(sub.omega_cells, mesh.spacing(),
                                                              mesh.element_kind());
            FeSpace ospace = FeSpace::build_any(omesh, space.order());
            sub.global_dofs.resize(ospace.ndof());
            const auto& keys = ospace.dof_keys();
            for (int i = 0; i < ospace.ndof(); ++i) {
                sub.global_dofs[i] = space.find_dof(keys[i]);
                const auto& k = keys[i];
                bool in_u = false;
                switch (k.kind) {
                    case 'v':
                        in_u = u_set.count({k.x - 1, k.y - 1}) || u_set.count({k.x, k.y - 1}) ||
                               u_set.count({k.x - 1, k.y}) || u_set.count({k.x, k.y});
                        break;
                    case 'h': in_u = u_set.count({k.x, k.y}) || u_set.count({k.x, k.y - 1}); break;
                    case 'e': in_u = u_set.count({k.x, k.y}) || u_set.count({k.x - 1, k.y}); break;
                    default: in_u = u_set.count({k.x, k.y}) > 0; break;
                }
                if (in_u) sub.u_members.push_back(i);
            }
            dd.subdomains.push_back(std::move(sub));
        }
    }

    dd.multiplicity = Eigen::VectorXd::Zero(space.ndof());
    for (const auto& sub : dd.subdomains)
        for (int li : sub.u_members) dd.multiplicity(sub.global_dofs[li]) += 1.0;
    if (dd.multiplicity.minCoeff() < 1.0)
        throw std::logic_error("partition: some dof belongs to no subdomain");
    return dd;
}

void build_subdomain_operators(const FeSpace& space, const CoefficientField& coeffs,
                               const BoundaryTags& tags, double alpha_s, DomainDecomposition& dd) {
    const StructuredMesh& mesh = space.mesh();
    parallel_for(dd.subdomains.size(), [&](std::size_t i) {
        auto& sub = dd.subdomains[i];
        StructuredMesh omesh =
            StructuredMesh::from_cells(sub.omega_cells, mesh.spacing(), mesh.element_kind());
        FeSpace ospace = FeSpace::build_any(omesh, space.order());
        BoundaryTags otags;
        for (EdgeKey e : omesh.boundary_edges())
            otags.set(e, mesh.is_boundary_edge(e) ? tags.get(e) : BoundaryTag::Absorbing);
        SparseComplexMatrix Asub = assemble_helmholtz(ospace, coeffs, otags, alpha_s);
        sub.factor.emplace(Asub);
    });
}

ComplexVector dd_step(const ComplexVector& u, const ComplexVector& f,
                      const SparseComplexMatrix& As, const DomainDecomposition& dd) {
    const ComplexVector g = f - As * u;
    std::vector<ComplexVector> w(dd.subdomains.size());
    parallel_for(dd.subdomains.size(), [&](std::size_t i) {
        const auto& sub = dd.subdomains[i];
        ComplexVector gl(sub.global_dofs.size()), ul(sub.global_dofs.size());
        for (std::size_t j = 0; j < sub.global_dofs.size(); ++j) {
            gl(j) = g(sub.global_dofs[j]);
            ul(j) = u(sub.global_dofs[j]);
        }
        w[i] = ul + sub.factor->solve(gl);
    });
    ComplexVector out = ComplexVector::Zero(u.size());
    for (std::size_t i = 0; i < dd.subdomains.size(); ++i) {
        const auto& sub = dd.subdomains[i];
        for (int li : sub.u_members) out(sub.global_dofs[li]) += w[i](li);
    }
    out.array() /= dd.multiplicity.array();
    return out;
}

void csdd_smoother(ComplexVector& u, const ComplexVector& f, const SparseComplexMatrix& A,
                   const SparseComplexMatrix& As, const DomainDecomposition& dd, int n_dd) {
    const ComplexVector r = f - A * u;
    ComplexVector v = ComplexVector::Zero(u.size());
    for (int i = 0; i < n_dd; ++i) v = dd_step(v, r, As, dd);
    u += v;
}

StructuredMesh coarse_mesh_for(const FeSpace& space) {
    const StructuredMesh& mesh = space.mesh();
    const int m = space.order() / 2;
    if (m < 1) throw std::invalid_argument("coarse_mesh_for: order must be even >= 2");
    const double hc = 2.0 * mesh.spacing() / space.order();
    if (m == 1 && mesh.element_kind() == ElementKind::Square) {
        std::vector<CellIndex> cells = mesh.cells();
        return StructuredMesh::from_cells(std::move(cells), hc, ElementKind::Square);
    }
    std::vector<CellIndex> cells;
    cells.reserve(mesh.cells().size() * m * m);
    for (CellIndex c : mesh.cells())
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) cells.push_back({c.x * m + a, c.y * m + b});
    return StructuredMesh::from_cells(std::move(cells), hc, ElementKind::Square);
}

CoefficientField coarsen_coefficients(const CoefficientField& fine, int m) {
    return fine.subdivided(m);
}

BoundaryTags coarsen_tags(const StructuredMesh& coarse, const BoundaryTags& fine_tags, int m) {
    BoundaryTags out;
    for (EdgeKey e : coarse.boundary_edges())
        out.set(e, fine_tags.get({floordiv(e.x, m), floordiv(e.y, m), e.dir}));
    return out;
}

SparseComplexMatrix build_prolongation(const FeSpace& fine, const FeSpace& coarse_p1,
                                       const std::vector<int>& fine_dirichlet,
                                       const std::vector<int>& coarse_dirichlet) {
    const StructuredMesh& mesh = fine.mesh();
    const int p = fine.order(), m = p / 2;
    std::vector<char> fdir(fine.ndof(), 0), cdir(coarse_p1.ndof(), 0);
    for (int d : fine_dirichlet) fdir[d] = 1;
    for (int d : coarse_dirichlet) cdir[d] = 1;

    std::vector<Eigen::Triplet<Complex>> trips;
    std::vector<char> written(fine.ndof(), 0);
    for (CellIndex c : mesh.cells()) {
        for (int sub = 0; sub < fine.n_element_subs(); ++sub) {
            const StageInterp& si = stage_interp(p, mesh.element_kind(), sub, m);
            const auto dofs = fine.element_dofs(c, sub);
            std::vector<int> cdofs(si.points.size());
            for (std::size_t j = 0; j < si.points.size(); ++j) {
                const int cx = c.x * m + static_cast<int>(std::lround(si.points[j][0] * m));
                const int cy = c.y * m + static_cast<int>(std::lround(si.points[j][1] * m));
                cdofs[j] = coarse_p1.vertex_dof(cx, cy);
            }
            for (std::size_t i = 0; i < dofs.size(); ++i) {
                if (written[dofs[i]]) continue;
                written[dofs[i]] = 1;
                if (fdir[dofs[i]]) continue;
                for (std::size_t j = 0; j < si.points.size(); ++j) {
                    const double v = si.E(i, j);
                    if (v != 0.0 && !cdir[cdofs[j]])
                        trips.emplace_back(dofs[i], cdofs[j], Complex(v, 0));
                }
            }
        }
    }
    SparseComplexMatrix IP(fine.ndof(), coarse_p1.ndof());
    IP.setFromTriplets(trips.begin(), trips.end());
    IP.makeCompressed();
    return IP;
}

GalerkinCoarse galerkin_p_coarse(const FeSpace& space, const CoefficientField& coeffs,
                                 const BoundaryTags& tags, double alpha_c) {
    const int p = space.order();
    if (p % 2 != 0) throw std::invalid_argument("galerkin_p_coarse: order must be even");
    GalerkinCoarse out;
    out.space = std::make_unique<FeSpace>(FeSpace::build_any(space.mesh(), p / 2));
    out.Ac = assemble_helmholtz(*out.space, coeffs, tags, alpha_c);

    const int pc = p / 2;
    std::vector<char> fdir(space.ndof(), 0), cdir(out.space->ndof(), 0);
    for (int d : space.dirichlet_dofs(tags)) fdir[d] = 1;
    for (int d : out.space->dirichlet_dofs(tags)) cdir[d] = 1;

    std::vector<Eigen::Triplet<Complex>> trips;
    const auto& ckeys = out.space->dof_keys();
    for (int ci = 0; ci < out.space->ndof(); ++ci) {
        FeSpace::DofKey k = ckeys[ci];
        if (k.kind == 'c' && space.mesh().element_kind() == ElementKind::Square) {
            const int dx = k.off / std::max(pc - 1, 1), dy = k.off % std::max(pc - 1, 1);
            k.off = dx * (p - 1) + dy;
        }
        // edge offsets and (degree-major) triangle bubble offsets carry over as-is
        const int fi = space.find_dof(k);
        if (fi < 0) throw std::logic_error("galerkin_p_coarse: missing fine dof for inclusion");
        if (!fdir[fi] && !cdir[ci]) trips.emplace_back(fi, ci, Complex(1, 0));
    }
    out.IP = SparseComplexMatrix(space.ndof(), out.space->ndof());
    out.IP.setFromTriplets(trips.begin(), trips.end());
    out.IP.makeCompressed();
    return out;
}

TwoGridOperators setup_two_grid(const FeSpace& space, const CoefficientField& coeffs,
                                const BoundaryTags& tags, const SolverConfig& config) {
    TwoGridOperators ops;
    ops.space = &space;
    ops.A = assemble_helmholtz(space, coeffs, tags, 0.0);
    ops.As = assemble_helmholtz(space, coeffs, tags, config.alpha_s);
    ops.smoother_kind = config.smoother;
    if (config.smoother == SmootherKind::CSDD) {
        ops.dd = partition(space.mesh(), space, config.l_dd);
        build_subdomain_operators(space, coeffs, tags, config.alpha_s, *ops.dd);
    } else {
        ops.As_factor.emplace(ops.As);
    }
    ops.coarsening = config.coarsening;
    if (config.coarsening == CoarseKind::OptimizedFD) {
        const int m = space.order() / 2;
        ops.coarse_mesh = std::make_unique<StructuredMesh>(coarse_mesh_for(space));
        ops.coarse_space = std::make_unique<FeSpace>(FeSpace::build_any(*ops.coarse_mesh, 1));
        const CoefficientField ccoeffs = coarsen_coefficients(coeffs, m);
        const BoundaryTags ctags = coarsen_tags(*ops.coarse_mesh, tags, m);
        ops.Ac = qsfem::assemble(*ops.coarse_space, ccoeffs, ctags);
        ops.IP = build_prolongation(space, *ops.coarse_space, space.dirichlet_dofs(tags),
                                    ops.coarse_space->dirichlet_dofs(ctags));
        ops.Ac_factor.emplace(ops.Ac);
    } else if (config.coarsening == CoarseKind::GalerkinP) {
        GalerkinCoarse g = galerkin_p_coarse(space, coeffs, tags, config.alpha_c);
        ops.coarse_space = std::move(g.space);
        ops.Ac = std::move(g.Ac);
        ops.IP = std::move(g.IP);
        ops.Ac_factor.emplace(ops.Ac);
    }
    return ops;
}

namespace {

void smooth(ComplexVector& u, const ComplexVector& f, const TwoGridOperators& ops,
            const SolverConfig& config) {
    if (ops.smoother_kind == SmootherKind::CSDD) {
        csdd_smoother(u, f, ops.A, ops.As, *ops.dd, config.n_dd);
    } else {
        u += ops.As_factor->solve(f - ops.A * u);
    }
}

} // namespace

void two_grid_step(ComplexVector& u, const ComplexVector& f, const TwoGridOperators& ops,
                   const SolverConfig& config) {
    for (int i = 0; i < config.n_s; ++i) smooth(u, f, ops, config);
    if (ops.coarsening != CoarseKind::None) {
        const ComplexVector rc = ops.IP.adjoint() * (f - ops.A * u);
        u += config.omega_c * (ops.IP * ops.Ac_factor->solve(rc));
    }
    for (int i = 0; i < config.n_s; ++i) smooth(u, f, ops, config);
}

SolveResult solve(const ComplexVector& f, const TwoGridOperators& ops, const SolverConfig& config) {
    SolveResult res;
    res.u = ComplexVector::Zero(f.size());
    const double nf = f.norm();
    if (nf == 0.0) return res; // converged in 0 iterations

    if (config.outer == OuterKind::Richardson) {
        for (int it = 1; it <= config.max_iters; ++it) {
            two_grid_step(res.u, f, ops, config);
            const double rr = (f - ops.A * res.u).norm() / nf;
            res.residual_history.push_back(rr);
            res.iterations = it;
            if (rr <= config.stop_rel_residual) return res;
        }
        res.converged = false;
        return res;
    }

    // GMRES on M A u = M f with the two-grid step from zero as left preconditioner M
    auto precond = [&](const ComplexVector& r) {
        ComplexVector z = ComplexVector::Zero(r.size());
        two_grid_step(z, r, ops, config);
        return z;
    };
    const int mmax = config.max_iters;
    ComplexVector b = precond(f);
    const double beta = b.norm();
    std::vector<ComplexVector> Q;
    Q.push_back(b / beta);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(mmax + 1, mmax);
    for (int it = 1; it <= mmax; ++it) {
        ComplexVector w = precond(ops.A * Q.back());
        for (int i = 0; i < it; ++i) {
            H(i, it - 1) = Q[i].dot(w); // conjugated in the first argument
            w -= H(i, it - 1) * Q[i];
        }
        H(it, it - 1) = w.norm();
        Q.push_back(std::abs(H(it, it - 1)) > 1e-300 ? ComplexVector(w / H(it, it - 1))
                                                     : ComplexVector::Zero(w.size()).eval());
        // small least-squares solve for the current iterate, then the true residual
        Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(it + 1);
        e1(0) = beta;
        Eigen::VectorXcd y = H.topLeftCorner(it + 1, it).colPivHouseholderQr().solve(e1);
        ComplexVector u = ComplexVector::Zero(f.size());
        for (int i = 0; i < it; ++i) u += y(i) * Q[i];
        const double rr = (f - ops.A * u).norm() / nf;
        res.residual_history.push_back(rr);
        res.iterations = it;
        if (rr <= config.stop_rel_residual || it == mmax) {
            res.u = u;
            res.converged = rr <= config.stop_rel_residual;
            return res;
        }
    }
    res.converged = false;
    return res;
}

} // namespace helmtg

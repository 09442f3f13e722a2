#include "helmtg/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

namespace helmtg {

FeSpace FeSpace::build(const StructuredMesh& mesh, int p) {
    if (p < 2 || p > 8 || p % 2 != 0)
        throw std::invalid_argument("build_space: order must be even, 2 <= p <= 8 "
                                    "(coarsening requires p/2 integral)");
    return build_any(mesh, p);
}

FeSpace FeSpace::build_any(const StructuredMesh& mesh, int p) {
    if (p < 1 || p > 8) throw std::invalid_argument("build_any: order must be in [1,8]");
    FeSpace s;
    s.mesh_ = &mesh;
    s.p_ = p;
    const bool tri = mesh.element_kind() == ElementKind::Triangle;
    const int ne = p - 1;
    const int ni_sq = ne * ne;
    const int ni_tri = (p - 1) * (p - 2) / 2;
    const CellIndex lo = mesh.cell_min(), hi = mesh.cell_max();

    int cnt = 0;
    auto add = [&](std::unordered_map<CellIndex, int, CellIndexHash>& tab, CellIndex c, char kind,
                   int n) {
        if (n == 0) return;
        tab.emplace(c, cnt);
        for (int off = 0; off < n; ++off) s.keys_.push_back({kind, c.x, c.y, off});
        cnt += n;
    };
    for (int y = lo.y; y <= hi.y + 1; ++y) {
        for (int x = lo.x; x <= hi.x + 1; ++x) {
            const CellIndex a{x, y};
            if (mesh.vertex_present(x, y)) add(s.vertex_, a, 'v', 1);
            if (p >= 2 && mesh.hedge_present(x, y)) add(s.hedge_, a, 'h', ne);
            if (p >= 2 && mesh.vedge_present(x, y)) add(s.vedge_, a, 'e', ne);
            if (mesh.has_cell(a)) {
                if (tri) {
                    if (p >= 2) add(s.dedge_, a, 'd', ne);
                    add(s.cell0_, a, 'c', ni_tri);
                    add(s.cell1_, a, 'u', ni_tri);
                } else {
                    add(s.cell0_, a, 'c', ni_sq);
                }
            }
        }
    }
    s.ndof_ = cnt;
    return s;
}

const ReferenceElement& FeSpace::reference(int sub) const {
    if (mesh_->element_kind() == ElementKind::Square) return ReferenceElement::square(p_);
    return sub == 0 ? ReferenceElement::triangle_lower(p_) : ReferenceElement::triangle_upper(p_);
}

std::vector<int> FeSpace::element_dofs(CellIndex c, int sub) const {
    std::vector<int> out;
    const int ne = p_ - 1;
    auto push_range = [&](int base) {
        for (int i = 0; i < ne; ++i) out.push_back(base + i);
    };
    if (mesh_->element_kind() == ElementKind::Square) {
        out.reserve((p_ + 1) * (p_ + 1));
        out.push_back(vertex_dof(c.x, c.y));
        out.push_back(vertex_dof(c.x + 1, c.y));
        out.push_back(vertex_dof(c.x, c.y + 1));
        out.push_back(vertex_dof(c.x + 1, c.y + 1));
        if (p_ >= 2) {
            push_range(hedge_base(c.x, c.y));
            push_range(hedge_base(c.x, c.y + 1));
            push_range(vedge_base(c.x, c.y));
            push_range(vedge_base(c.x + 1, c.y));
            const int ib = interior_base(c.x, c.y, 0);
            for (int i = 0; i < ne * ne; ++i) out.push_back(ib + i);
        }
        return out;
    }
    // triangles: vertex and edge order must match the ReferenceElement layout
    if (sub == 0) { // lower {y<=x}: vertices (0,0),(1,0),(1,1); bottom h, right v, diagonal
        out.push_back(vertex_dof(c.x, c.y));
        out.push_back(vertex_dof(c.x + 1, c.y));
        out.push_back(vertex_dof(c.x + 1, c.y + 1));
        if (p_ >= 2) {
            push_range(hedge_base(c.x, c.y));
            push_range(vedge_base(c.x + 1, c.y));
            push_range(dedge_base(c.x, c.y));
        }
    } else { // upper {y>=x}: vertices (0,0),(1,1),(0,1); top h, left v, diagonal
        out.push_back(vertex_dof(c.x, c.y));
        out.push_back(vertex_dof(c.x + 1, c.y + 1));
        out.push_back(vertex_dof(c.x, c.y + 1));
        if (p_ >= 2) {
            push_range(hedge_base(c.x, c.y + 1));
            push_range(vedge_base(c.x, c.y));
            push_range(dedge_base(c.x, c.y));
        }
    }
    const int ib = interior_base(c.x, c.y, sub);
    const int ni = (p_ - 1) * (p_ - 2) / 2;
    for (int i = 0; i < ni; ++i) out.push_back(ib + i);
    return out;
}

std::vector<int> FeSpace::unit_cell_dofs(CellIndex a) const {
    std::vector<int> out;
    const int ne = p_ - 1;
    out.push_back(vertex_dof(a.x, a.y));
    if (p_ >= 2) {
        for (int i = 0; i < ne; ++i) out.push_back(hedge_base(a.x, a.y) + i);
        for (int i = 0; i < ne; ++i) out.push_back(vedge_base(a.x, a.y) + i);
        if (mesh_->element_kind() == ElementKind::Triangle) {
            for (int i = 0; i < ne; ++i) out.push_back(dedge_base(a.x, a.y) + i);
            const int ni = (p_ - 1) * (p_ - 2) / 2;
            for (int i = 0; i < ni; ++i) out.push_back(interior_base(a.x, a.y, 0) + i);
            for (int i = 0; i < ni; ++i) out.push_back(interior_base(a.x, a.y, 1) + i);
        } else {
            for (int i = 0; i < ne * ne; ++i) out.push_back(interior_base(a.x, a.y, 0) + i);
        }
    }
    return out;
}

std::vector<int> FeSpace::edge_closure_dofs(EdgeKey e) const {
    std::vector<int> out;
    if (e.dir == 'h') {
        out.push_back(vertex_dof(e.x, e.y));
        out.push_back(vertex_dof(e.x + 1, e.y));
        if (p_ >= 2)
            for (int i = 0; i < p_ - 1; ++i) out.push_back(hedge_base(e.x, e.y) + i);
    } else {
        out.push_back(vertex_dof(e.x, e.y));
        out.push_back(vertex_dof(e.x, e.y + 1));
        if (p_ >= 2)
            for (int i = 0; i < p_ - 1; ++i) out.push_back(vedge_base(e.x, e.y) + i);
    }
    return out;
}

std::vector<int> FeSpace::dirichlet_dofs(const BoundaryTags& tags) const {
    std::set<int> dofs;
    for (EdgeKey e : mesh_->boundary_edges()) {
        if (tags.get(e) != BoundaryTag::Dirichlet) continue;
        for (int d : edge_closure_dofs(e)) dofs.insert(d);
    }
    return {dofs.begin(), dofs.end()};
}

int FeSpace::find_dof(const DofKey& k) const {
    const CellIndex c{k.x, k.y};
    int base = -1;
    switch (k.kind) {
        case 'v': return vertex_dof(k.x, k.y);
        case 'h': base = hedge_base(k.x, k.y); break;
        case 'e': base = vedge_base(k.x, k.y); break;
        case 'd': base = dedge_base(k.x, k.y); break;
        case 'c': base = lookup(cell0_, c); break;
        case 'u': base = lookup(cell1_, c); break;
        default: return -1;
    }
    return base < 0 ? -1 : base + k.off;
}

namespace {

void add_block(std::vector<Eigen::Triplet<Complex>>& trips, const std::vector<int>& dofs,
               const Eigen::MatrixXd& re_part, Complex scale) {
    const int n = static_cast<int>(dofs.size());
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) trips.emplace_back(dofs[a], dofs[b], scale * re_part(a, b));
}

} // namespace

SparseComplexMatrix assemble_helmholtz(const FeSpace& space, const CoefficientField& coeffs,
                                       const BoundaryTags& tags, double alpha) {
    const StructuredMesh& mesh = space.mesh();
    if (!tags.complete(mesh)) throw std::invalid_argument("assemble_helmholtz: untagged boundary edge");
    const double h = mesh.spacing();
    std::vector<Eigen::Triplet<Complex>> trips;
    const int nsub = space.n_element_subs();
    for (CellIndex c : mesh.cells()) {
        const double k = coeffs.k(c);
        const Complex m = Complex(k * k, k * k * alpha + coeffs.eps(c)) * h * h;
        for (int sub = 0; sub < nsub; ++sub) {
            const ReferenceElement& ref = space.reference(sub);
            const auto dofs = space.element_dofs(c, sub);
            add_block(trips, dofs, ref.stiffness(), 1.0);
            add_block(trips, dofs, ref.mass(), -m);
        }
    }
    const Eigen::MatrixXd& m1 = edge_mass_1d(space.order());
    for (EdgeKey e : mesh.boundary_edges()) {
        if (tags.get(e) != BoundaryTag::Absorbing) continue;
        const double k = coeffs.k(mesh.cell_adjacent_to_boundary(e));
        add_block(trips, space.edge_closure_dofs(e), m1, Complex(0.0, -k * h));
    }
    SparseComplexMatrix A(space.ndof(), space.ndof());
    A.setFromTriplets(trips.begin(), trips.end());
    eliminate_dirichlet(A, space.dirichlet_dofs(tags));
    A.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex(0, 0); });
    A.makeCompressed();
    return A;
}

SparseComplexMatrix assemble_mass_weighted(const FeSpace& space,
                                           const std::function<Complex(CellIndex)>& weight) {
    const StructuredMesh& mesh = space.mesh();
    const double h2 = mesh.spacing() * mesh.spacing();
    std::vector<Eigen::Triplet<Complex>> trips;
    for (CellIndex c : mesh.cells()) {
        const Complex w = weight(c) * h2;
        if (w == Complex(0, 0)) continue;
        for (int sub = 0; sub < space.n_element_subs(); ++sub)
            add_block(trips, space.element_dofs(c, sub), space.reference(sub).mass(), w);
    }
    SparseComplexMatrix M(space.ndof(), space.ndof());
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();
    return M;
}

SparseComplexMatrix boundary_mass(const FeSpace& space, const CoefficientField& coeffs,
                                  const BoundaryTags& tags) {
    const StructuredMesh& mesh = space.mesh();
    const double h = mesh.spacing();
    const Eigen::MatrixXd& m1 = edge_mass_1d(space.order());
    std::vector<Eigen::Triplet<Complex>> trips;
    for (EdgeKey e : mesh.boundary_edges()) {
        if (tags.get(e) != BoundaryTag::Absorbing) continue;
        const double k = coeffs.k(mesh.cell_adjacent_to_boundary(e));
        add_block(trips, space.edge_closure_dofs(e), m1, Complex(0.0, k * h));
    }
    SparseComplexMatrix B(space.ndof(), space.ndof());
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    return B;
}

void eliminate_dirichlet(SparseComplexMatrix& A, const std::vector<int>& dofs) {
    if (dofs.empty()) return;
    std::vector<char> mask(A.rows(), 0);
    for (int d : dofs) mask[d] = 1;
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseComplexMatrix::InnerIterator it(A, k); it; ++it) {
            if (mask[it.row()] || mask[it.col()])
                it.valueRef() = (it.row() == it.col()) ? Complex(1, 0) : Complex(0, 0);
        }
    }
    // ensure unit diagonal exists even if the pattern lacked it
    for (int d : dofs) A.coeffRef(d, d) = Complex(1, 0);
}

const StageInterp& stage_interp(int p, ElementKind kind, int sub, int q) {
    static std::mutex m;
    static std::map<std::tuple<int, int, int, int>, StageInterp> cache;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_tuple(p, static_cast<int>(kind), sub, q);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (q < 1 || q > p) throw std::invalid_argument("stage_interp: need 1 <= q <= p");

    const ReferenceElement& ref =
        kind == ElementKind::Square
            ? ReferenceElement::square(p)
            : (sub == 0 ? ReferenceElement::triangle_lower(p) : ReferenceElement::triangle_upper(p));
    const int n = ref.n_dofs();
    const bool tri = kind == ElementKind::Triangle;

    // stage points and the stage structure
    StageInterp si;
    std::vector<std::array<double, 2>> verts;
    std::vector<std::array<std::array<double, 2>, 2>> edges; // (A,B) endpoint pairs, oriented
    if (!tri) {
        verts = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
        edges = {{{{0, 0}, {1, 0}}}, {{{0, 1}, {1, 1}}}, {{{0, 0}, {0, 1}}}, {{{1, 0}, {1, 1}}}};
    } else if (sub == 0) {
        verts = {{0, 0}, {1, 0}, {1, 1}};
        edges = {{{{0, 0}, {1, 0}}}, {{{1, 0}, {1, 1}}}, {{{0, 0}, {1, 1}}}};
    } else {
        verts = {{0, 0}, {1, 1}, {0, 1}};
        edges = {{{{0, 1}, {1, 1}}}, {{{0, 0}, {0, 1}}}, {{{0, 0}, {1, 1}}}};
    }
    std::vector<std::array<double, 2>>& pts = si.points;
    for (auto v : verts) pts.push_back(v);
    for (auto [A, B] : edges)
        for (int a = 1; a < q; ++a)
            pts.push_back({A[0] + (B[0] - A[0]) * a / q, A[1] + (B[1] - A[1]) * a / q});
    std::vector<std::array<double, 2>> int_pts;
    if (!tri) {
        for (int bx = 1; bx < q; ++bx)
            for (int by = 1; by < q; ++by) int_pts.push_back({double(bx) / q, double(by) / q});
    } else if (sub == 0) {
        for (int a = 1; a < q; ++a)
            for (int b = 1; b < a; ++b) int_pts.push_back({double(a) / q, double(b) / q});
    } else {
        for (int a = 1; a < q; ++a)
            for (int b = a + 1; b < q; ++b) int_pts.push_back({double(a) / q, double(b) / q});
    }
    for (auto ipt : int_pts) pts.push_back(ipt);
    const int npts = static_cast<int>(pts.size());

    // local dof indices per stage (degree <= q subset)
    const int nv = static_cast<int>(verts.size());
    const int ne_all = p - 1, ne_q = q - 1;
    std::vector<std::vector<int>> edge_rows(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
        for (int d = 2; d <= q; ++d) edge_rows[e].push_back(nv + static_cast<int>(e) * ne_all + (d - 2));
    std::vector<int> int_rows;
    const int ib = nv + static_cast<int>(edges.size()) * ne_all;
    if (!tri) {
        for (int dx = 2; dx <= q; ++dx)
            for (int dy = 2; dy <= q; ++dy) int_rows.push_back(ib + (dx - 2) * ne_all + (dy - 2));
    } else {
        // bubbles are enumerated degree-major, so degrees <= q form a prefix
        const int nb_q = (q - 1) * (q - 2) / 2;
        for (int i = 0; i < nb_q; ++i) int_rows.push_back(ib + i);
    }
    if (static_cast<int>(int_pts.size()) != static_cast<int>(int_rows.size()))
        throw std::logic_error("stage_interp: interior point/function count mismatch");

    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, npts);
    Eigen::VectorXd vals(n);
    Eigen::MatrixX2d grads(n, 2);
    auto residual_at = [&](const std::array<double, 2>& xy) -> Eigen::RowVectorXd {
        ref.eval(xy[0], xy[1], vals, grads);
        Eigen::RowVectorXd r = -vals.transpose() * E; // minus current interpolant at xy
        return r;
    };
    // stage 1: vertices
    for (int v = 0; v < nv; ++v) E(v, v) = 1.0;
    // stage 2: edges, lowest q-1 hierarchical coefficients from the q-lattice points
    int pt = nv;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (ne_q == 0) break;
        Eigen::MatrixXd B(ne_q, ne_q);
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(ne_q, npts);
        for (int a = 0; a < ne_q; ++a) {
            const auto& xy = pts[pt + a];
            ref.eval(xy[0], xy[1], vals, grads);
            for (int d = 0; d < ne_q; ++d) B(a, d) = vals(edge_rows[e][d]);
            R.row(a) = residual_at(xy);
            R(a, pt + a) += 1.0;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        if (lu.rcond() < 1e-12)
            throw std::runtime_error("stage_interp: singular edge interpolation system");
        Eigen::MatrixXd X = lu.solve(R);
        for (int d = 0; d < ne_q; ++d) E.row(edge_rows[e][d]) = X.row(d);
        pt += ne_q;
    }
    // stage 3: interior
    const int nint = static_cast<int>(int_rows.size());
    if (nint > 0) {
        Eigen::MatrixXd B(nint, nint);
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nint, npts);
        for (int a = 0; a < nint; ++a) {
            const auto& xy = pts[pt + a];
            ref.eval(xy[0], xy[1], vals, grads);
            for (int d = 0; d < nint; ++d) B(a, d) = vals(int_rows[d]);
            R.row(a) = residual_at(xy);
            R(a, pt + a) += 1.0;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        if (lu.rcond() < 1e-12)
            throw std::runtime_error("stage_interp: singular interior interpolation system");
        Eigen::MatrixXd X = lu.solve(R);
        for (int d = 0; d < nint; ++d) E.row(int_rows[d]) = X.row(d);
    }
    si.E = std::move(E);
    return cache.emplace(key, std::move(si)).first->second;
}

ComplexVector interpolate(const FeSpace& space, const std::function<Complex(double, double)>& f,
                          int degree) {
    const StructuredMesh& mesh = space.mesh();
    const int q = degree < 0 ? space.order() : degree;
    const double h = mesh.spacing();
    ComplexVector u = ComplexVector::Zero(space.ndof());
    std::vector<char> written(space.ndof(), 0);
    for (CellIndex c : mesh.cells()) {
        for (int sub = 0; sub < space.n_element_subs(); ++sub) {
            const StageInterp& si = stage_interp(space.order(), mesh.element_kind(), sub, q);
            ComplexVector vals(si.points.size());
            for (std::size_t i = 0; i < si.points.size(); ++i)
                vals(i) = f((c.x + si.points[i][0]) * h, (c.y + si.points[i][1]) * h);
            ComplexVector loc = si.E.cast<Complex>() * vals;
            const auto dofs = space.element_dofs(c, sub);
            for (std::size_t i = 0; i < dofs.size(); ++i) {
                if (!written[dofs[i]]) {
                    u(dofs[i]) = loc(i);
                    written[dofs[i]] = 1;
                }
            }
        }
    }
    return u;
}

Complex evaluate(const FeSpace& space, const ComplexVector& u, double x, double y) {
    const StructuredMesh& mesh = space.mesh();
    const double h = mesh.spacing();
    const CellIndex lo = mesh.cell_min(), hi = mesh.cell_max();
    int cx = std::clamp(static_cast<int>(std::floor(x / h)), lo.x, hi.x);
    int cy = std::clamp(static_cast<int>(std::floor(y / h)), lo.y, hi.y);
    if (!mesh.has_cell(cx, cy)) throw std::invalid_argument("evaluate: point outside domain");
    const double rx = x / h - cx, ry = y / h - cy;
    int sub = 0;
    if (mesh.element_kind() == ElementKind::Triangle && ry > rx) sub = 1;
    const ReferenceElement& ref = space.reference(sub);
    Eigen::VectorXd vals;
    Eigen::MatrixX2d grads;
    ref.eval(rx, ry, vals, grads);
    const auto dofs = space.element_dofs({cx, cy}, sub);
    Complex out = 0.0;
    for (std::size_t i = 0; i < dofs.size(); ++i) out += u(dofs[i]) * vals(i);
    return out;
}

} // namespace helmtg

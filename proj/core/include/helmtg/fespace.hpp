#ifndef HELMTG_FESPACE_HPP
#define HELMTG_FESPACE_HPP

#include <functional>
#include <optional>

#include "helmtg/basis.hpp"
#include "helmtg/linalg.hpp"
#include "helmtg/mesh.hpp"

namespace helmtg {

/// Order-p continuous Galerkin space on a structured mesh with the hierarchical
/// basis of basis.hpp. Dof numbering is deterministic: lattice coordinates in
/// (y, x) order, and per coordinate the owned entities in hierarchy order
/// (vertex, h-edge, v-edge, diagonal edge, cell interiors). Basis functions are
/// translates of the unit-cell functions, which lfa2d relies on.
class FeSpace {
  public:
    /// Orders accepted by the solver: even p in {2,4,6,8}.
    static FeSpace build(const StructuredMesh& mesh, int p);
    /// Any order 1..8. Used for the p=1 reference space (QSFEM mass/boundary
    /// terms, stencil tests) and for order-p/2 Galerkin coarse spaces.
    static FeSpace build_any(const StructuredMesh& mesh, int p);

    const StructuredMesh& mesh() const { return *mesh_; }
    int order() const { return p_; }
    int ndof() const { return ndof_; }

    int vertex_dof(int x, int y) const { return lookup(vertex_, {x, y}); }
    int hedge_base(int x, int y) const { return lookup(hedge_, {x, y}); }
    int vedge_base(int x, int y) const { return lookup(vedge_, {x, y}); }
    int dedge_base(int x, int y) const { return lookup(dedge_, {x, y}); }
    int interior_base(int x, int y, int sub) const {
        return lookup(sub == 0 ? cell0_ : cell1_, {x, y});
    }

    int n_element_subs() const { return mesh_->element_kind() == ElementKind::Triangle ? 2 : 1; }
    /// Global dofs of one element in the canonical ReferenceElement order.
    std::vector<int> element_dofs(CellIndex c, int sub = 0) const;
    const ReferenceElement& reference(int sub = 0) const;

    /// Dofs owned by unit cell alpha (its vertex, lower/left edges, interiors);
    /// p^2 of them for interior cells of either element kind.
    std::vector<int> unit_cell_dofs(CellIndex alpha) const;

    /// Closure dofs of a lattice edge: [endpoint vertices, then edge dofs],
    /// matching the 1-D trace basis order of edge_mass_1d.
    std::vector<int> edge_closure_dofs(EdgeKey e) const;

    /// Dofs constrained by Dirichlet boundary edges (edge dofs + endpoint vertices).
    std::vector<int> dirichlet_dofs(const BoundaryTags& tags) const;

    struct DofKey {
        char kind; // 'v','h','e','d','c' (lower/square interior),'u' (upper interior)
        int x, y, off;
    };
    const std::vector<DofKey>& dof_keys() const { return keys_; }
    int find_dof(const DofKey& k) const;

  private:
    const StructuredMesh* mesh_ = nullptr;
    int p_ = 1;
    int ndof_ = 0;
    std::unordered_map<CellIndex, int, CellIndexHash> vertex_, hedge_, vedge_, dedge_, cell0_, cell1_;
    std::vector<DofKey> keys_;

    static int lookup(const std::unordered_map<CellIndex, int, CellIndexHash>& m, CellIndex c) {
        auto it = m.find(c);
        return it == m.end() ? -1 : it->second;
    }
};

/// A_ij = int grad phi_i . grad phi_j - int (k^2 (1+i alpha) + i eps) phi_i phi_j
///        - int_{Gamma_abs} i k phi_i phi_j, with Dirichlet rows/columns
/// replaced by identity. alpha = 0 gives the primal operator, alpha = alpha_s
/// the complex-shifted one.
SparseComplexMatrix assemble_helmholtz(const FeSpace& space, const CoefficientField& coeffs,
                                       const BoundaryTags& tags, double alpha);

/// Galerkin mass matrix with a cell-wise complex weight (no boundary, no Dirichlet).
SparseComplexMatrix assemble_mass_weighted(const FeSpace& space,
                                           const std::function<Complex(CellIndex)>& weight);

/// 1-D mass matrices on the absorbing edges, weighted by i k of the adjacent
/// cell. Zero matrix when Gamma_abs is empty.
SparseComplexMatrix boundary_mass(const FeSpace& space, const CoefficientField& coeffs,
                                  const BoundaryTags& tags);

/// Zero rows/columns of the listed dofs and put 1 on their diagonal.
void eliminate_dirichlet(SparseComplexMatrix& A, const std::vector<int>& dofs);

/// Hierarchical interpolation of point data: vertex values first, then edge
/// coefficients fitted at edge points, then interior coefficients. With
/// degree = p this interpolates f exactly for polynomials of degree <= p.
/// With degree q < p only hierarchical functions of degree <= q are used and
/// the fit points are the q-refined lattice (the coarse vertices of twogrid).
ComplexVector interpolate(const FeSpace& space,
                          const std::function<Complex(double, double)>& f, int degree = -1);

/// Point evaluation of a finite-element function.
Complex evaluate(const FeSpace& space, const ComplexVector& u, double x, double y);

/// Local staged-interpolation operator on the reference element: coefficients
/// of the degree <= q hierarchical subset from values at the q-lattice points.
/// Rows are local dofs (canonical order, all of them; rows of degree > q are
/// zero), columns the stage points in canonical order.
struct StageInterp {
    Eigen::MatrixXd E;
    /// stage points in reference coordinates
    std::vector<std::array<double, 2>> points;
};
const StageInterp& stage_interp(int p, ElementKind kind, int sub, int q);

} // namespace helmtg

#endif

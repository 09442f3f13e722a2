#ifndef HELMTG_TWOGRID_HPP
#define HELMTG_TWOGRID_HPP

#include <memory>
#include <optional>

#include "helmtg/fespace.hpp"
#include "helmtg/linalg.hpp"
#include "helmtg/mesh.hpp"
#include "helmtg/qsfem.hpp"

namespace helmtg {

enum class CoarseKind { OptimizedFD, GalerkinP, None };
enum class OuterKind { Richardson, KrylovAccelerated };
enum class SmootherKind { CSDD, ExactShifted };

struct SolverConfig {
    double alpha_s = 0.2;  // smoother complex shift
    double alpha_c = 0.0;  // Galerkin coarse shift
    int n_s = 1;           // pre/post smooth steps
    int n_dd = 1;          // domain-decomposition iterations per smoother step
    double omega_c = 1.0;  // coarse-correction relaxation
    int l_dd = 4;          // subdomain size in cells
    CoarseKind coarsening = CoarseKind::OptimizedFD;
    SmootherKind smoother = SmootherKind::CSDD;
    OuterKind outer = OuterKind::Richardson;
    double stop_rel_residual = 1e-6;
    int max_iters = 200;
};

/// Non-overlapping l_dd x l_dd cell blocks U_i (edge blocks absorb the
/// remainder), each grown by one layer of edge-or-vertex neighbors to the
/// overlapping subdomain Omega_i. Subdomain matrices use absorbing conditions
/// on internal boundaries and inherit the boundary conditions of the original
/// domain elsewhere.
class DomainDecomposition {
  public:
    struct Subdomain {
        std::vector<CellIndex> u_cells, omega_cells;
        std::vector<int> global_dofs;          // global dof per local Omega dof
        std::vector<int> u_members;            // local indices in Dofs(U_i)
        std::optional<SparseFactorization> factor;
    };

    std::vector<Subdomain> subdomains;
    Eigen::VectorXd multiplicity; // L_j over global dofs

    std::size_t size() const { return subdomains.size(); }
};

DomainDecomposition partition(const StructuredMesh& mesh, const FeSpace& space, int l_dd);

/// Assemble and factorize the shifted subdomain operators A_s^(i).
void build_subdomain_operators(const FeSpace& space, const CoefficientField& coeffs,
                               const BoundaryTags& tags, double alpha_s, DomainDecomposition& dd);

/// One additive step: w_i = R_i u + (A_s^(i))^{-1} R_i (f - A_s u), combined by
/// the multiplicity average over Dofs(U_i).
ComplexVector dd_step(const ComplexVector& u, const ComplexVector& f,
                      const SparseComplexMatrix& As, const DomainDecomposition& dd);

/// r <- f - A u; v <- 0; n_dd DD steps on A_s v = r; u <- u + v.
void csdd_smoother(ComplexVector& u, const ComplexVector& f, const SparseComplexMatrix& A,
                   const SparseComplexMatrix& As, const DomainDecomposition& dd, int n_dd);

/// Square coarse mesh with spacing 2h/p over the same domain.
StructuredMesh coarse_mesh_for(const FeSpace& space);

/// Coefficients and tags inherited by the coarse mesh (cells nest p/2 per direction).
CoefficientField coarsen_coefficients(const CoefficientField& fine, int m);
BoundaryTags coarsen_tags(const StructuredMesh& coarse, const BoundaryTags& fine_tags, int m);

/// Interpolation prolongation onto the order-p hierarchical space: vertex dofs
/// from coincident coarse values, then per edge the lowest p/2-1 hierarchical
/// coefficients, then cell interiors; piecewise polynomial of degree p/2 per
/// fine cell. Entries are real; rows of fine Dirichlet dofs and columns of
/// coarse Dirichlet dofs are zero.
SparseComplexMatrix build_prolongation(const FeSpace& fine, const FeSpace& coarse_p1,
                                       const std::vector<int>& fine_dirichlet,
                                       const std::vector<int>& coarse_dirichlet);

struct GalerkinCoarse {
    std::unique_ptr<FeSpace> space; // order p/2 on the same mesh
    SparseComplexMatrix Ac;
    SparseComplexMatrix IP; // 0/1 inclusion of the shared hierarchical dofs
};
GalerkinCoarse galerkin_p_coarse(const FeSpace& space, const CoefficientField& coeffs,
                                 const BoundaryTags& tags, double alpha_c);

/// Everything the two-grid iteration needs, factorizations included.
struct TwoGridOperators {
    const FeSpace* space = nullptr;
    SparseComplexMatrix A;  // primal operator
    SparseComplexMatrix As; // shifted operator (smoother)
    SmootherKind smoother_kind = SmootherKind::CSDD;
    std::optional<DomainDecomposition> dd;
    std::optional<SparseFactorization> As_factor; // ExactShifted mode

    CoarseKind coarsening = CoarseKind::OptimizedFD;
    std::unique_ptr<StructuredMesh> coarse_mesh; // OptimizedFD
    std::unique_ptr<FeSpace> coarse_space;
    SparseComplexMatrix Ac, IP;
    std::optional<SparseFactorization> Ac_factor;
};

TwoGridOperators setup_two_grid(const FeSpace& space, const CoefficientField& coeffs,
                                const BoundaryTags& tags, const SolverConfig& config);

/// Algorithm: n_s smooths, coarse correction r_c = IP^* (f - A u),
/// u += omega_c IP Ac^{-1} r_c, n_s smooths.
void two_grid_step(ComplexVector& u, const ComplexVector& f, const TwoGridOperators& ops,
                   const SolverConfig& config);

struct SolveResult {
    ComplexVector u;
    int iterations = 0;
    std::vector<double> residual_history; // relative residuals, one per iteration
    bool converged = true;
};

/// Richardson iteration of two_grid_step from u = 0, or GMRES with one
/// TwoGridStep from zero initial guess as left preconditioner. Stops on
/// ||f - A u|| / ||f|| <= stop_rel_residual.
SolveResult solve(const ComplexVector& f, const TwoGridOperators& ops, const SolverConfig& config);

} // namespace helmtg

#endif

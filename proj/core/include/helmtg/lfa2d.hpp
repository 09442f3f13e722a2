#ifndef HELMTG_LFA2D_HPP
#define HELMTG_LFA2D_HPP

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "helmtg/fespace.hpp"
#include "helmtg/linalg.hpp"
#include "helmtg/twogrid.hpp"

namespace helmtg {
namespace lfa2d {

/// Window-1 (or wider) grid of unit-cell blocks P_{0,beta} of a translation-
/// invariant operator, indexed by the lattice offset beta.
class BlockToeplitzView {
  public:
    BlockToeplitzView(int window, int rows, int cols)
        : window_(window), rows_(rows), cols_(cols),
          blocks_((2 * window + 1) * (2 * window + 1), DenseComplexMatrix::Zero(rows, cols)) {}

    int window() const { return window_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    DenseComplexMatrix& block(int bx, int by) { return blocks_[index(bx, by)]; }
    const DenseComplexMatrix& block(int bx, int by) const { return blocks_[index(bx, by)]; }

    /// sigma(P)(theta) = sum_beta e^{i theta . beta} P_{0,beta}
    DenseComplexMatrix symbol(double t1, double t2) const;
    void symbol_into(double t1, double t2, DenseComplexMatrix& out) const;

  private:
    int index(int bx, int by) const { return (by + window_) * (2 * window_ + 1) + (bx + window_); }
    int window_, rows_, cols_;
    std::vector<DenseComplexMatrix> blocks_;
};

/// Read the unit-cell blocks of an assembled operator at an interior anchor.
/// row_cells/col_cells map a lattice coordinate to the dof list of its unit
/// cell. Verifies translation invariance against a second anchor (1e-12) and,
/// when check_decay is set, that blocks just outside the window vanish.
BlockToeplitzView extract_blocks(const SparseComplexMatrix& A,
                                 const std::function<std::vector<int>(CellIndex)>& row_cells,
                                 const std::function<std::vector<int>(CellIndex)>& col_cells,
                                 CellIndex anchor, CellIndex anchor2, int window,
                                 bool check_decay = true);

DenseComplexMatrix inverse_symbol(const DenseComplexMatrix& S);

enum class Coarsening { OptimizedFD, GalerkinP };

struct LfaConfig {
    int p = 4;
    ElementKind kind = ElementKind::Square;
    double ppw = 10.0;
    double D = 0.01;
    double alpha_s = 0.2;
    Coarsening coarsening = Coarsening::OptimizedFD;
    double alpha_c = 0.0;
    int n_s = 1;
    double omega_c = 1.0;
};

/// The five two-grid operators on an all-Neumann interior patch, reduced to
/// unit-cell block form; k h = 2 pi p / ppw with h = 1.
class LfaOperators {
  public:
    explicit LfaOperators(const LfaConfig& cfg);

    const LfaConfig& config() const { return cfg_; }
    double kh() const { return kh_; }
    int fine_dim() const { return A_->rows(); }      // p^2
    int coarse_dim() const { return Ac_->rows(); }   // (p/2)^2

    DenseComplexMatrix symbol_A(double t1, double t2) const { return A_->symbol(t1, t2); }
    DenseComplexMatrix symbol_As(double t1, double t2) const { return As_->symbol(t1, t2); }
    DenseComplexMatrix symbol_Ac(double t1, double t2) const { return Ac_->symbol(t1, t2); }
    DenseComplexMatrix symbol_IP(double t1, double t2) const { return IP_->symbol(t1, t2); }

    /// eps = 0 variants, used for dispersion-curve location.
    DenseComplexMatrix symbol_A0(double t1, double t2) const { return A0_->symbol(t1, t2); }
    DenseComplexMatrix symbol_Ac0(double t1, double t2) const { return Ac0_->symbol(t1, t2); }

    const BlockToeplitzView& view_A() const { return *A_; }
    const BlockToeplitzView& view_As() const { return *As_; }
    const BlockToeplitzView& view_Ac() const { return *Ac_; }
    const BlockToeplitzView& view_IP() const { return *IP_; }

    /// Two-grid error-propagation symbol S^{n_s} K S^{n_s} at theta; n_s and
    /// omega_c may override the config (for parameter sweeps).
    DenseComplexMatrix two_grid_symbol(double t1, double t2, int n_s, double omega_c) const;
    DenseComplexMatrix two_grid_symbol(double t1, double t2) const {
        return two_grid_symbol(t1, t2, cfg_.n_s, cfg_.omega_c);
    }

  private:
    LfaConfig cfg_;
    double kh_;
    std::unique_ptr<BlockToeplitzView> A_, As_, Ac_, IP_, A0_, Ac0_;
};

struct RateResult {
    double rho = 0.0;
    std::array<double, 2> theta_max{0, 0};
    /// per-theta table of the sampled sup (uniform grid only)
    std::vector<std::array<double, 3>> table; // theta1, theta2, rho
    int skipped = 0;                          // near-singular coarse symbols perturbed
};

struct ThetaGrid {
    int uniform = 64;    // uniform points per direction on [-pi, pi)
    int annulus = 512;   // samples on ||theta|| in [0.8, 1.2] kh
    bool refine = true;  // resonance-circle radial refinement (needle search)
    int refine_angles = 96;
    bool keep_table = false;
};

/// sup over the theta samples of the spectral radius of the two-grid symbol.
RateResult two_grid_rate(const LfaOperators& ops, const ThetaGrid& grid, int n_s, double omega_c);
inline RateResult two_grid_rate(const LfaOperators& ops, const ThetaGrid& grid = {}) {
    return two_grid_rate(ops, grid, ops.config().n_s, ops.config().omega_c);
}

struct SweepRow {
    int order;
    double ppw;
    Coarsening coarsening;
    int n_s;
    double omega_c;
    double rho;
    double theta1_max, theta2_max;
};
std::vector<SweepRow> parameter_sweep(const std::vector<int>& orders,
                                      const std::vector<double>& ppws,
                                      const std::vector<Coarsening>& coarsenings,
                                      const std::vector<int>& n_s_list,
                                      const std::vector<double>& omega_c_list, ElementKind kind,
                                      double D, double alpha_s, double alpha_c,
                                      const ThetaGrid& grid = {});

} // namespace lfa2d
} // namespace helmtg

#endif

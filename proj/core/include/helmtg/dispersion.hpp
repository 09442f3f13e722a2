#ifndef HELMTG_DISPERSION_HPP
#define HELMTG_DISPERSION_HPP

#include <array>
#include <optional>

#include "helmtg/lfa2d.hpp"
#include "helmtg/qsfem.hpp"

namespace helmtg {
namespace dispersion {

enum class Scheme { FiniteElement, Qsfem };

/// A discretization at a resolution given in dofs per wavelength; dispersion is
/// always computed at eps = 0.
struct DispersionQuery {
    Scheme scheme = Scheme::FiniteElement;
    int order = 4; // FE order; QSFEM behaves like order 1
    ElementKind kind = ElementKind::Square;
    double ppw = 10.0;
    double k = 1.0;
    int n_directions = 360;

    double h() const; // lattice spacing from ppw
    int folding_order() const { return scheme == Scheme::Qsfem ? 1 : order; }
};

struct PropagatingMode {
    std::array<double, 2> theta; // in [-pi, pi)^2
    std::array<double, 2> xi;    // identified physical wave vector
    double error;                // | ||xi|| / k - 1 |
    bool found = true;           // false: no zero in the search bracket
};

/// eps = 0 Bloch symbol of the discretization; Hermitian, so the smallest-
/// magnitude eigenvalue is real.
class SymbolProvider {
  public:
    explicit SymbolProvider(const DispersionQuery& q);
    int dim() const { return fe_ ? fe_->rows() : 1; }
    DenseComplexMatrix symbol(double t1, double t2) const;
    void symbol_into(double t1, double t2, DenseComplexMatrix& out) const;
    /// smallest eigenvalue in absolute value
    double lambda_min(double t1, double t2) const;

  private:
    DispersionQuery q_;
    std::optional<lfa2d::BlockToeplitzView> fe_;
    std::optional<qsfem::QsfemStencil> stencil_;
    double hc_ = 1.0;
};

Complex smallest_eigenvalue(const DenseComplexMatrix& S);

/// Two-phase zero search: radial secant/bisection sweeps from the (folded)
/// true circle in n_directions directions over [0, pi/2], plus dense local
/// sampling in discs of radius 0.2 around fold self-intersection points when
/// k h > pi. Directions without a zero in the bracket are recorded as
/// non-propagating with the worst-case bracket error.
std::vector<PropagatingMode> find_zero_curve(const DispersionQuery& q);

/// xi = (theta + 2 pi alpha)/h over alpha in [-order/2-1, order/2+1]^2 with
/// xi constrained to [-order pi/h, order pi/h]^2, dispersion-error minimizing;
/// ties broken by lexicographically smallest alpha.
std::array<double, 2> identify_wave_vector(const std::array<double, 2>& theta_star,
                                           const DispersionQuery& q);

double max_dispersion_error(const DispersionQuery& q);

struct DeltaR {
    std::vector<double> delta; // per direction, (||xi_c|| - ||xi_f||)/k
    double R = 0.0;            // 2 pi max|delta| / D
};
/// Coarse-minus-fine propagating-wavenumber mismatch per direction, paired by
/// the radial zeros nearest the true circle.
DeltaR delta_and_R(const DispersionQuery& fine, const DispersionQuery& coarse, double D);

} // namespace dispersion
} // namespace helmtg

#endif

#ifndef HELMTG_BASIS_HPP
#define HELMTG_BASIS_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "helmtg/mesh.hpp"

namespace helmtg {

/// Monomial coefficient table, lowest degree first; evaluated by Horner.
using Poly = Eigen::VectorXd;

double poly_eval(const Poly& c, double x);
Poly poly_derivative(const Poly& c);

/// Legendre P_n on [-1,1] as a monomial table.
Poly legendre_poly(int n);

/// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

/// 1-D hierarchical basis on [0,1]: N_0 = 1-x, N_1 = x, and for d >= 2 the
/// integrated-Legendre functions (P_d - P_{d-2})(2x-1)/sqrt(2(2d-1)), which
/// vanish at both endpoints. Index d is the polynomial degree for d >= 2.
std::vector<Poly> hierarchical_basis_1d(int p);

struct Quadrature2d {
    std::vector<double> x, y, w;
};

/// Tensor Gauss rule on the unit square, n points per direction.
Quadrature2d square_quadrature(int n);

/// Duffy-type tensor rule on a triangle with vertices a, b, c; exact for total
/// degree <= 2p with (p+1) x (p+2) points.
Quadrature2d triangle_quadrature(int p, const std::array<double, 2>& a,
                                 const std::array<double, 2>& b, const std::array<double, 2>& c);

/// Shape functions of one reference element on the unit square [0,1]^2 (whole
/// square for Q_p, or one of the two triangles of the split). Local ordering is
/// canonical: vertices, then edges by entity (p-1 functions each, ascending
/// degree), then interior functions.
class ReferenceElement {
  public:
    static const ReferenceElement& square(int p);
    static const ReferenceElement& triangle_lower(int p); // {(x,y): 0<=y<=x<=1}
    static const ReferenceElement& triangle_upper(int p); // {(x,y): 0<=x<=y<=1}

    int order() const { return p_; }
    int n_dofs() const { return n_; }
    int n_interior() const { return n_int_; }

    /// values[i] and gradients[i] of every shape function at (x,y)
    void eval(double x, double y, Eigen::VectorXd& values, Eigen::MatrixX2d& gradients) const;

    /// element stiffness (unit cell, scale-free in 2-D) and mass (times h^2 on an h-cell)
    const Eigen::MatrixXd& stiffness() const { return K_; }
    const Eigen::MatrixXd& mass() const { return M_; }

  private:
    ReferenceElement(int p, int shape); // shape: 0 square, 1 lower tri, 2 upper tri
    static const ReferenceElement& cached(int p, int shape);
    int p_, shape_, n_, n_int_;
    // square: tensor index pairs into the 1-D basis
    std::vector<std::array<int, 2>> tensor_;
    std::vector<Poly> b1d_, b1d_der_;
    // triangle data
    Eigen::Matrix3d bary_coef_;                       // lam_i = c0 + c1 x + c2 y per column
    std::vector<std::array<int, 2>> edge_pairs_;      // local vertex pairs, global orientation
    std::vector<Poly> kernels_, kernels_der_;         // K_d for d = 2..p
    std::vector<std::array<int, 2>> bubbles_;         // (i,j) Legendre indices, degree-major
    std::vector<Poly> leg_, leg_der_;
    Eigen::MatrixXd K_, M_;
};

/// 1-D mass matrix of the hierarchical trace basis [N_0, N_1, N_2..N_p] on [0,1].
const Eigen::MatrixXd& edge_mass_1d(int p);

} // namespace helmtg

#endif

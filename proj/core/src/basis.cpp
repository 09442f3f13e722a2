#include "helmtg/basis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace helmtg {

double poly_eval(const Poly& c, double x) {
    double v = 0.0;
    for (Eigen::Index i = c.size() - 1; i >= 0; --i) v = v * x + c(i);
    return v;
}

Poly poly_derivative(const Poly& c) {
    if (c.size() <= 1) return Poly::Zero(1);
    Poly d(c.size() - 1);
    for (Eigen::Index i = 1; i < c.size(); ++i) d(i - 1) = c(i) * static_cast<double>(i);
    return d;
}

Poly legendre_poly(int n) {
    // (m+1) P_{m+1} = (2m+1) x P_m - m P_{m-1}
    Poly pm = Poly::Zero(1);
    pm(0) = 1.0;
    if (n == 0) return pm;
    Poly pc = Poly::Zero(2);
    pc(1) = 1.0;
    for (int m = 1; m < n; ++m) {
        Poly pn = Poly::Zero(m + 2);
        for (Eigen::Index i = 0; i < pc.size(); ++i) pn(i + 1) += (2.0 * m + 1.0) * pc(i);
        for (Eigen::Index i = 0; i < pm.size(); ++i) pn(i) -= static_cast<double>(m) * pm(i);
        pn /= (m + 1.0);
        pm = pc;
        pc = pn;
    }
    return pc;
}

namespace {

// compose a poly in s with s = 2x - 1
Poly to_unit_interval(const Poly& ps) {
    Poly out = Poly::Zero(ps.size());
    Poly pow = Poly::Zero(1);
    pow(0) = 1.0; // (2x-1)^0
    for (Eigen::Index d = 0; d < ps.size(); ++d) {
        for (Eigen::Index i = 0; i < pow.size(); ++i) out(i) += ps(d) * pow(i);
        if (d + 1 < ps.size()) {
            Poly next = Poly::Zero(pow.size() + 1);
            for (Eigen::Index i = 0; i < pow.size(); ++i) {
                next(i + 1) += 2.0 * pow(i);
                next(i) -= pow(i);
            }
            pow = next;
        }
    }
    return out;
}

} // namespace

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    // Newton on P_n over [-1,1], then map to [0,1]
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            // evaluate P_n and P'_n by recurrence
            double pm = 1.0, pc = t;
            if (n == 0) pc = 1.0;
            for (int m = 1; m < n; ++m) {
                double pn = ((2.0 * m + 1.0) * t * pc - m * pm) / (m + 1.0);
                pm = pc;
                pc = pn;
            }
            double dp = n * (t * pc - pm) / (t * t - 1.0);
            double dt = pc / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - t); // roots come out descending; order is irrelevant
        // weight: 2 / ((1 - t^2) P'_n(t)^2), halved for [0,1]
        double pm = 1.0, pc = t;
        for (int m = 1; m < n; ++m) {
            double pn = ((2.0 * m + 1.0) * t * pc - m * pm) / (m + 1.0);
            pm = pc;
            pc = pn;
        }
        double dp = n * (t * pc - pm) / (t * t - 1.0);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
}

std::vector<Poly> hierarchical_basis_1d(int p) {
    std::vector<Poly> funs;
    Poly n0 = Poly::Zero(2), n1 = Poly::Zero(2);
    n0(0) = 1.0;
    n0(1) = -1.0;
    n1(1) = 1.0;
    funs.push_back(n0);
    funs.push_back(n1);
    for (int d = 2; d <= p; ++d) {
        Poly pd = legendre_poly(d), pd2 = legendre_poly(d - 2);
        Poly diff = Poly::Zero(d + 1);
        for (Eigen::Index i = 0; i < pd.size(); ++i) diff(i) += pd(i);
        for (Eigen::Index i = 0; i < pd2.size(); ++i) diff(i) -= pd2(i);
        funs.push_back(to_unit_interval(diff) / std::sqrt(2.0 * (2.0 * d - 1.0)));
    }
    return funs;
}

Quadrature2d square_quadrature(int n) {
    std::vector<double> x, w;
    gauss_legendre_01(n, x, w);
    Quadrature2d q;
    q.x.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            q.x.push_back(x[i]);
            q.y.push_back(x[j]);
            q.w.push_back(w[i] * w[j]);
        }
    return q;
}

Quadrature2d triangle_quadrature(int p, const std::array<double, 2>& a,
                                 const std::array<double, 2>& b, const std::array<double, 2>& c) {
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre_01(p + 1, xu, wu);
    gauss_legendre_01(p + 2, xv, wv);
    Quadrature2d q;
    for (std::size_t i = 0; i < xu.size(); ++i) {
        for (std::size_t j = 0; j < xv.size(); ++j) {
            const double r = xu[i] * (1.0 - xv[j]), s = xv[j]; // reference triangle, Jacobian 1-v
            q.x.push_back(a[0] + r * (b[0] - a[0]) + s * (c[0] - a[0]));
            q.y.push_back(a[1] + r * (b[1] - a[1]) + s * (c[1] - a[1]));
            const double detJ = std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
            q.w.push_back(wu[i] * wv[j] * (1.0 - xv[j]) * detJ);
        }
    }
    return q;
}

ReferenceElement::ReferenceElement(int p, int shape) : p_(p), shape_(shape) {
    if (p < 1 || p > 8) throw std::invalid_argument("ReferenceElement: order must be in [1,8]");
    b1d_ = hierarchical_basis_1d(p);
    for (const Poly& f : b1d_) b1d_der_.push_back(poly_derivative(f));

    if (shape == 0) {
        // canonical order: vertices (0,0),(1,0),(0,1),(1,1); bottom, top, left,
        // right edges; interior (dx,dy) with dx outer
        tensor_ = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
        for (int d = 2; d <= p; ++d) tensor_.push_back({d, 0});
        for (int d = 2; d <= p; ++d) tensor_.push_back({d, 1});
        for (int d = 2; d <= p; ++d) tensor_.push_back({0, d});
        for (int d = 2; d <= p; ++d) tensor_.push_back({1, d});
        for (int dx = 2; dx <= p; ++dx)
            for (int dy = 2; dy <= p; ++dy) tensor_.push_back({dx, dy});
        n_ = static_cast<int>(tensor_.size());
        n_int_ = (p - 1) * (p - 1);
    } else {
        // vertices in anticlockwise order; every edge pair follows the global
        // orientation rule (h edges left->right, v edges bottom->top, diagonals
        // lower-left->upper-right) so traces match across neighboring elements
        std::array<std::array<double, 2>, 3> verts;
        if (shape == 1) { // lower: (0,0),(1,0),(1,1); edges bottom, right-v, diagonal
            verts = {{{0, 0}, {1, 0}, {1, 1}}};
            edge_pairs_ = {{0, 1}, {1, 2}, {0, 2}};
        } else { // upper: (0,0),(1,1),(0,1); edges top-h, left-v, diagonal
            verts = {{{0, 0}, {1, 1}, {0, 1}}};
            edge_pairs_ = {{2, 1}, {0, 2}, {0, 1}};
        }
        Eigen::Matrix3d V;
        for (int i = 0; i < 3; ++i) V.row(i) << 1.0, verts[i][0], verts[i][1];
        bary_coef_ = V.inverse(); // column i: coefficients of lam_i
        // edge kernels K_d = -4 sqrt((2d-1)/2) / (d(d-1)) * P'_{d-1}(s), so that
        // lam_a lam_b K_d(lam_b - lam_a) traces to the 1-D hierarchical function
        for (int d = 2; d <= p; ++d) {
            Poly dP = poly_derivative(legendre_poly(d - 1));
            kernels_.push_back(dP * (-4.0 * std::sqrt((2.0 * d - 1.0) / 2.0) / (d * (d - 1.0))));
            kernels_der_.push_back(poly_derivative(kernels_.back()));
        }
        for (int d = 3; d <= p; ++d)
            for (int i = 0; i <= d - 3; ++i) bubbles_.push_back({i, d - 3 - i});
        for (int n = 0; n <= p; ++n) {
            leg_.push_back(legendre_poly(n));
            leg_der_.push_back(poly_derivative(leg_.back()));
        }
        n_int_ = static_cast<int>(bubbles_.size());
        n_ = 3 + 3 * (p - 1) + n_int_;
    }

    // element matrices by exact quadrature
    K_ = Eigen::MatrixXd::Zero(n_, n_);
    M_ = Eigen::MatrixXd::Zero(n_, n_);
    Quadrature2d q;
    if (shape == 0) {
        q = square_quadrature(p + 1);
    } else if (shape == 1) {
        q = triangle_quadrature(p, {0, 0}, {1, 0}, {1, 1});
    } else {
        q = triangle_quadrature(p, {0, 0}, {1, 1}, {0, 1});
    }
    Eigen::VectorXd vals(n_);
    Eigen::MatrixX2d grads(n_, 2);
    for (std::size_t qi = 0; qi < q.w.size(); ++qi) {
        eval(q.x[qi], q.y[qi], vals, grads);
        K_ += q.w[qi] * grads * grads.transpose();
        M_ += q.w[qi] * vals * vals.transpose();
    }
}

void ReferenceElement::eval(double x, double y, Eigen::VectorXd& values,
                            Eigen::MatrixX2d& gradients) const {
    values.resize(n_);
    gradients.resize(n_, 2);
    if (shape_ == 0) {
        for (int i = 0; i < n_; ++i) {
            const auto [fx, fy] = tensor_[i];
            const double vx = poly_eval(b1d_[fx], x), vy = poly_eval(b1d_[fy], y);
            values(i) = vx * vy;
            gradients(i, 0) = poly_eval(b1d_der_[fx], x) * vy;
            gradients(i, 1) = vx * poly_eval(b1d_der_[fy], y);
        }
        return;
    }
    Eigen::Vector3d lam;
    Eigen::Matrix<double, 3, 2> dlam;
    for (int i = 0; i < 3; ++i) {
        lam(i) = bary_coef_(0, i) + bary_coef_(1, i) * x + bary_coef_(2, i) * y;
        dlam(i, 0) = bary_coef_(1, i);
        dlam(i, 1) = bary_coef_(2, i);
    }
    int idx = 0;
    for (int i = 0; i < 3; ++i, ++idx) {
        values(idx) = lam(i);
        gradients.row(idx) = dlam.row(i);
    }
    for (const auto& [a, b] : edge_pairs_) {
        for (int d = 2; d <= p_; ++d, ++idx) {
            const Poly& Kd = kernels_[d - 2];
            const double s = lam(b) - lam(a);
            const double Kv = poly_eval(Kd, s), Kdv = poly_eval(kernels_der_[d - 2], s);
            values(idx) = lam(a) * lam(b) * Kv;
            gradients.row(idx) = (dlam.row(a) * lam(b) + lam(a) * dlam.row(b)) * Kv +
                                 lam(a) * lam(b) * Kdv * (dlam.row(b) - dlam.row(a));
        }
    }
    const double bub = lam(0) * lam(1) * lam(2);
    const Eigen::RowVector2d dbub = dlam.row(0) * lam(1) * lam(2) +
                                    lam(0) * dlam.row(1) * lam(2) + lam(0) * lam(1) * dlam.row(2);
    for (const auto& [i, j] : bubbles_) {
        const double u = lam(1) - lam(0), v = 2.0 * lam(2) - 1.0;
        const double Pi = poly_eval(leg_[i], u), Pj = poly_eval(leg_[j], v);
        const double dPi = poly_eval(leg_der_[i], u), dPj = poly_eval(leg_der_[j], v);
        values(idx) = bub * Pi * Pj;
        gradients.row(idx) = dbub * Pi * Pj +
                             bub * (dPi * (dlam.row(1) - dlam.row(0)) * Pj +
                                    Pi * dPj * 2.0 * dlam.row(2));
        ++idx;
    }
}

const ReferenceElement& ReferenceElement::cached(int p, int shape) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<ReferenceElement>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(p, shape);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::unique_ptr<ReferenceElement>(new ReferenceElement(p, shape)))
                 .first;
    return *it->second;
}

const ReferenceElement& ReferenceElement::square(int p) { return cached(p, 0); }
const ReferenceElement& ReferenceElement::triangle_lower(int p) { return cached(p, 1); }
const ReferenceElement& ReferenceElement::triangle_upper(int p) { return cached(p, 2); }

const Eigen::MatrixXd& edge_mass_1d(int p) {
    static std::mutex m;
    static std::map<int, Eigen::MatrixXd> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    auto funs = hierarchical_basis_1d(p);
    std::vector<double> x, w;
    gauss_legendre_01(p + 2, x, w);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p + 1, p + 1);
    for (std::size_t q = 0; q < x.size(); ++q) {
        Eigen::VectorXd v(p + 1);
        for (int i = 0; i <= p; ++i) v(i) = poly_eval(funs[i], x[q]);
        M += w[q] * v * v.transpose();
    }
    return cache.emplace(p, std::move(M)).first->second;
}

} // namespace helmtg

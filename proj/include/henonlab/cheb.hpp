#pragma once

#include <functional>
#include <vector>

#include "henonlab/core.hpp"

namespace henonlab {

// Truncated Chebyshev expansion of a real-analytic function on [lo, hi].
// f(x) = sum_k c_k T_k(t),  t = (2x - hi - lo) / (hi - lo).
class Cheb1D {
public:
    Cheb1D() = default;
    Cheb1D(std::vector<double> coef, double lo, double hi);

    static Cheb1D fit(const std::function<double(double)>& f, double lo, double hi, int degree);

    double operator()(double x) const;
    double deriv(double x) const;
    // Stable divided difference (f(a) - f(b)) / (a - b); equals f'(a) when a == b.
    double divided_diff(double a, double b) const;

    Cheb1D derivative() const;

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<double>& coef() const { return coef_; }

    double max_abs_coef() const;
    // Largest |c_k| for k >= from; decay diagnostic for truncation checks.
    double tail_max(int from) const;

private:
    double to_t(double x) const { return (2.0 * x - hi_ - lo_) / (hi_ - lo_); }

    std::vector<double> coef_;
    double lo_ = -1.0, hi_ = 1.0;
};

// Tensor-product Chebyshev expansion on [xlo,xhi] x [ylo,yhi].
// f(x,y) = sum_{j,k} c(j,k) T_j(tx) T_k(ty), coefficients row-major in j.
class Cheb2D {
public:
    Cheb2D() = default;
    Cheb2D(std::vector<double> coef, int nx, int ny, double xlo, double xhi, double ylo, double yhi);

    static Cheb2D fit(const std::function<double(double, double)>& f,
                      double xlo, double xhi, double ylo, double yhi,
                      int degx, int degy);
    static Cheb2D zero(double xlo, double xhi, double ylo, double yhi);

    double operator()(double x, double y) const;
    double dx(double x, double y) const;
    double dy(double x, double y) const;

    // Divided differences along one slot with the other frozen; stable for a ~ b.
    double divided_diff_x(double a, double b, double y) const;
    double divided_diff_y(double x, double a, double b) const;

    // 1-D trace along y = y0 as a Cheb1D in x.
    Cheb1D slice_y(double y0) const;

    double max_abs_on_grid(int nx = 33, int ny = 33) const;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double xlo() const { return xlo_; }
    double xhi() const { return xhi_; }
    double ylo() const { return ylo_; }
    double yhi() const { return yhi_; }
    const std::vector<double>& coef() const { return coef_; }
    double& at(int j, int k) { return coef_[static_cast<size_t>(j) * ny_ + k]; }
    double at(int j, int k) const { return coef_[static_cast<size_t>(j) * ny_ + k]; }
    bool is_zero(double tol = 0.0) const;

private:
    double tx(double x) const { return (2.0 * x - xhi_ - xlo_) / (xhi_ - xlo_); }
    double ty(double y) const { return (2.0 * y - yhi_ - ylo_) / (yhi_ - ylo_); }
    // Collapse the y index at fixed ty, giving x coefficients.
    std::vector<double> collapse_y(double t) const;
    std::vector<double> collapse_x(double t) const;

    std::vector<double> coef_;  // nx_ * ny_
    int nx_ = 0, ny_ = 0;
    double xlo_ = -1.0, xhi_ = 1.0, ylo_ = -1.0, yhi_ = 1.0;
};

namespace detail {
// Clenshaw evaluation of sum c_k T_k(t) for t in [-1,1] (extrapolates outside).
double clenshaw(const std::vector<double>& c, double t);
// Divided difference of sum c_k T_k between t-points a and b (t-domain),
// via the recurrence dd_{k+1} = 2 (b dd_k + T_k(a)) - dd_{k-1}.
double clenshaw_divided(const std::vector<double>& c, double ta, double tb);
// Coefficients of the derivative (t-domain; caller applies chain rule).
std::vector<double> deriv_coefs(const std::vector<double>& c);
}  // namespace detail

}  // namespace henonlab

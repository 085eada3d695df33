#include "henonlab/cheb.hpp"

#include <algorithm>
#include <cmath>

namespace henonlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

namespace detail {

double clenshaw(const std::vector<double>& c, double t) {
    const int n = static_cast<int>(c.size());
    if (n == 0) return 0.0;
    if (n == 1) return c[0];
    double b1 = 0.0, b2 = 0.0;
    const double t2 = 2.0 * t;
    for (int k = n - 1; k >= 1; --k) {
        const double b0 = c[k] + t2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + t * b1 - b2;
}

double clenshaw_divided(const std::vector<double>& c, double ta, double tb) {
    // dd_k = (T_k(tb) - T_k(ta)) / (tb - ta), by
    // dd_{k+1} = 2 (tb dd_k + T_k(ta)) - dd_{k-1}; exact limit tb -> ta.
    const int n = static_cast<int>(c.size());
    if (n <= 1) return 0.0;
    double Ta0 = 1.0, Ta1 = ta;            // T_k(ta)
    double dd0 = 0.0, dd1 = 1.0;           // dd_0, dd_1
    double acc = c[1] * dd1;
    for (int k = 1; k + 1 < n; ++k) {
        const double dd2 = 2.0 * (tb * dd1 + Ta1) - dd0;
        const double Ta2 = 2.0 * ta * Ta1 - Ta0;
        acc += c[k + 1] * dd2;
        dd0 = dd1; dd1 = dd2;
        Ta0 = Ta1; Ta1 = Ta2;
    }
    return acc;
}

std::vector<double> deriv_coefs(const std::vector<double>& c) {
    // d_k = d_{k+2} + 2(k+1) c_{k+1}, d_{n-1} = d_n = 0, then halve d_0.
    const int n = static_cast<int>(c.size());
    if (n <= 1) return {0.0};
    std::vector<double> d(static_cast<size_t>(n + 1), 0.0);
    for (int k = n - 2; k >= 0; --k) d[k] = d[k + 2] + 2.0 * (k + 1) * c[k + 1];
    d.resize(static_cast<size_t>(n - 1));
    d[0] *= 0.5;
    return d;
}

}  // namespace detail

Cheb1D::Cheb1D(std::vector<double> coef, double lo, double hi)
    : coef_(std::move(coef)), lo_(lo), hi_(hi) {
    if (coef_.empty()) coef_.push_back(0.0);
}

Cheb1D Cheb1D::fit(const std::function<double(double)>& f, double lo, double hi, int degree) {
    const int n = degree + 1;
    std::vector<double> vals(n);
    for (int j = 0; j < n; ++j) {
        const double theta = kPi * (j + 0.5) / n;
        const double t = std::cos(theta);
        vals[j] = f(0.5 * ((hi - lo) * t + hi + lo));
    }
    std::vector<double> coef(n, 0.0);
    for (int m = 0; m < n; ++m) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += vals[j] * std::cos(m * kPi * (j + 0.5) / n);
        coef[m] = 2.0 * s / n;
    }
    coef[0] *= 0.5;
    return Cheb1D(std::move(coef), lo, hi);
}

double Cheb1D::operator()(double x) const { return detail::clenshaw(coef_, to_t(x)); }

double Cheb1D::deriv(double x) const {
    const auto d = detail::deriv_coefs(coef_);
    return detail::clenshaw(d, to_t(x)) * 2.0 / (hi_ - lo_);
}

double Cheb1D::divided_diff(double a, double b) const {
    return detail::clenshaw_divided(coef_, to_t(a), to_t(b)) * 2.0 / (hi_ - lo_);
}

Cheb1D Cheb1D::derivative() const {
    auto d = detail::deriv_coefs(coef_);
    const double scale = 2.0 / (hi_ - lo_);
    for (auto& v : d) v *= scale;
    return Cheb1D(std::move(d), lo_, hi_);
}

double Cheb1D::max_abs_coef() const {
    double m = 0.0;
    for (double v : coef_) m = std::max(m, std::fabs(v));
    return m;
}

double Cheb1D::tail_max(int from) const {
    double m = 0.0;
    for (size_t k = std::max(from, 0); k < coef_.size(); ++k) m = std::max(m, std::fabs(coef_[k]));
    return m;
}

Cheb2D::Cheb2D(std::vector<double> coef, int nx, int ny,
               double xlo, double xhi, double ylo, double yhi)
    : coef_(std::move(coef)), nx_(nx), ny_(ny), xlo_(xlo), xhi_(xhi), ylo_(ylo), yhi_(yhi) {}

Cheb2D Cheb2D::zero(double xlo, double xhi, double ylo, double yhi) {
    return Cheb2D(std::vector<double>{0.0}, 1, 1, xlo, xhi, ylo, yhi);
}

Cheb2D Cheb2D::fit(const std::function<double(double, double)>& f,
                   double xlo, double xhi, double ylo, double yhi,
                   int degx, int degy) {
    const int nx = degx + 1, ny = degy + 1;
    std::vector<double> vals(static_cast<size_t>(nx) * ny);
    std::vector<double> xs(nx), ys(ny);
    for (int j = 0; j < nx; ++j)
        xs[j] = 0.5 * ((xhi - xlo) * std::cos(kPi * (j + 0.5) / nx) + xhi + xlo);
    for (int k = 0; k < ny; ++k)
        ys[k] = 0.5 * ((yhi - ylo) * std::cos(kPi * (k + 0.5) / ny) + yhi + ylo);
    for (int j = 0; j < nx; ++j)
        for (int k = 0; k < ny; ++k) vals[static_cast<size_t>(j) * ny + k] = f(xs[j], ys[k]);

    // transform along y then x
    std::vector<double> tmp(static_cast<size_t>(nx) * ny, 0.0);
    for (int j = 0; j < nx; ++j) {
        for (int m = 0; m < ny; ++m) {
            double s = 0.0;
            for (int k = 0; k < ny; ++k)
                s += vals[static_cast<size_t>(j) * ny + k] * std::cos(m * kPi * (k + 0.5) / ny);
            double c = 2.0 * s / ny;
            if (m == 0) c *= 0.5;
            tmp[static_cast<size_t>(j) * ny + m] = c;
        }
    }
    std::vector<double> coef(static_cast<size_t>(nx) * ny, 0.0);
    for (int m = 0; m < ny; ++m) {
        for (int l = 0; l < nx; ++l) {
            double s = 0.0;
            for (int j = 0; j < nx; ++j)
                s += tmp[static_cast<size_t>(j) * ny + m] * std::cos(l * kPi * (j + 0.5) / nx);
            double c = 2.0 * s / nx;
            if (l == 0) c *= 0.5;
            coef[static_cast<size_t>(l) * ny + m] = c;
        }
    }
    return Cheb2D(std::move(coef), nx, ny, xlo, xhi, ylo, yhi);
}

std::vector<double> Cheb2D::collapse_y(double t) const {
    std::vector<double> out(nx_, 0.0);
    // Clenshaw over k for each row j.
    for (int j = 0; j < nx_; ++j) {
        const double* row = &coef_[static_cast<size_t>(j) * ny_];
        double b1 = 0.0, b2 = 0.0;
        const double t2 = 2.0 * t;
        for (int k = ny_ - 1; k >= 1; --k) {
            const double b0 = row[k] + t2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        out[j] = row[0] + t * b1 - b2;
    }
    return out;
}

std::vector<double> Cheb2D::collapse_x(double t) const {
    std::vector<double> out(ny_, 0.0);
    std::vector<double> b1(ny_, 0.0), b2(ny_, 0.0);
    const double t2 = 2.0 * t;
    for (int j = nx_ - 1; j >= 1; --j) {
        for (int k = 0; k < ny_; ++k) {
            const double b0 = coef_[static_cast<size_t>(j) * ny_ + k] + t2 * b1[k] - b2[k];
            b2[k] = b1[k];
            b1[k] = b0;
        }
    }
    for (int k = 0; k < ny_; ++k) out[k] = coef_[k] + t * b1[k] - b2[k];
    return out;
}

double Cheb2D::operator()(double x, double y) const {
    return detail::clenshaw(collapse_y(ty(y)), tx(x));
}

double Cheb2D::dx(double x, double y) const {
    const auto cx = collapse_y(ty(y));
    return detail::clenshaw(detail::deriv_coefs(cx), tx(x)) * 2.0 / (xhi_ - xlo_);
}

double Cheb2D::dy(double x, double y) const {
    const auto cy = collapse_x(tx(x));
    return detail::clenshaw(detail::deriv_coefs(cy), ty(y)) * 2.0 / (yhi_ - ylo_);
}

double Cheb2D::divided_diff_x(double a, double b, double y) const {
    const auto cx = collapse_y(ty(y));
    return detail::clenshaw_divided(cx, tx(a), tx(b)) * 2.0 / (xhi_ - xlo_);
}

double Cheb2D::divided_diff_y(double x, double a, double b) const {
    const auto cy = collapse_x(tx(x));
    return detail::clenshaw_divided(cy, ty(a), ty(b)) * 2.0 / (yhi_ - ylo_);
}

Cheb1D Cheb2D::slice_y(double y0) const { return Cheb1D(collapse_y(ty(y0)), xlo_, xhi_); }

double Cheb2D::max_abs_on_grid(int gx, int gy) const {
    double m = 0.0;
    for (int i = 0; i < gx; ++i) {
        const double x = xlo_ + (xhi_ - xlo_) * i / (gx - 1);
        for (int j = 0; j < gy; ++j) {
            const double y = ylo_ + (yhi_ - ylo_) * j / (gy - 1);
            m = std::max(m, std::fabs((*this)(x, y)));
        }
    }
    return m;
}

bool Cheb2D::is_zero(double tol) const {
    for (double v : coef_)
        if (std::fabs(v) > tol) return false;
    return true;
}

}  // namespace henonlab

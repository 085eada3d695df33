#pragma once

#include <memory>
#include <string>
#include <vector>

#include "henonlab/cheb.hpp"
#include "henonlab/core.hpp"
#include "henonlab/unimodal.hpp"
#include "henonlab/words.hpp"

namespace henonlab {

struct HenonOptions {
    int f_degree = 40;
    int eps_degree_x = 24;
    int eps_degree_y = 16;
    int psi_degree_x = 32;
    int psi_degree_y = 20;
    double eps_bound_max = 0.45;
    double degenerate_floor = 1e-290;  // thickness below this is carried as zero
    double root_tol = 1e-14;
    UnimodalOptions unimodal;
};

// F(x,y) = (f(x) - eps(x,y), x) on B = [-1,1]^2; eps(x,0) = 0 and d_y eps of
// one sign (so eps >= 0 on the upper half of B). Degenerate maps carry
// eps identically zero.
struct HenonLikeMap {
    UnimodalMap f;
    Cheb2D eps;
    double eps_bound = 0.0;
    bool degenerate = true;

    double phi(double x, double y) const { return f(x) - (degenerate ? 0.0 : eps(x, y)); }
    double dphi_x(double x, double y) const { return f.deriv(x) - (degenerate ? 0.0 : eps.dx(x, y)); }
    double deps_y(double x, double y) const { return degenerate ? 0.0 : eps.dy(x, y); }

    Point apply(Point z) const;
    Point apply_iter(Point z, int k) const;
    double jacobian(Point z) const;  // |det DF| = |d_y eps|
};

HenonLikeMap make_henon(const UnimodalMap& f, const Cheb2D& eps, double eps_bound_hint = -1.0,
                        const HenonOptions& opt = {});

// Degenerate embedding iota(f) = (f o pi_x, pi_x).
HenonLikeMap embed_unimodal(const UnimodalMap& f);

enum class EpsShape { PureY, TiltedY, ExpY };

// eps = b_bar * eta(x,y) with eta(x,y) = y, y(1+x/10), or y exp(x/20).
HenonLikeMap thickened_map(const UnimodalMap& f, double b_bar, EpsShape shape = EpsShape::PureY,
                           const HenonOptions& opt = {});

// Per-level scope map Psi = H^{-1} o Lambda^{-1} of one renormalization step:
// H(x,y) = (f(x)-eps(x,y), y) straightens the return, Lambda^{-1} = h x h
// re-dilates onto B. Psi(X,Y) = (x_branch(h(X), h(Y)), h(Y)) where x_branch
// inverts phi(.,y) on the branch right of its critical point.
class CoordChange {
public:
    CoordChange() = default;
    CoordChange(std::shared_ptr<const HenonLikeMap> parent, RenormData h, int fit_deg_x,
                int fit_deg_y, double root_tol);

    Point apply(Point z) const;        // fitted x-part; fast, for boundary sampling
    Point apply_exact(Point z) const;  // root-solved x-part
    Mat2 derivative(Point z) const;    // exact implicit derivative at z

    // entries of the normal form D Psi = sigma [[s, t],[0, 1]] at z
    struct DiagEntries {
        double sigma, s, t;
    };
    DiagEntries diag_entries(Point z) const;

    const RenormData& h() const { return h_; }
    double fit_error() const { return fit_error_; }
    const HenonLikeMap& parent_map() const { return *parent_; }

private:
    std::shared_ptr<const HenonLikeMap> parent_;
    RenormData h_;
    Cheb2D x_fit_;
    double root_tol_ = 1e-14;
    double fit_error_ = 0.0;
};

// Inverse x-branch solve phi(x, y) = u, x right of the critical point of
// phi(., y). Exposed for reuse by the renormalization itself.
double invert_phi_branch(const HenonLikeMap& F, double u, double y, double tol, double x_seed);

std::pair<HenonLikeMap, CoordChange> renormalize_henon(const HenonLikeMap& F,
                                                       const HenonOptions& opt = {});

// Tower F_0, ..., F_N with coordinate changes psi[k] : Dom(F_{k+1}) -> Dom(F_k)
// and tips tau_n. The scope composition Psi_{m,n} = psi[m] o ... o psi[n-1]
// maps Dom(F_n) -> Dom(F_m) with n-m factors and carries tau_n to tau_m.
struct RenormTower {
    std::vector<std::shared_ptr<const HenonLikeMap>> levels;
    std::vector<CoordChange> psi;
    std::vector<Point> tips;
    HenonOptions opt;
    Alphabet alphabet{2};

    int depth() const { return static_cast<int>(levels.size()); }
    const HenonLikeMap& level(int n) const { return *levels[static_cast<size_t>(n)]; }
    Point tip(int n) const;

    // Psi_{m,n} applied to z in Dom(F_n).
    Point scope_mn(int m, int n, Point z, bool exact = false) const;
    // Scope map of the word w at `height`: psi^{w_0}_height o ... ; input at
    // height + |w|.
    Point scope_word(int height, const Word& w, Point z, bool exact = false) const;
    // Cantor point with address w . 0^inf at the given height.
    Point cantor_point(int height, const Word& w) const;
};

RenormTower build_tower(const HenonLikeMap& F, int N, const HenonOptions& opt = {});

// Thickened maps (f_a, b_bar eta) are generically not infinitely
// renormalizable: the unimodal parameter must sit on the stable locus of R_H.
// Bisection on the renormalization horizon locates it; the side of a failure
// is read off the critical orbit of the failing level's unimodal part.
struct TunedFamily {
    HenonLikeMap map;
    double a_param = 0.0;  // quadratic-family parameter on the stable locus
    int reached = 0;       // renormalization depth verified for `map`
};

TunedFamily tune_renormalizable(double b_bar, EpsShape shape, int depth,
                                const HenonOptions& opt = {});

// Birkhoff average of log |Jac F_level| along the tip orbit; iters is rounded
// up to a power of two so whole adding-machine cycles are averaged.
LogMag average_jacobian(const RenormTower& tower, long iters, int level = 0);

struct ScopeDecomposition {
    int m = 0, n = 0;
    Point tip_m;     // image tip tau_m
    Point tip_base;  // base tip tau_n: the decomposition expands around it
    double sigma_mn = 0.0, s_mn = 0.0, t_mn = 0.0;
    LogMag t_mn_log;  // tilt in log form (underflows double for large m)
    Mat2 D;
    Cheb2D remainder;  // fitted r_{m,n} on the tip-centered square
    double c_fit = 0.0;  // least-squares y^2 coefficient of x + r - v at the base

    // diagnostics computed on construction with the exact (unfitted) chain
    double recon_error = 0.0;   // sup | tau_m + D(id+R)(zeta) - Psi_{m,n}(tau_n+zeta) |
    double r_at_tip = 0.0;      // |r(0)|
    double dr_at_tip = 0.0;     // |grad r(0)|
    double fit_error = 0.0;     // remainder fit vs exact values
};

ScopeDecomposition scope_decomposition(const RenormTower& tower, int m, int n, int fit_degree = 24);

// The exact remainder value r_{m,n}(zeta) through the tower (test hook).
double scope_remainder_exact(const RenormTower& tower, const ScopeDecomposition& d, Point zeta);

struct UniversalData {
    Cheb1D v_star;  // tip-centered universal function, v(0) = 0, v'(0) = 1
    Cheb1D a_fn;    // a(x) from d_y eps_n / b^{p^n}; empty when degenerate
    bool has_a = false;
    double a_tip = 0.0;    // a(x) at the tip abscissa
    double a_const = 0.0;  // tilt calibration: |t_{m,n}| ~ a_const b^{p^m}
    double sigma = 0.0;    // the 1-D rescaling factor lambda
    double rho_est = 0.0;
    double C_est = 0.0;  // empirical prefactor of the rho^{n-m} remainder decay
    std::string lambda_source;
};

// v_*, rho from the decay of successive remainder fits; a(x) and the tilt
// constant when the tower is thickened. Needs depth >= 8.
UniversalData estimate_universal(const RenormTower& tower, double lambda_from_unimodal);

struct DerivativeBounds {
    double max_abs_dx = 0.0;
    double min_abs_dy = 0.0, max_abs_dy = 0.0;
    double ratio_lo_log = 0.0, ratio_hi_log = 0.0;  // log(|d_y phi_n| / b^{p^n}) range
};

DerivativeBounds derivative_bounds_report(const RenormTower& tower, int n, LogMag b);

// Mean-value access: xi, eta with the two-term finite-difference identity for
// pi_x F_n z0 - pi_x F_n z1, located inside the spanned rectangle.
struct MeanValueWitness {
    double xi = 0.0, eta = 0.0;
    bool found = false;
};
MeanValueWitness mean_value_witness(const HenonLikeMap& F, Point z0, Point z1);

}  // namespace henonlab

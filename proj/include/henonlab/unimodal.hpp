#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "henonlab/cheb.hpp"
#include "henonlab/core.hpp"
#include "henonlab/words.hpp"

namespace henonlab {

// Validation knobs for U-map construction. The strict profile enforces the
// c1 = 1, c2 = -1 normalization tightly; the solver uses a lenient profile
// while Newton iterates pass through slightly off-normalized maps.
struct UnimodalOptions {
    double normalization_tol = 1e-6;
    double critical_gap = 0.1;  // require |f(c0) - c0| > critical_gap
    int scan_points = 1024;
    bool check_expanding_fixed_point = true;
};

// Unimodal map on J = [-1,1]: increasing left of c0, decreasing right,
// normalized so the dynamical interval is J (c1 = 1, c2 = -1).
struct UnimodalMap {
    Cheb1D fn;
    Cheb1D dfn;         // cached derivative expansion
    double c0 = 0.0;    // critical point
    double c1 = 1.0;    // f(c0)
    double c2 = -1.0;   // f^2(c0)
    double beta = 0.0;  // interior expanding fixed point, negative multiplier

    double operator()(double x) const { return fn(x); }
    double deriv(double x) const { return dfn(x); }
};

UnimodalMap make_unimodal(const Cheb1D& f, const UnimodalOptions& opt = {});

// Quadratic family 1 - a x^2 brought to the c1 = 1, c2 = -1 normalization:
// f_a(x) = 1 - (a x + 2 - a)^2 / 2. Same dynamics as the logistic family.
UnimodalMap quadratic_family(double a, int degree = 40);

// Affine change h : J -> J0 of the period-doubling return; h(1) = c2, h(-1) = c4.
struct RenormData {
    Interval J0;
    double h_center = 0.0;
    double h_slope = 0.0;

    double h(double t) const { return h_center + h_slope * t; }
    double h_inv(double x) const { return (x - h_center) / h_slope; }
};

// Locates J0 = [c2, c4] and verifies the first-return structure; throws
// NotRenormalizable when no invariant central interval exists.
RenormData renorm_interval(const UnimodalMap& f, const UnimodalOptions& opt = {});

// R f = h^{-1} o f^p o h, re-expanded at `degree` (parent degree if < 0).
UnimodalMap renormalize_unimodal(const UnimodalMap& f, int degree = -1,
                                 const UnimodalOptions& opt = {});

// Image of a closed interval, honoring the interior critical point.
Interval unimodal_interval_image(const UnimodalMap& f, const Interval& I);

struct FixedPointResult {
    UnimodalMap fstar;
    double lambda = 0.0;    // |h| of the fixed-point equation; the paper's sigma
    double residual = 0.0;  // sup |R f* - f*| on a dense grid
    std::vector<double> residual_history;
    bool from_cache = false;
};

struct SolverOptions {
    int max_iterations = 60;
    double fd_step = 1e-7;
    std::string cache_dir;  // empty: use HENONLAB_CACHE_DIR or skip caching
    bool use_cache = true;
};

// Newton solve of R f = f on truncated Chebyshev coefficients (degree >= 10).
FixedPointResult solve_fixed_point(int degree, double tol, const SolverOptions& opt = {});

// Independent of the Newton path: bisection on superstable parameters of the
// quadratic family locates the Feigenbaum point; closest-return distances
// d_k = f^(2^k)(c0) - c0 are iterated and rescaled to estimate lambda.
struct FeigenbaumOracle {
    double a_star = 0.0;
    double lambda = 0.0;
    double delta_est = 0.0;
    std::vector<double> superstable;
};

FeigenbaumOracle feigenbaum_oracle(int max_level = 13, int degree = 40);

struct CylinderFamily1D {
    std::unordered_map<Word, Interval, WordHash> cyl;
    int depth = 0;
    Alphabet alphabet;

    const Interval& at(const Word& w) const;
    bool has(const Word& w) const { return cyl.count(w) > 0; }
};

// Hulls of the Cantor cylinders, built through the renormalization tower of f.
// Throws DepthUnreachable(n) when renormalizability fails at level n.
CylinderFamily1D cylinders_1d(const UnimodalMap& f, int depth,
                              const UnimodalOptions& opt = {});

struct AprioriReport {
    double L = 0.0;   // extremal sibling ratio |J^{ws}| / |J^{ws~}|
    double k0 = 0.0;  // min |J^{ws}| / |J^w|
    double k1 = 0.0;  // max |J^{ws}| / |J^w|
};

AprioriReport apriori_report(const CylinderFamily1D& c);

// 1-D renormalization tower: levels f, Rf, R^2 f, ... with their h-data.
struct UnimodalTower {
    std::vector<UnimodalMap> levels;
    std::vector<RenormData> h;  // h[k] : J -> J0(levels[k])

    int depth() const { return static_cast<int>(levels.size()); }
};

UnimodalTower unimodal_tower(const UnimodalMap& f, int depth,
                             const UnimodalOptions& opt = {});

// Cantor point of address (a_0 ... a_{L-1}) . 0^inf, computed through the
// tower's presentation maps; exact for the fixed point where the 0^inf tail
// collapses onto the critical point.
double cantor_point_1d(const UnimodalTower& tower, const Word& addr);

}  // namespace henonlab

#include "henonlab/unimodal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace henonlab {

namespace {

// Bisection refinement of a bracketed sign change of g.
double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 100) {
    double glo = g(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((glo <= 0.0) == (gm <= 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double iterate(const UnimodalMap& f, double x, long n) {
    for (long i = 0; i < n; ++i) x = f(x);
    return x;
}

}  // namespace

UnimodalMap make_unimodal(const Cheb1D& f, const UnimodalOptions& opt) {
    UnimodalMap u;
    u.fn = f;
    u.dfn = f.derivative();
    const double lo = f.lo(), hi = f.hi();
    const int n = opt.scan_points;

    // critical point: unique interior sign change of f'
    const Cheb1D& df = u.dfn;
    int crossings = 0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double prev_x = lo + (hi - lo) * 1e-6;
    double prev_d = df(prev_x);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * (1e-6 + (1.0 - 2e-6) * i / n);
        const double d = df(x);
        if ((prev_d > 0.0) != (d > 0.0)) {
            ++crossings;
            bracket_lo = prev_x;
            bracket_hi = x;
        }
        prev_x = x;
        prev_d = d;
    }
    if (crossings != 1) throw Error("make_unimodal: f' has " + std::to_string(crossings) + " interior sign changes");
    u.c0 = bisect([&](double x) { return df(x); }, bracket_lo, bracket_hi);
    if (df(bracket_lo) < 0.0) throw Error("make_unimodal: f decreasing left of critical point");

    u.c1 = f(u.c0);
    u.c2 = f(u.c1);
    if (std::fabs(u.c1 - 1.0) > opt.normalization_tol || std::fabs(u.c2 + 1.0) > opt.normalization_tol)
        throw Error("make_unimodal: normalization c1=1, c2=-1 violated (c1=" + std::to_string(u.c1) +
                    ", c2=" + std::to_string(u.c2) + ")");
    if (std::fabs(u.c1 - u.c0) <= opt.critical_gap)
        throw Error("make_unimodal: critical point too close to critical value");

    if (opt.check_expanding_fixed_point) {
        // interior fixed point with negative expanding multiplier
        bool found = false;
        prev_x = lo + (hi - lo) * 1e-3;
        double prev_g = f(prev_x) - prev_x;
        for (int i = 1; i <= n; ++i) {
            const double x = lo + (hi - lo) * (1e-3 + (1.0 - 2e-3) * i / n);
            const double g = f(x) - x;
            if ((prev_g > 0.0) != (g > 0.0)) {
                const double b = bisect([&](double t) { return f(t) - t; }, prev_x, x);
                const double mult = df(b);
                if (mult < -1.0) {
                    u.beta = b;
                    found = true;
                }
            }
            prev_x = x;
            prev_g = g;
        }
        if (!found) throw Error("make_unimodal: no interior expanding fixed point with negative multiplier");
    }
    return u;
}

UnimodalMap quadratic_family(double a, int degree) {
    auto f = [a](double x) {
        const double t = 0.5 * (a * x + 2.0 - a);
        return 1.0 - 2.0 * t * t;
    };
    return make_unimodal(Cheb1D::fit(f, -1.0, 1.0, degree));
}

Interval unimodal_interval_image(const UnimodalMap& f, const Interval& I) {
    double vlo = f(I.lo), vhi = f(I.hi);
    Interval out = Interval::hull(vlo, vhi);
    if (I.contains(f.c0)) {
        out.lo = std::min(out.lo, f.c1);
        out.hi = std::max(out.hi, f.c1);
    }
    return out;
}

RenormData renorm_interval(const UnimodalMap& f, const UnimodalOptions& opt) {
    const double c2 = f.c2;
    const double c3 = f(c2);
    const double c4 = f(c3);
    const Interval J0 = Interval::hull(c2, c4);

    if (J0.length() < 1e-12) throw NotRenormalizable("degenerate central interval");
    const double margin = 1e-9 * std::max(1.0, J0.length());
    if (!(f.c0 > J0.lo + margin && f.c0 < J0.hi - margin))
        throw NotRenormalizable("critical point not interior to [c2, c4]");

    // f^2(J0) inside J0, sampled
    const int grid = 1000;
    for (int i = 0; i <= grid; ++i) {
        const double x = J0.lo + J0.length() * i / grid;
        const double y = f(f(x));
        if (y < J0.lo - 1e-10 || y > J0.hi + 1e-10)
            throw NotRenormalizable("f^2 does not map [c2, c4] into itself");
    }

    // J0 and f(J0) have disjoint interiors
    const Interval J1 = unimodal_interval_image(f, J0);
    if (std::min(J0.hi, J1.hi) - std::max(J0.lo, J1.lo) > 1e-10)
        throw NotRenormalizable("central interval meets its image");

    RenormData rd;
    rd.J0 = J0;
    rd.h_center = 0.5 * (c2 + c4);
    rd.h_slope = 0.5 * (c2 - c4);
    return rd;
}

UnimodalMap renormalize_unimodal(const UnimodalMap& f, int degree, const UnimodalOptions& opt) {
    const RenormData rd = renorm_interval(f, opt);
    const int d = degree > 0 ? degree : f.fn.degree();

    auto attempt = [&](double center, double slope) {
        auto g = [&](double t) {
            const double x = center + slope * t;
            return (f(f(x)) - center) / slope;
        };
        return make_unimodal(Cheb1D::fit(g, -1.0, 1.0, d), opt);
    };

    // h(1) = c2, h(-1) = c4 normalizes the renormalization directly; the
    // mirrored orientation is the fallback the definition allows.
    try {
        return attempt(rd.h_center, rd.h_slope);
    } catch (const Error&) {
        return attempt(rd.h_center, -rd.h_slope);
    }
}

UnimodalTower unimodal_tower(const UnimodalMap& f, int depth, const UnimodalOptions& opt) {
    UnimodalTower t;
    t.levels.push_back(f);
    for (int k = 0; k < depth; ++k) {
        try {
            t.h.push_back(renorm_interval(t.levels.back(), opt));
            if (k + 1 < depth) t.levels.push_back(renormalize_unimodal(t.levels.back(), -1, opt));
        } catch (const NotRenormalizable& e) {
            throw DepthUnreachable(k, e.what());
        }
    }
    return t;
}

const Interval& CylinderFamily1D::at(const Word& w) const {
    auto it = cyl.find(w);
    if (it == cyl.end()) throw Error("cylinder not stored for word " + w.str());
    return it->second;
}

CylinderFamily1D cylinders_1d(const UnimodalMap& f, int depth, const UnimodalOptions& opt) {
    if (depth < 1) throw Error("cylinders_1d: depth must be >= 1");
    if (depth > 14) throw Error("cylinders_1d: depth too large for enumeration");
    const Alphabet ab{2};

    UnimodalTower tower = unimodal_tower(f, depth, opt);

    CylinderFamily1D fam;
    fam.depth = depth;
    fam.alphabet = ab;

    // J^(w0 w1 ... ) at level k: apply f_k^{w0} to h_k(J^(w1 ...) at level k+1)
    std::function<Interval(int, const std::vector<int>&, size_t)> build =
        [&](int level, const std::vector<int>& w, size_t pos) -> Interval {
        if (pos == w.size()) return Interval{-1.0, 1.0};
        Interval inner = build(level + 1, w, pos + 1);
        const RenormData& rd = tower.h[static_cast<size_t>(level)];
        Interval I = Interval::hull(rd.h(inner.lo), rd.h(inner.hi));
        for (int i = 0; i < w[pos]; ++i) I = unimodal_interval_image(tower.levels[static_cast<size_t>(level)], I);
        return I;
    };

    for (int L = 1; L <= depth; ++L) {
        std::vector<int> w(static_cast<size_t>(L), 0);
        while (true) {
            fam.cyl.emplace(Word(w, ab), build(0, w, 0));
            size_t i = 0;
            while (i < w.size() && ++w[i] == ab.p) w[i++] = 0;
            if (i == w.size()) break;
        }
    }
    return fam;
}

AprioriReport apriori_report(const CylinderFamily1D& c) {
    if (c.depth < 2) throw Error("apriori_report: needs depth >= 2");
    AprioriReport r;
    r.L = 1.0;
    r.k0 = 1.0;
    r.k1 = 0.0;
    const int p = c.alphabet.p;
    for (const auto& [w, J] : c.cyl) {
        if (w.length() >= c.depth) continue;
        std::vector<double> child_len(static_cast<size_t>(p));
        for (int s = 0; s < p; ++s) {
            const Interval& Jc = c.at(w.append(s));
            child_len[static_cast<size_t>(s)] = Jc.length();
            const double ratio = Jc.length() / J.length();
            r.k0 = std::min(r.k0, ratio);
            r.k1 = std::max(r.k1, ratio);
        }
        for (int s = 0; s < p; ++s)
            for (int t = 0; t < p; ++t)
                if (s != t) r.L = std::max(r.L, child_len[static_cast<size_t>(s)] / child_len[static_cast<size_t>(t)]);
    }
    return r;
}

double cantor_point_1d(const UnimodalTower& tower, const Word& addr) {
    const int L = addr.length();
    if (L + 1 > tower.depth())
        throw AddressUnavailable("tower depth " + std::to_string(tower.depth()) +
                                 " too shallow for address of length " + std::to_string(L));
    // seed: the 0^inf point at level L is the fixed point of h_L (but h data
    // may not extend that far; the critical point is the same limit).
    double x = tower.levels[static_cast<size_t>(L)].c0;
    for (int k = L - 1; k >= 0; --k) {
        const RenormData& rd = tower.h[static_cast<size_t>(k)];
        x = rd.h(x);
        const UnimodalMap& fk = tower.levels[static_cast<size_t>(k)];
        for (int i = 0; i < addr.letter(k); ++i) x = fk(x);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Feigenbaum oracle: superstable bisection + iterate-and-rescale.
// ---------------------------------------------------------------------------

FeigenbaumOracle feigenbaum_oracle(int max_level, int degree) {
    FeigenbaumOracle out;
    auto crit = [](double a) { return (a - 2.0) / a; };
    auto dist_after = [&](double a, long n) {
        const double t0 = 0.5 * (a * 1.0 + 2.0 - a);  // unused guard against a<=0
        (void)t0;
        auto f = [a](double x) {
            const double t = 0.5 * (a * x + 2.0 - a);
            return 1.0 - 2.0 * t * t;
        };
        double x = crit(a);
        const double c = x;
        for (long i = 0; i < n; ++i) x = f(x);
        return x - c;
    };

    // superstable parameter of period 2^k: zero of a -> f_a^(2^k)(c0) - c0
    out.superstable.push_back(1.0);  // period-2 superstable, exact in this family
    double step = 0.31;
    for (int k = 2; k <= max_level; ++k) {
        const long n = 1L << k;
        double lo = out.superstable.back() + 1e-12;
        double glo = dist_after(lo, n);
        double hi = lo;
        bool bracketed = false;
        double s = step;
        for (int tries = 0; tries < 400; ++tries) {
            hi = lo + s;
            const double ghi = dist_after(hi, n);
            if ((glo > 0.0) != (ghi > 0.0)) {
                bracketed = true;
                break;
            }
            lo = hi;
            glo = ghi;
            if (tries > 4) s *= 1.5;  // widen slowly if the first guess was short
        }
        if (!bracketed) throw NoConvergence("superstable bracket not found at level " + std::to_string(k), {});
        const double a = bisect([&](double t) { return dist_after(t, n); }, lo, hi, 80);
        step = out.superstable.empty() ? 0.3 : (a - out.superstable.back()) / 6.0;
        out.superstable.push_back(a);
    }

    const size_t m = out.superstable.size();
    if (m < 4) throw NoConvergence("too few superstable levels", {});
    const double d1 = out.superstable[m - 2] - out.superstable[m - 3];
    const double d2 = out.superstable[m - 1] - out.superstable[m - 2];
    out.delta_est = d1 / d2;
    out.a_star = out.superstable[m - 1] + d2 / (out.delta_est - 1.0);

    // closest-return distances at a*: d_k = f^(2^k)(c0) - c0
    std::vector<double> dk;
    for (int k = 1; k <= std::min(max_level, 10); ++k) dk.push_back(dist_after(out.a_star, 1L << k));
    std::vector<double> ratios;
    for (size_t i = 0; i + 1 < dk.size(); ++i) ratios.push_back(dk[i + 1] / dk[i]);
    // Aitken acceleration, twice, of the ratio sequence
    auto aitken = [](const std::vector<double>& s) {
        std::vector<double> t;
        for (size_t i = 0; i + 2 < s.size(); ++i) {
            const double den = s[i + 2] - 2.0 * s[i + 1] + s[i];
            if (std::fabs(den) < 1e-300)
                t.push_back(s[i + 2]);
            else
                t.push_back(s[i + 2] - (s[i + 2] - s[i + 1]) * (s[i + 2] - s[i + 1]) / den);
        }
        return t;
    };
    std::vector<double> acc = aitken(ratios);
    if (acc.size() >= 3) acc = aitken(acc);
    out.lambda = std::fabs(acc.empty() ? ratios.back() : acc.back());
    return out;
}

// ---------------------------------------------------------------------------
// Newton solve of the fixed-point equation on Chebyshev coefficients.
// ---------------------------------------------------------------------------

namespace {

std::vector<double> renorm_values_at_nodes(const std::vector<double>& coef,
                                           const std::vector<double>& nodes,
                                           const UnimodalOptions& lenient) {
    Cheb1D f(coef, -1.0, 1.0);
    UnimodalMap u = make_unimodal(f, lenient);
    RenormData rd = renorm_interval(u, lenient);
    std::vector<double> out(nodes.size());
    for (size_t j = 0; j < nodes.size(); ++j) {
        const double x = rd.h(nodes[j]);
        out[j] = rd.h_inv(f(f(x)));
    }
    return out;
}

std::string cache_path(const SolverOptions& opt, int degree, double tol) {
    std::string dir = opt.cache_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("HENONLAB_CACHE_DIR")) dir = env;
    }
    if (dir.empty()) return {};
    std::ostringstream name;
    name << dir << "/fstar_p2_d" << degree << "_t" << tol << ".txt";
    return name.str();
}

}  // namespace

FixedPointResult solve_fixed_point(int degree, double tol, const SolverOptions& opt) {
    if (degree < 10) throw Error("solve_fixed_point: degree must be >= 10");
    UnimodalOptions lenient;
    lenient.normalization_tol = 0.05;
    lenient.check_expanding_fixed_point = false;

    const int n = degree + 1;
    std::vector<double> nodes(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) nodes[static_cast<size_t>(j)] = std::cos(3.14159265358979323846 * (j + 0.5) / n);

    FixedPointResult res;

    const std::string cache = cache_path(opt, degree, tol);
    if (opt.use_cache && !cache.empty()) {
        std::ifstream in(cache);
        if (in) {
            std::vector<double> coef(static_cast<size_t>(n));
            bool ok = true;
            for (auto& c : coef)
                if (!(in >> c)) ok = false;
            if (ok) {
                try {
                    res.fstar = make_unimodal(Cheb1D(coef, -1.0, 1.0));
                    res.from_cache = true;
                } catch (const Error&) {
                    res.from_cache = false;
                }
            }
        }
    }

    if (!res.from_cache) {
        // seed: three renormalizations of the quadratic family at the
        // Feigenbaum parameter land near the fixed point
        FeigenbaumOracle oracle = feigenbaum_oracle(12);
        UnimodalMap f = quadratic_family(oracle.a_star, degree);
        for (int i = 0; i < 3; ++i) f = renormalize_unimodal(f, degree, lenient);

        std::vector<double> coef = f.fn.coef();
        coef.resize(static_cast<size_t>(n), 0.0);

        auto residual = [&](const std::vector<double>& c) {
            std::vector<double> rv = renorm_values_at_nodes(c, nodes, lenient);
            Cheb1D fc(c, -1.0, 1.0);
            Eigen::VectorXd r(n);
            for (int j = 0; j < n; ++j) r(j) = rv[static_cast<size_t>(j)] - fc(nodes[static_cast<size_t>(j)]);
            return r;
        };

        Eigen::VectorXd F = residual(coef);
        double fnorm = F.lpNorm<Eigen::Infinity>();
        res.residual_history.push_back(fnorm);

        for (int it = 0; it < opt.max_iterations && fnorm > tol * 0.05; ++it) {
            Eigen::MatrixXd J(n, n);
            for (int col = 0; col < n; ++col) {
                std::vector<double> cpert = coef;
                cpert[static_cast<size_t>(col)] += opt.fd_step;
                Eigen::VectorXd Fp = residual(cpert);
                J.col(col) = (Fp - F) / opt.fd_step;
            }
            Eigen::VectorXd delta = J.partialPivLu().solve(-F);

            double scale = 1.0;
            bool accepted = false;
            for (int half = 0; half < 12; ++half) {
                std::vector<double> trial = coef;
                for (int j = 0; j < n; ++j) trial[static_cast<size_t>(j)] += scale * delta(j);
                try {
                    Eigen::VectorXd Ft = residual(trial);
                    const double tn = Ft.lpNorm<Eigen::Infinity>();
                    if (tn < fnorm) {
                        coef = trial;
                        F = Ft;
                        fnorm = tn;
                        accepted = true;
                        break;
                    }
                } catch (const Error&) {
                    // step left the U-map cone; damp
                }
                scale *= 0.5;
            }
            res.residual_history.push_back(fnorm);
            if (!accepted) break;
        }
        if (fnorm > tol) throw NoConvergence("fixed-point Newton stalled at residual " + std::to_string(fnorm),
                                             res.residual_history);
        res.fstar = make_unimodal(Cheb1D(coef, -1.0, 1.0));
        if (!cache.empty()) {
            std::filesystem::create_directories(std::filesystem::path(cache).parent_path());
            std::ofstream outf(cache);
            outf.precision(17);
            for (double c : coef) outf << c << "\n";
        }
    }

    // residual on a dense grid, plus the rescaling factor
    const UnimodalMap& fs = res.fstar;
    const RenormData rd = renorm_interval(fs);
    double rmax = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double x = -1.0 + 2.0 * i / 2000.0;
        rmax = std::max(rmax, std::fabs(rd.h_inv(fs(fs(rd.h(x)))) - fs(x)));
    }
    res.residual = rmax;
    if (res.from_cache && rmax > tol) {
        SolverOptions retry = opt;
        retry.use_cache = false;
        return solve_fixed_point(degree, tol, retry);
    }
    res.lambda = std::fabs(rd.h_slope);
    return res;
}

}  // namespace henonlab

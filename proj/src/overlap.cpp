#include "henonlab/overlap.hpp"

#include <algorithm>
#include <cmath>

namespace henonlab {

double upsilon_star(const Cheb1D& v, Point z, Point zt) {
    if (std::fabs(zt.y - z.y) < 1e-12)
        throw DegenerateVerticalPair("upsilon_star: |y~ - y| below tolerance");
    return (v(zt.x) - v(z.x)) / (zt.y - z.y);
}

double upsilon_m(const Cheb1D& v, double c_m, Point z, Point zt) {
    return upsilon_star(v, z, zt) - c_m * (zt.y + z.y);
}

namespace {

// 1-D cylinder of one word through the unimodal tower (no full enumeration)
Interval cylinder_for_word(const UnimodalTower& t, const Word& w) {
    std::function<Interval(int, size_t)> build = [&](int level, size_t pos) -> Interval {
        if (pos == static_cast<size_t>(w.length())) return Interval{-1.0, 1.0};
        Interval inner = build(level + 1, pos + 1);
        const RenormData& rd = t.h[static_cast<size_t>(level)];
        Interval I = Interval::hull(rd.h(inner.lo), rd.h(inner.hi));
        for (int i = 0; i < w.letter(static_cast<int>(pos)); ++i)
            I = unimodal_interval_image(t.levels[static_cast<size_t>(level)], I);
        return I;
    };
    return build(0, 0);
}

}  // namespace

WellChosenData find_well_chosen(const UniversalData& universal, const UnimodalMap& fstar,
                                int max_depth) {
    if (max_depth < 3) throw Error("find_well_chosen: max_depth >= 3");
    WellChosenData out;
    out.sigma = universal.sigma;
    out.a_const = universal.a_const;
    out.C_est = universal.C_est;
    out.rho_est = universal.rho_est;
    if (!(out.a_const > 0.0)) throw Error("find_well_chosen: tilt calibration a_const missing");

    const double c0 = fstar.c0;
    const Cheb1D& v = universal.v_star;
    // Cantor points sit on the curve x = fbar(y) with fbar the tip-centered
    // fixed point: fbar(y) = f(y + c0) - 1, fbar(0) = 0.
    auto fbar = [&](double y) { return fstar(y + c0) - fstar.c1; };
    auto V = [&](double y) { return v(fbar(y)); };

    // concavity window left of the critical point: sign-constant second
    // difference of V on a grid shrinking toward 0^-
    const double span = std::min(1.0 + c0, 1.0 - c0) * 0.9;
    const double fd = 1e-4;
    auto second_diff = [&](double y) { return V(y + fd) - 2.0 * V(y) + V(y - fd); };
    const int grid = 400;
    double y_lo = 0.0;
    const double s_ref = second_diff(-span / grid);
    if (s_ref == 0.0) throw NoConcavityWindow("flat second difference at the critical point");
    for (int i = 1; i <= grid; ++i) {
        const double y = -span * i / grid;
        if ((second_diff(y) > 0.0) != (s_ref > 0.0)) break;
        y_lo = y;
    }
    if (y_lo > -10 * fd) throw NoConcavityWindow("no sign-constant window left of the critical point");
    out.side = "left";

    UnimodalTower tower1d = unimodal_tower(fstar, max_depth + 2);
    const Alphabet ab{2};

    // candidate parent cylinders 0^k . 1 . 0^j, smallest total depth first;
    // pass 0 insists they sit inside the concavity window, pass 1 falls back
    // to verifying the well-placedness inequalities directly
    for (int pass = 0; pass < 2; ++pass) {
    for (int total = 2; total <= max_depth; ++total) {
        for (int k = 1; k < total; ++k) {
            const int j = total - 1 - k;
            std::vector<int> letters(static_cast<size_t>(k), 0);
            letters.push_back(1);
            for (int i = 0; i < j; ++i) letters.push_back(0);
            const Word u(letters, ab);
            const Interval Ju = cylinder_for_word(tower1d, u);
            if (!(Ju.hi - c0 < -1e-6)) continue;  // left of the critical point
            if (pass == 0 && !(Ju.lo - c0 > y_lo * 0.98)) continue;

            Word child0 = u.append(0), child1 = u.append(1);
            const Interval J0 = cylinder_for_word(tower1d, child0);
            const Interval J1 = cylinder_for_word(tower1d, child1);
            Word wl = child0, wr = child1;
            if (J0.mid() > J1.mid()) std::swap(wl, wr);

            // two points per sibling: addresses child.s.0^inf
            auto pick = [&](const Word& cyl) {
                Word a0 = cyl.append(0), a1 = cyl.append(1);
                double p0 = cantor_point_1d(tower1d, a0);
                double p1 = cantor_point_1d(tower1d, a1);
                if (p0 > p1) std::swap(a0, a1), std::swap(p0, p1);
                return std::pair{std::pair{a0, p0}, std::pair{a1, p1}};
            };
            const auto [l0, l1] = pick(wl);
            const auto [r0, r1] = pick(wr);
            const double y0 = l0.second - c0, y1 = l1.second - c0;
            const double yt0 = r0.second - c0, yt1 = r1.second - c0;
            if (!(y0 < y1 && y1 < yt0 && yt0 < yt1)) continue;

            const Point z0{fbar(y0), y0}, z1{fbar(y1), y1};
            const Point zt0{fbar(yt0), yt0}, zt1{fbar(yt1), yt1};
            if (!(z0.x < z1.x && z1.x < zt0.x && zt0.x < zt1.x)) continue;

            const double ups01 = upsilon_star(v, z0, z1);
            const double ups0t = upsilon_star(v, z0, zt0);
            if (!(ups0t < ups01)) continue;  // well-placedness

            out.w = wl;
            out.w_tilde = wr;
            out.z0 = z0;
            out.z1 = z1;
            out.zt0 = zt0;
            out.zt1 = zt1;
            out.addr_z0 = l0.first;
            out.addr_z1 = l1.first;
            out.addr_zt0 = r0.first;
            out.addr_zt1 = r1.first;
            out.ups_z0_z1 = ups01;
            out.ups_z0_zt0 = ups0t;
            out.ups_zt0_zt1 = upsilon_star(v, zt0, zt1);

            out.kappa[0] = std::fabs(ups01 - out.ups_zt0_zt1);
            out.kappa[1] = std::fabs(y1 - y0) / std::fabs(yt0 - y0);
            out.kappa[2] = std::fabs(yt0 - y0);
            out.kappa[3] = std::fabs(y1 - y0);
            out.kappa[4] = std::fabs(yt1 - yt0);
            if (!(out.kappa[1] > 0.0 && out.kappa[1] < 1.0)) continue;

            const double k1h = 0.5 * out.kappa[1];
            out.M = Interval{(ups0t - k1h * ups01) / (1.0 - k1h), ups0t};
            if (!(out.M.lo < out.M.hi)) continue;

            const double gap = ups01 - ups0t;
            double delta = gap / 10.0;
            bool ok = false;
            for (int halve = 0; halve < 20; ++halve) {
                const Interval Md{out.M.lo + (delta / 3.0) * (3.0 - k1h) / (1.0 - k1h),
                                  out.M.hi - delta};
                if (Md.lo < Md.hi && Md.lo > 0.0) {
                    out.M_delta = Md;
                    ok = true;
                    break;
                }
                delta *= 0.5;
            }
            if (!ok) continue;
            out.delta = delta;
            out.A0 = out.M_delta.lo / out.a_const;
            out.A1 = out.M_delta.hi / out.a_const;

            // class-A entry threshold from the two smallness displays, using
            // the fitted C and rho
            const double rho = std::max(1e-6, std::min(0.999, out.rho_est));
            const double C = std::max(0.01, out.C_est);
            const double rhs1 = (out.kappa[2] / 2.0) * (1.0 - k1h) * (delta / 3.0);
            const double rhs2 = (out.kappa[0] / 8.0) / (1.0 / out.kappa[3] + 1.0 / out.kappa[4]);
            const double need = std::min(rhs1, rhs2) / (4.0 * C);
            int N = 2;
            if (need < 1.0) N = static_cast<int>(std::ceil(std::log(need) / std::log(rho)));
            out.N = std::max(N, 2);
            // the displays ask for depths beyond the reachable tower; the
            // experiments run at the feasibility clamp and report margins
            if (out.N > 6) {
                out.N = 6;
                out.N_clamped = true;
            }
            return out;
        }
    }
    }
    throw DepthExhausted("find_well_chosen: no admissible sibling cylinders up to depth " +
                         std::to_string(max_depth));
}

namespace {

struct AddressedPoints {
    Point z0, z1, zt0, zt1;  // tip-centered at height n
};

AddressedPoints addressed_points(const RenormTower& tower, const WellChosenData& data, int n) {
    const Point tau = tower.tip(n);
    auto at = [&](const Word& addr) {
        const Point z = tower.cantor_point(n, addr);
        return Point{z.x - tau.x, z.y - tau.y};
    };
    return {at(data.addr_z0), at(data.addr_z1), at(data.addr_zt0), at(data.addr_zt1)};
}

}  // namespace

ClassAReport class_a_check(const RenormTower& tower, const WellChosenData& data, int m, int n,
                           const UniversalData& universal) {
    ClassAReport rep;
    rep.m = m;
    rep.n = n;
    rep.parity_ok = ((n - m) % 2 == 0);
    if (n + data.addr_z0.length() > tower.depth() - 1)
        throw AddressUnavailable("class_a_check: tower too shallow for the point addresses");

    const AddressedPoints pts = addressed_points(tower, data, n);
    const ScopeDecomposition dec = scope_decomposition(tower, m, n);
    const Cheb1D& v = universal.v_star;
    const double c_m = dec.c_fit;

    auto row = [&](const std::string& name, bool pass, double slack) {
        rep.rows.push_back({name, pass, slack});
    };

    // (A-1) orderings
    {
        const bool ok = pts.z0.x < pts.z1.x && pts.z1.x < pts.zt0.x && pts.zt0.x < pts.zt1.x &&
                        pts.z0.y < pts.z1.y && pts.z1.y < pts.zt0.y && pts.zt0.y < pts.zt1.y;
        double margin = std::min({pts.z1.x - pts.z0.x, pts.zt0.x - pts.z1.x, pts.zt1.x - pts.zt0.x,
                                  pts.z1.y - pts.z0.y, pts.zt0.y - pts.z1.y, pts.zt1.y - pts.zt0.y});
        row("A1-ordering", ok, margin);
    }
    // (A-2)
    {
        const double q = std::fabs(pts.z1.y - pts.z0.y) / std::fabs(pts.zt0.y - pts.z0.y);
        const bool ok = q < 1.0 && q > 0.5 * data.kappa[1];
        row("A2-height-quotient", ok, std::min(1.0 - q, q - 0.5 * data.kappa[1]));
    }
    // (A-3)
    {
        const double m1 = std::fabs(pts.zt0.y - pts.z0.y) - 0.5 * data.kappa[2];
        const double m2 = std::fabs(pts.z1.y - pts.z0.y) - 0.5 * data.kappa[3];
        const double m3 = std::fabs(pts.zt1.y - pts.zt0.y) - 0.5 * data.kappa[4];
        row("A3-vertical-gaps", m1 > 0 && m2 > 0 && m3 > 0, std::min({m1, m2, m3}));
    }
    // (A-4)
    {
        const double g = std::fabs(upsilon_m(v, c_m, pts.z0, pts.z1) -
                                   upsilon_m(v, c_m, pts.zt0, pts.zt1));
        row("A4-upsilon-gap", g > 0.5 * data.kappa[0], g - 0.5 * data.kappa[0]);
    }
    // (A-5) remainder asymptotics across the domain
    {
        const double bound = std::max(0.01, data.C_est) * std::pow(data.rho_est, n - m);
        double worst = 0.0;
        for (int i = 0; i <= 12; ++i) {
            const double zx = dec.remainder.xlo() +
                              (dec.remainder.xhi() - dec.remainder.xlo()) * i / 12.0;
            for (int j = 0; j <= 12; ++j) {
                const double zy = dec.remainder.ylo() +
                                  (dec.remainder.yhi() - dec.remainder.ylo()) * j / 12.0;
                const double lhs = zx + dec.remainder(zx, zy) - (v(zx) + c_m * zy * zy);
                worst = std::max(worst, std::fabs(lhs));
            }
        }
        row("A5-remainder-envelope", worst < bound, bound - worst);
    }
    // (A-6) Upsilon values near their starred limits
    {
        const double d1 = std::fabs(upsilon_m(v, c_m, pts.z0, pts.z1) - data.ups_z0_z1);
        const double d2 = std::fabs(upsilon_m(v, c_m, pts.z0, pts.zt0) - data.ups_z0_zt0);
        row("A6-upsilon-drift", std::max(d1, d2) < data.delta / 3.0,
            data.delta / 3.0 - std::max(d1, d2));
    }
    // (A-7) tilt-to-squeeze ratio against the Jacobian window
    {
        double ts;
        if (dec.t_mn_log.is_zero())
            ts = 0.0;
        else
            ts = dec.t_mn_log.sign * (dec.s_mn > 0 ? 1 : -1) *
                 std::exp(dec.t_mn_log.log_abs - std::log(std::fabs(dec.s_mn)));
        const bool degenerate = tower.level(0).degenerate;
        double target = 0.0;
        if (!degenerate) {
            const LogMag b = average_jacobian(tower, 1 << 15);
            target = data.a_const *
                     std::exp(std::pow(2.0, m) * b.log_abs - (n - m) * std::log(data.sigma));
        }
        const double err = std::fabs(ts + target);
        const bool sign_ok = degenerate ? true : ts < 0.0;
        row("A7-tilt-ratio", sign_ok && err < data.delta / 3.0, data.delta / 3.0 - err);
    }

    rep.all_pass = true;
    for (const auto& r : rep.rows) rep.all_pass = rep.all_pass && r.pass;
    return rep;
}

double dagger_position(LogMag b, int m, int n, const WellChosenData& data, double sigma, int p) {
    if (b.is_zero() || b.sign < 0) return -std::numeric_limits<double>::infinity();
    const double lhs = std::pow(static_cast<double>(p), m) * b.log_abs - (n - m) * std::log(sigma);
    const double lo = std::log(data.A0), hi = std::log(data.A1);
    return (lhs - lo) / (hi - lo);
}

bool predict_overlap(LogMag b, int m, int n, const WellChosenData& data, double sigma, int p) {
    const double pos = dagger_position(b, m, n, data, sigma, p);
    return pos > 0.0 && pos < 1.0;
}

bool detect_overlap(const RenormTower& tower, const WellChosenData& data, int m, int n,
                    int samples) {
    if (data.w == data.w_tilde) return true;
    Piece pw = piece_for_word(tower, n, data.w, samples);
    Piece pt = piece_for_word(tower, n, data.w_tilde, samples);
    for (Point& z : pw.boundary) z = tower.scope_mn(m, n, z);
    for (Point& z : pt.boundary) z = tower.scope_mn(m, n, z);
    Piece iw = piece_from_points(std::move(pw.boundary), data.w, m);
    Piece it = piece_from_points(std::move(pt.boundary), data.w_tilde, m);
    return horizontal_overlap(iw, it);
}

KeyLemmaCheck key_lemma_check(const RenormTower& tower, const WellChosenData& data, int m, int n,
                              const UniversalData& universal, LogMag b) {
    KeyLemmaCheck out;
    const Point tau = tower.tip(n);
    const AddressedPoints pts = addressed_points(tower, data, n);
    auto to_abs = [&](Point z) { return Point{z.x + tau.x, z.y + tau.y}; };

    const Point zt_abs = to_abs(pts.zt0);
    const double xt = tower.scope_mn(m, n, zt_abs, true).x;
    auto crossing = [&](double t) {
        const Point z = to_abs(Point{pts.z0.x + t * (pts.z1.x - pts.z0.x),
                                     pts.z0.y + t * (pts.z1.y - pts.z0.y)});
        return tower.scope_mn(m, n, z, true).x - xt;
    };
    // scan an extended parameter range for a sign change
    const double t_lo = -2.0, t_hi = 3.0;
    const int scan = 100;
    double prev = crossing(t_lo), prev_t = t_lo;
    double t_root = std::numeric_limits<double>::quiet_NaN();
    for (int i = 1; i <= scan; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / scan;
        double cur;
        try {
            cur = crossing(t);
        } catch (const Error&) {
            prev_t = t;
            continue;
        }
        if ((prev > 0.0) != (cur > 0.0)) {
            double a = prev_t, bb = t;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (a + bb);
                if ((crossing(a) > 0.0) == (crossing(mid) > 0.0))
                    a = mid;
                else
                    bb = mid;
            }
            t_root = 0.5 * (a + bb);
            break;
        }
        prev = cur;
        prev_t = t;
    }
    if (!std::isfinite(t_root))
        throw NoVerticalAlignment("key_lemma_check: no crossing along the z0->z1 path");

    out.z_aligned = Point{pts.z0.x + t_root * (pts.z1.x - pts.z0.x),
                          pts.z0.y + t_root * (pts.z1.y - pts.z0.y)};
    out.zt = pts.zt0;
    out.upsilon_abs = std::fabs(upsilon_star(universal.v_star, out.z_aligned, out.zt));
    const double rho = data.rho_est;
    out.slack = std::max(0.01, data.C_est) * std::max(std::pow(rho, m), std::pow(rho, n - m));
    out.bracket = Interval{out.upsilon_abs - out.slack, out.upsilon_abs + out.slack};
    if (b.is_zero())
        out.ratio = 0.0;
    else
        out.ratio = data.a_const *
                    std::exp(std::pow(2.0, m) * b.log_abs - (n - m) * std::log(data.sigma));
    out.contained = out.ratio > out.bracket.lo && out.ratio < out.bracket.hi;
    out.comparability_log =
        b.is_zero() ? -std::numeric_limits<double>::infinity()
                    : std::pow(2.0, m) * b.log_abs - (n - m) * std::log(data.sigma);
    return out;
}

DistortionReport distortion_report(const RenormTower& tower, const WellChosenData& data, int m,
                                   int n, LogMag b, double sigma, int samples) {
    DistortionReport rep;
    rep.hor = detect_overlap(tower, data, m, n, samples);
    if (!rep.hor) throw OverlapAbsent("distortion_report: Hor(m,n) fails for the chosen words");

    // words 0^m . 1 . 0^{n-m-1} . w at height 0
    auto full_word = [&](const Word& w) {
        std::vector<int> letters(static_cast<size_t>(m), 0);
        letters.push_back(1);
        for (int i = 0; i < n - m - 1; ++i) letters.push_back(0);
        letters.insert(letters.end(), w.letters().begin(), w.letters().end());
        return Word(letters, w.alphabet());
    };
    rep.word_w = full_word(data.w);
    rep.word_wt = full_word(data.w_tilde);

    const Piece pw = piece_for_word(tower, 0, rep.word_w, samples);
    const Piece pt = piece_for_word(tower, 0, rep.word_wt, samples);
    rep.dist = piece_dist(pw, pt);
    rep.diam_w = piece_diam(pw);
    rep.diam_wt = piece_diam(pt);
    const double dmax = std::max(rep.diam_w, rep.diam_wt);
    rep.ratio = dmax > 0.0 ? rep.dist / dmax : 0.0;

    // witness separations: images of the addressed points inside each piece
    if (0 + rep.word_w.length() + data.addr_z0.length() - data.w.length() <= tower.depth() - 1) {
        auto extend = [&](const Word& full_w, const Word& addr) {
            // replace the trailing w by the full point address
            std::vector<int> L(full_w.letters().begin(),
                              full_w.letters().end() - data.w.length());
            L.insert(L.end(), addr.letters().begin(), addr.letters().end());
            return Word(L, addr.alphabet());
        };
        const Point a0 = tower.cantor_point(0, extend(rep.word_w, data.addr_z0));
        const Point a1 = tower.cantor_point(0, extend(rep.word_w, data.addr_z1));
        const Point b0 = tower.cantor_point(0, extend(rep.word_wt, data.addr_zt0));
        const Point b1 = tower.cantor_point(0, extend(rep.word_wt, data.addr_zt1));
        rep.witness_w = dist(a0, a1);
        rep.witness_wt = dist(b0, b1);
        const double wmax = std::max(rep.witness_w, rep.witness_wt);
        rep.ratio_witness = wmax > 0.0 ? rep.dist / wmax : 0.0;
    }

    const double ls = std::log(sigma);
    rep.dist_env_log = 2.0 * m * ls + 2.0 * std::pow(2.0, m) * b.log_abs;
    rep.diam_env_log = m * ls + 2.0 * (n - m) * ls;
    rep.C0_fit = rep.dist / std::exp(rep.dist_env_log);
    rep.C1_fit = dmax / std::exp(rep.diam_env_log);
    return rep;
}

}  // namespace henonlab

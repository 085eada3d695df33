#include "henonlab/paramset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace henonlab {

void CoverConfig::validate() const {
    if (!(0.0 < A0 && A0 < A1)) throw Error("CoverConfig: need 0 < A0 < A1");
    if (!(0.0 < sigma && sigma < 1.0)) throw Error("CoverConfig: need 0 < sigma < 1");
    if (p < 2) throw Error("CoverConfig: need p >= 2");
    if (!(0.0 < b1 && b1 < b0 && b0 <= 1.0)) throw Error("CoverConfig: need 0 < b1 < b0 <= 1");
}

CoverInterval cover_interval(const CoverConfig& cfg, int d, double delta, int m) {
    if (d < 0) throw Error("cover_interval: d must be >= 0");
    if (!(delta > 0.0 && delta <= 1.0)) throw Error("cover_interval: delta in (0,1]");
    CoverInterval I;
    I.d = d;
    I.delta = delta;
    I.m = m;
    const double ls = std::log(cfg.sigma);
    I.lo_log = delta * (d * ls + std::log(cfg.A0));
    I.hi_log = delta * (d * ls + std::log(cfg.A1));
    return I;
}

Regime dichotomy(const CoverConfig& cfg) {
    return cfg.A1 * cfg.sigma >= cfg.A0 ? Regime::Overlapping : Regime::Disjoint;
}

GapInfo gap_between(const CoverConfig& cfg, const CoverInterval& right, const CoverInterval& left) {
    if (left.lo_log > right.hi_log) throw WrongOrder("primed interval lies to the right");
    if (left.hi_log >= right.lo_log) throw NotDisjoint("intervals intersect");
    GapInfo g;
    g.gap = Interval{left.hi(), right.lo()};
    const double ls = std::log(cfg.sigma);
    const double d_delta = right.d * right.delta;
    const double dp_deltap = left.d * left.delta;
    g.length_formula = std::exp(d_delta * ls) *
                       (std::exp(right.delta * std::log(cfg.A0)) -
                        std::exp((dp_deltap - d_delta) * ls + left.delta * std::log(cfg.A1)));
    return g;
}

DRange d_range(const CoverConfig& cfg, const CoverInterval& right, const CoverInterval& left,
               double delta_pp) {
    if (!(delta_pp < std::min(right.delta, left.delta)))
        throw Error("d_range: delta'' must be below both bounding deltas");
    (void)gap_between(cfg, right, left);  // validates disjointness and order
    const double a0 = cfg.alpha0(), a1 = cfg.alpha1();
    const double hi = (left.delta / delta_pp) * (left.d + a1) - a0;
    const double lo = (right.delta / delta_pp) * (right.d + a0) - a1;
    DRange r;
    r.d_max = static_cast<long>(std::floor(hi + 1e-12));
    r.d_min = static_cast<long>(std::ceil(lo - 1e-12));
    if (r.d_min < 0) r.d_min = 0;
    return r;
}

double quotient_threshold(double sigma, double P, double Q) {
    if (!(sigma > 0.0 && sigma <= 1.0)) throw Error("quotient_threshold: sigma in (0,1]");
    if (!(0.0 < Q && Q < P)) throw Error("quotient_threshold: need 0 < Q < P as applied");
    if (sigma == 1.0) return 1e18;
    auto quot = [&](double s) {
        return (std::pow(sigma, s) * P - std::pow(sigma, -s) * Q) / (P - Q);
    };
    double hi = 1.0;
    while (quot(hi) > 0.5 && hi < 1e17) hi *= 2.0;
    if (hi >= 1e17) return 1e18;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (quot(mid) > 0.5)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double gap_fill_L(const CoverConfig& cfg) {
    return 0.25 * std::fabs(1.0 / std::log(cfg.sigma)) * (1.0 - cfg.A0 / cfg.A1);
}

GapFill gap_fill(const CoverConfig& cfg, const CoverInterval& right, const CoverInterval& left,
                 double delta_pp, int m_pp) {
    GapFill out;
    const GapInfo gi = gap_between(cfg, right, left);
    out.gap_length = gi.gap.length();
    out.L_constant = gap_fill_L(cfg);

    const DRange dr = d_range(cfg, right, left, delta_pp);
    if (dr.empty()) return out;

    const double ls = std::log(cfg.sigma);
    out.intervals.reserve(static_cast<size_t>(dr.d_max - dr.d_min + 1));
    for (long d = dr.d_min; d <= dr.d_max; ++d) {
        out.intervals.push_back(cover_interval(cfg, static_cast<int>(d), delta_pp, m_pp));
        out.covered_direct += out.intervals.back().diam();
    }
    out.covered_closed_form =
        (std::pow(cfg.A1, delta_pp) - std::pow(cfg.A0, delta_pp)) *
        (std::exp(dr.d_min * delta_pp * ls) - std::exp((dr.d_max + 1) * delta_pp * ls)) /
        (1.0 - std::pow(cfg.sigma, delta_pp));
    out.L_bound_ok = out.covered_direct >= out.L_constant * out.gap_length;
    return out;
}

namespace {

// Open gap bounded by two placed intervals; the formula machinery applies to
// mixed (d,delta) pairs, so refinement never leaks edge slivers.
struct PendingGap {
    CoverInterval left;
    CoverInterval right;
    double length() const { return right.lo() - left.hi(); }
};

}  // namespace

Cover build_cover(const CoverConfig& cfg, int stages, int refinements_per_stage, int m_limit) {
    cfg.validate();
    Cover cover;
    cover.cfg = cfg;
    cover.regime = dichotomy(cfg);
    cover.T_measure = cfg.b0 - cfg.b1;
    const Interval T{cfg.b1, cfg.b0};

    if (cover.regime == Regime::Overlapping) {
        // consecutive intervals intersect; one pass of any admissible delta
        // covers the window
        CoverStage st;
        Refinement ref;
        ref.m = 1;
        ref.delta = cfg.delta_of_m(1);
        ref.uncovered_before = cover.T_measure;
        double hi_reached = -1.0;
        for (int d = 0;; ++d) {
            CoverInterval I = cover_interval(cfg, d, ref.delta, 1);
            if (I.hi() < cfg.b1) break;
            if (I.lo() > cfg.b0) continue;
            ref.placed.push_back(I);
            hi_reached = std::max(hi_reached, I.hi());
            if (d > 100000) throw Error("build_cover: runaway overlapping placement");
        }
        if (hi_reached < cfg.b0)
            throw Error("build_cover: A1^delta below b0; overlapping cover cannot reach the window top");
        ref.covered_added = cover.T_measure;
        ref.uncovered_after = 0.0;
        ref.max_gap_length = 0.0;
        std::sort(ref.placed.begin(), ref.placed.end(),
                  [](const CoverInterval& a, const CoverInterval& b) { return a.lo_log < b.lo_log; });
        st.refinements.push_back(std::move(ref));
        cover.stages.push_back(std::move(st));
        return cover;
    }

    std::set<int> used_m;
    const double L = gap_fill_L(cfg);

    for (int s = 0; s < stages; ++s) {
        CoverStage st;
        std::vector<PendingGap> gaps;

        // initial pass: coarse delta in this stage's residue class covering T
        int m0 = -1;
        for (int m = s; m <= m_limit; ++m) {
            if (used_m.count(m)) continue;
            if (std::pow(cfg.A1, cfg.delta_of_m(m)) < cfg.b0) continue;  // cannot reach the top
            m0 = m;
            break;
        }
        if (m0 < 0) throw ThresholdNotFound("no admissible initial delta for stage " + std::to_string(s));
        used_m.insert(m0);

        Refinement first;
        first.m = m0;
        first.delta = cfg.delta_of_m(m0);
        first.uncovered_before = cover.T_measure;
        std::vector<CoverInterval> placed0;
        for (int d = 0;; ++d) {
            CoverInterval I = cover_interval(cfg, d, first.delta, m0);
            if (I.hi() < cfg.b1) break;
            placed0.push_back(I);
            if (d > 2000000) throw Error("build_cover: runaway initial placement");
        }
        std::reverse(placed0.begin(), placed0.end());  // ascending in b
        double covered0 = 0.0;
        for (size_t i = 0; i < placed0.size(); ++i) {
            const Interval clip{std::max(placed0[i].lo(), T.lo), std::min(placed0[i].hi(), T.hi)};
            if (clip.hi > clip.lo) {
                covered0 += clip.length();
                first.placed.push_back(placed0[i]);
            }
            if (i + 1 < placed0.size()) {
                PendingGap g{placed0[i], placed0[i + 1]};
                // track only gaps strictly inside T; boundary remnants are
                // booked once into edge_remnant
                if (g.left.hi() >= T.lo && g.right.lo() <= T.hi && g.length() > 0.0) {
                    gaps.push_back(g);
                    first.max_gap_length = std::max(first.max_gap_length, g.length());
                }
            }
        }
        double gap_measure = 0.0;
        for (const auto& g : gaps) gap_measure += g.length();
        st.edge_remnant = cover.T_measure - covered0 - gap_measure;
        first.covered_added = covered0;
        first.uncovered_after = cover.T_measure - covered0;
        st.refinements.push_back(std::move(first));

        // refinement passes
        for (int r = 1; r < refinements_per_stage; ++r) {
            if (gaps.empty()) break;
            double uncov = 0.0;
            for (const auto& g : gaps) uncov += g.length();

            // smallest unused m in this stage's residue class whose delta''
            // is admissible for gaps holding >= 98% of the uncovered measure
            int m_sel = -1;
            for (int m = s; m <= m_limit; ++m) {
                if (used_m.count(m)) continue;
                const double dpp = cfg.delta_of_m(m);
                bool any_too_coarse_delta = false;
                double admissible_measure = 0.0;
                for (const auto& g : gaps) {
                    if (dpp >= std::min(g.left.delta, g.right.delta)) {
                        any_too_coarse_delta = true;
                        break;
                    }
                    const double P = g.right.lo();
                    const double Q = g.left.hi();
                    if (dpp < quotient_threshold(cfg.sigma, P, Q)) {
                        GapFill trial = gap_fill(cfg, g.right, g.left, dpp, m);
                        if (trial.L_bound_ok) admissible_measure += g.length();
                    }
                }
                if (any_too_coarse_delta) continue;
                if (admissible_measure >= 0.98 * uncov) {
                    m_sel = m;
                    break;
                }
            }
            if (m_sel < 0)
                throw ThresholdNotFound("stage " + std::to_string(s) + " refinement " + std::to_string(r) +
                                        ": no delta below m_limit contracts the gap set");
            used_m.insert(m_sel);

            Refinement ref;
            ref.m = m_sel;
            ref.delta = cfg.delta_of_m(m_sel);
            ref.uncovered_before = uncov;

            std::vector<PendingGap> next_gaps;
            double covered = 0.0;
            for (const auto& g : gaps) {
                GapFill fill;
                bool processed = false;
                if (ref.delta < std::min(g.left.delta, g.right.delta) &&
                    ref.delta < quotient_threshold(cfg.sigma, g.right.lo(), g.left.hi())) {
                    fill = gap_fill(cfg, g.right, g.left, ref.delta, m_sel);
                    processed = fill.L_bound_ok && !fill.intervals.empty();
                }
                if (!processed) {
                    next_gaps.push_back(g);  // too small for this pass; retry later
                    ref.max_gap_length = std::max(ref.max_gap_length, g.length());
                    continue;
                }
                // fill.intervals ascend in d, i.e. descend in b
                covered += fill.covered_direct;
                CoverInterval right_neighbor = g.right;
                for (const CoverInterval& I : fill.intervals) {
                    PendingGap ng{I, right_neighbor};
                    if (ng.length() > 0.0) {
                        next_gaps.push_back(ng);
                        ref.max_gap_length = std::max(ref.max_gap_length, ng.length());
                    }
                    right_neighbor = I;
                    ref.placed.push_back(I);
                }
                PendingGap ng{g.left, right_neighbor};
                if (ng.length() > 0.0) {
                    next_gaps.push_back(ng);
                    ref.max_gap_length = std::max(ref.max_gap_length, ng.length());
                }
            }
            ref.covered_added = covered;
            ref.uncovered_after = uncov - covered;
            gaps = std::move(next_gaps);
            st.refinements.push_back(std::move(ref));
            if (st.refinements.back().placed.size() > 4000000)
                throw Error("build_cover: placement budget exceeded");
        }

        for (const auto& g : gaps) st.final_gaps.push_back(Interval{g.left.hi(), g.right.lo()});
        for (auto& ref : st.refinements)
            std::sort(ref.placed.begin(), ref.placed.end(),
                      [](const CoverInterval& a, const CoverInterval& b) { return a.lo_log < b.lo_log; });
        cover.stages.push_back(std::move(st));
    }
    return cover;
}

std::vector<MembershipHit> membership(double b, const Cover& cover) {
    // placed arrays are sorted by left endpoint and pairwise disjoint within a
    // refinement, so one binary search per refinement suffices
    std::vector<MembershipHit> hits;
    if (b <= 0.0) return hits;
    const double blog = std::log(b);
    for (size_t s = 0; s < cover.stages.size(); ++s) {
        const CoverStage& st = cover.stages[s];
        for (size_t r = 0; r < st.refinements.size(); ++r) {
            const auto& placed = st.refinements[r].placed;
            auto it = std::upper_bound(placed.begin(), placed.end(), blog,
                                       [](double v, const CoverInterval& I) { return v < I.lo_log; });
            if (it == placed.begin()) continue;
            --it;
            if (it->hi_log >= blog)
                hits.push_back({static_cast<int>(s), static_cast<int>(r), it->d, it->m, it->delta});
        }
    }
    return hits;
}

double choose_b_for_overlap(const CoverConfig& cfg, int m, int n) {
    if (!(m < n)) throw Error("choose_b_for_overlap: need m < n");
    const double pm = std::pow(static_cast<double>(cfg.p), m);
    return std::exp(((n - m) * std::log(cfg.sigma) + 0.5 * (std::log(cfg.A0) + std::log(cfg.A1))) / pm);
}

}  // namespace henonlab

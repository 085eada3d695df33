#pragma once

#include <optional>
#include <vector>

#include "henonlab/core.hpp"

namespace henonlab {

// Interval family I_{d,delta} = [sigma^{d delta} A0^delta, sigma^{d delta} A1^delta]
// covering average-Jacobian parameters; endpoints kept in log form.
struct CoverConfig {
    double A0 = 1.0;
    double A1 = 2.0;
    double sigma = 0.4;
    int p = 2;
    double b1 = 0.05;  // parameter window [b1, b0]
    double b0 = 0.9;

    void validate() const;
    double alpha0() const { return std::log(A0) / std::log(sigma); }
    double alpha1() const { return std::log(A1) / std::log(sigma); }
    double delta_of_m(int m) const { return std::pow(static_cast<double>(p), -m); }
};

struct CoverInterval {
    int d = 0;
    double delta = 1.0;
    int m = 0;  // delta = p^-m
    double lo_log = 0.0, hi_log = 0.0;

    double lo() const { return std::exp(lo_log); }
    double hi() const { return std::exp(hi_log); }
    double diam() const { return hi() - lo(); }
    bool contains(double b) const { return b >= lo() && b <= hi(); }
};

CoverInterval cover_interval(const CoverConfig& cfg, int d, double delta, int m = 0);

enum class Regime { Overlapping, Disjoint };

// Overlapping iff A1 * sigma >= A0; then consecutive I_{d+1,delta}, I_{d,delta}
// intersect for every d and delta, otherwise they are always disjoint.
Regime dichotomy(const CoverConfig& cfg);

// Open gap between disjoint intervals, the primed one to the left.
struct GapInfo {
    Interval gap;               // (hi of left interval, lo of right interval)
    double length_formula = 0;  // sigma^{d delta} (A0^delta - sigma^{d'delta'-d delta} A1^{delta'})
};

GapInfo gap_between(const CoverConfig& cfg, const CoverInterval& right, const CoverInterval& left);

// Admissible depth range for I_{d'',delta''} strictly between the gap's
// bounding intervals: d_max = floor((delta'/delta'')(d'+alpha1) - alpha0),
// d_min = ceil((delta/delta'')(d+alpha0) - alpha1). Empty range is a value,
// not an error.
struct DRange {
    long d_min = 0;
    long d_max = -1;
    bool empty() const { return d_min > d_max; }
};

DRange d_range(const CoverConfig& cfg, const CoverInterval& right, const CoverInterval& left,
               double delta_pp);

struct GapFill {
    std::vector<CoverInterval> intervals;
    double covered_closed_form = 0.0;  // geometric-sum formula
    double covered_direct = 0.0;       // straight summation of diameters
    double gap_length = 0.0;
    double L_constant = 0.0;  // (1/4)|1/log sigma|(1 - A0/A1)
    bool L_bound_ok = false;  // covered >= L * gap
};

// Fill the gap with all I_{d'',delta''}; requires delta'' below the quotient
// threshold; throws ThresholdNotFound only from the cover driver.
GapFill gap_fill(const CoverConfig& cfg, const CoverInterval& right, const CoverInterval& left,
                 double delta_pp, int m_pp);

// Largest s such that 1/2 < (sigma^s P - sigma^{-s} Q)/(P - Q) for all smaller s.
// Applied with P the right gap edge and Q the left one (P > Q as used in the
// gap filling estimate).
double quotient_threshold(double sigma, double P, double Q);

double gap_fill_L(const CoverConfig& cfg);

// One refinement pass of one stage: a delta value together with the intervals
// placed into every open gap, and the measure ledger entries.
struct Refinement {
    int m = 0;
    double delta = 0.0;
    std::vector<CoverInterval> placed;
    double uncovered_before = 0.0;
    double uncovered_after = 0.0;
    double covered_added = 0.0;
    double max_gap_length = 0.0;  // density proxy
};

struct CoverStage {
    std::vector<Refinement> refinements;
    std::vector<Interval> final_gaps;  // open gaps remaining inside T
    double edge_remnant = 0.0;         // |T| not inside gaps nor placed intervals
};

struct Cover {
    CoverConfig cfg;
    Regime regime = Regime::Disjoint;
    std::vector<CoverStage> stages;
    double T_measure = 0.0;
};

// Staged construction of the full-measure cover. In the Overlapping regime a
// single trivial stage covers everything. `m_limit` bounds the admissible
// delta = p^-m ladder; ThresholdNotFound if a gap cannot be contracted.
Cover build_cover(const CoverConfig& cfg, int stages, int refinements_per_stage, int m_limit = 60);

struct MembershipHit {
    int stage = 0;
    int refinement = 0;
    int d = 0;
    int m = 0;
    double delta = 0.0;
};

std::vector<MembershipHit> membership(double b, const Cover& cover);

// Log-midpoint of the (dagger) window: the b whose ratio b^{p^m}/sigma^{n-m}
// sits at the geometric center of [A0, A1].
double choose_b_for_overlap(const CoverConfig& cfg, int m, int n);

}  // namespace henonlab

#pragma once

#include <array>
#include <string>
#include <vector>

#include "henonlab/geometry.hpp"
#include "henonlab/henon.hpp"

namespace henonlab {

// Slope quotient of the universal function between two planar points:
// Upsilon_*(z, z~) = (v(x~) - v(x)) / (y~ - y). Throws when the pair is
// vertically degenerate.
double upsilon_star(const Cheb1D& v, Point z, Point zt);

// Upsilon_m = Upsilon_* - c_m (y~ + y).
double upsilon_m(const Cheb1D& v, double c_m, Point z, Point zt);

// Output of the well-chosen-word search on the fixed-point Cantor set.
// Points are in tip-centered coordinates; addresses are height-free words.
struct WellChosenData {
    Word w{{0}, Alphabet{2}};        // left sibling cylinder
    Word w_tilde{{1}, Alphabet{2}};  // right sibling, differs in last letter
    Point z0, z1, zt0, zt1;
    Word addr_z0{{0}, Alphabet{2}}, addr_z1{{0}, Alphabet{2}};
    Word addr_zt0{{0}, Alphabet{2}}, addr_zt1{{0}, Alphabet{2}};
    std::array<double, 5> kappa{};  // kappa0..kappa4
    double delta = 0.0;
    Interval M, M_delta;
    double A0 = 0.0, A1 = 0.0;
    int N = 0;            // class-A entry threshold for n - m
    bool N_clamped = false;
    double a_const = 0.0;  // calibration used to convert the Upsilon window
    double sigma = 0.0;
    double C_est = 0.0, rho_est = 0.0;
    std::string side;  // which side of the critical point carries the window

    double ups_z0_z1 = 0.0;   // Upsilon_*(z0, z1)
    double ups_z0_zt0 = 0.0;  // Upsilon_*(z0, zt0)
    double ups_zt0_zt1 = 0.0;
};

// Locates the concavity window of v_* o f_* around the critical point, picks
// Cantor points on one side satisfying the ordering and well-placedness
// conditions, and derives the kappa constants, delta, M_delta and the
// (dagger) window [A0, A1].
WellChosenData find_well_chosen(const UniversalData& universal, const UnimodalMap& fstar,
                                int max_depth);

struct ClassARow {
    std::string name;
    bool pass = false;
    double slack = 0.0;  // positive: margin held; negative: violated by |slack|
};

struct ClassAReport {
    int m = 0, n = 0;
    bool parity_ok = false;
    std::vector<ClassARow> rows;
    bool all_pass = false;
};

ClassAReport class_a_check(const RenormTower& tower, const WellChosenData& data, int m, int n,
                           const UniversalData& universal);

// (dagger): log A0 < p^m log b - (n-m) log sigma < log A1, all in log domain.
bool predict_overlap(LogMag b, int m, int n, const WellChosenData& data, double sigma, int p);
// Signed position inside the (dagger) window: 0 at the lower edge, 1 at the
// upper edge (log scale); predictor true iff in (0,1).
double dagger_position(LogMag b, int m, int n, const WellChosenData& data, double sigma, int p);

// Horizontal overlap of the Psi_{m,n}-images of the canonical pieces of the
// chosen sibling words at height n.
bool detect_overlap(const RenormTower& tower, const WellChosenData& data, int m, int n,
                    int samples = 256);

struct KeyLemmaCheck {
    Point z_aligned, zt;    // the vertically aligned pair (tip-centered at height n)
    double upsilon_abs = 0.0;
    double slack = 0.0;     // C max(rho^m, rho^{n-m})
    Interval bracket;       // [ |Upsilon| - slack, |Upsilon| + slack ]
    double ratio = 0.0;     // a b^{p^m} / sigma^{n-m}
    bool contained = false;
    double comparability_log = 0.0;  // p^m log b - (n-m) log sigma
};

// Finds a pair whose Psi_{m,n}-images share a vertical line by root-finding
// along the segment z0 -> z1, then brackets |Upsilon_*| against the Jacobian
// ratio. Throws NoVerticalAlignment when no crossing exists.
KeyLemmaCheck key_lemma_check(const RenormTower& tower, const WellChosenData& data, int m, int n,
                              const UniversalData& universal, LogMag b);

struct DistortionReport {
    Word word_w{{0}, Alphabet{2}}, word_wt{{1}, Alphabet{2}};
    double dist = 0.0;
    double diam_w = 0.0, diam_wt = 0.0;  // sampled hulls (outer)
    double ratio = 0.0;                  // dist / max hull diam
    // separations of the addressed witness pairs inside each piece (the
    // lower-bound objects of the diameter estimate; inner approximation)
    double witness_w = 0.0, witness_wt = 0.0;
    double ratio_witness = 0.0;
    // predicted envelope shapes (no constant), log domain
    double dist_env_log = 0.0;  // 2m log sigma + 2 p^m log b
    double diam_env_log = 0.0;  // m log sigma + 2(n-m) log sigma
    // fitted envelope constants: measured / shape
    double C0_fit = 0.0, C1_fit = 0.0;
    bool hor = false;
};

// Depth-(n + |w|) pieces 0^m.1.0^{n-m-1}.w at height 0 and their metrics;
// requires the detector to fire (OverlapAbsent otherwise).
DistortionReport distortion_report(const RenormTower& tower, const WellChosenData& data, int m,
                                   int n, LogMag b, double sigma, int samples = 256);

}  // namespace henonlab

#include "doctest.h"

#include <cmath>

#include "henonlab/unimodal.hpp"

using namespace henonlab;

namespace {
const FixedPointResult& fstar_cached() {
    static FixedPointResult r = solve_fixed_point(40, 1e-9);
    return r;
}
}  // namespace

TEST_SUITE("unimodal") {

TEST_CASE("quadratic family is U-normalized across the window") {
    for (double a : {1.05, 1.2, 1.3, 1.401155}) {
        UnimodalMap f = quadratic_family(a);
        CHECK(std::fabs(f.c1 - 1.0) < 1e-12);
        CHECK(std::fabs(f.c2 + 1.0) < 1e-12);
        CHECK(f.c0 == doctest::Approx((a - 2.0) / a).epsilon(1e-10));
    }
    // below a = 1 the critical point leaves the dynamical interval
    CHECK_THROWS_AS(quadratic_family(0.6), Error);
}

TEST_CASE("renormalization returns a normalized U-map") {
    UnimodalMap f = quadratic_family(1.35);
    UnimodalMap rf = renormalize_unimodal(f);
    CHECK(std::fabs(rf.c1 - 1.0) < 1e-10);
    CHECK(std::fabs(rf.c2 + 1.0) < 1e-10);
}

TEST_CASE("non-renormalizable parameters are rejected") {
    // two-band structure not yet formed / one-band chaos: the central
    // interval meets its image
    CHECK_THROWS_AS(renormalize_unimodal(quadratic_family(1.6)), NotRenormalizable);
    CHECK_THROWS_AS(renormalize_unimodal(quadratic_family(1.9)), NotRenormalizable);
}

TEST_CASE("superstable cascade and delta estimate") {
    FeigenbaumOracle o = feigenbaum_oracle(12);
    REQUIRE(o.superstable.size() >= 10);
    CHECK(o.superstable[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o.delta_est == doctest::Approx(4.6692).epsilon(2e-3));
    CHECK(o.a_star == doctest::Approx(1.4011551890).epsilon(1e-8));
    CHECK(o.lambda == doctest::Approx(0.3995352805).epsilon(1e-4));
}

TEST_CASE("fixed point: residual below tolerance and lambda cross-checked") {
    const FixedPointResult& r = fstar_cached();
    CHECK(r.residual < 1e-9);
    CHECK(std::fabs(r.fstar(r.fstar.c0) - 1.0) < 1e-10);

    FeigenbaumOracle o = feigenbaum_oracle(13);
    CHECK(std::fabs(r.lambda - o.lambda) < 1e-6);
}

TEST_CASE("fixed point is its own renormalization") {
    const FixedPointResult& r = fstar_cached();
    UnimodalMap rf = renormalize_unimodal(r.fstar);
    double m = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = -1.0 + 2.0 * i / 200.0;
        m = std::max(m, std::fabs(rf(x) - r.fstar(x)));
    }
    CHECK(m < 1e-9);
}

TEST_CASE("lambda stable between degrees 30 and 40") {
    FixedPointResult r30 = solve_fixed_point(30, 1e-8);
    const FixedPointResult& r40 = fstar_cached();
    CHECK(std::fabs(r30.lambda - r40.lambda) < 1e-8);
}

TEST_CASE("residual decreases along the degree ladder") {
    double prev = 1.0;
    for (int d : {10, 20, 30, 40}) {
        FixedPointResult r = solve_fixed_point(d, d == 10 ? 1e-3 : 1e-6);
        CHECK(r.residual < prev * 1.01);
        prev = r.residual;
    }
}

TEST_CASE("cylinders: definition checks at small depth") {
    const UnimodalMap& fs = fstar_cached().fstar;
    CylinderFamily1D fam = cylinders_1d(fs, 2);
    Alphabet p2{2};
    const Interval J0 = fam.at(Word({0}, p2));
    const Interval J1 = fam.at(Word({1}, p2));
    CHECK(J0.contains(fs.c0));
    CHECK(!J0.intersects(J1));
    // dynamics at depth 1: image of the central interval is the other one
    Interval img = unimodal_interval_image(fs, J0);
    CHECK(img.lo == doctest::Approx(J1.lo).epsilon(1e-9));
    CHECK(img.hi == doctest::Approx(J1.hi).epsilon(1e-9));
    // nesting
    CHECK(J0.contains(fam.at(Word({0, 0}, p2)), 1e-12));
}

TEST_CASE("cylinders: dynamics, disjointness, nesting at depth 6") {
    const UnimodalMap& fs = fstar_cached().fstar;
    CylinderFamily1D fam = cylinders_1d(fs, 6);
    Alphabet p2{2};
    for (const auto& [w, J] : fam.cyl) {
        // nesting in the parent
        if (w.length() >= 2) {
            std::vector<int> parent(w.letters().begin(), w.letters().end() - 1);
            CHECK(fam.at(Word(parent, p2)).contains(J, 1e-10));
        }
        // dynamics (hull image); full carry jumps one level deeper
        Interval img = unimodal_interval_image(fs, J);
        Word next = w.successor();
        if (next.length() == w.length()) {
            const Interval& Jn = fam.at(next);
            CHECK(std::fabs(img.lo - Jn.lo) < 1e-8);
            CHECK(std::fabs(img.hi - Jn.hi) < 1e-8);
        } else if (next.length() <= fam.depth) {
            CHECK(img.contains(fam.at(next), 1e-8));
        }
    }
    // same-length disjointness
    for (const auto& [w, J] : fam.cyl)
        for (const auto& [v, K] : fam.cyl)
            if (w.length() == v.length() && !(w == v)) CHECK(interval_gap(J, K) > 0.0);
}

TEST_CASE("a priori bounds report") {
    const UnimodalMap& fs = fstar_cached().fstar;
    CylinderFamily1D f5 = cylinders_1d(fs, 5);
    CylinderFamily1D f6 = cylinders_1d(fs, 6);
    AprioriReport r5 = apriori_report(f5);
    AprioriReport r6 = apriori_report(f6);
    CHECK(r6.k0 > 0.0);
    CHECK(r6.k0 < r6.k1);
    CHECK(r6.k1 < 1.0);
    CHECK(r6.L > 1.0);
    // beau-ness proxy: stable between depths
    CHECK(std::fabs(r5.k0 - r6.k0) / r6.k0 < 0.10);
    CHECK(std::fabs(r5.k1 - r6.k1) / r6.k1 < 0.10);

    CylinderFamily1D f1 = cylinders_1d(fs, 1);
    CHECK_THROWS_AS(apriori_report(f1), Error);
}

TEST_CASE("cylinder depth failure reports the failing level") {
    // renormalizable a bounded number of times only
    UnimodalMap f = quadratic_family(1.39);
    try {
        cylinders_1d(f, 6);
        FAIL("expected DepthUnreachable");
    } catch (const DepthUnreachable& e) {
        CHECK(e.level >= 1);
        CHECK(e.level <= 5);
    }
}

TEST_CASE("cantor points: address composition agrees with cylinders") {
    const UnimodalMap& fs = fstar_cached().fstar;
    UnimodalTower tower = unimodal_tower(fs, 8);
    CylinderFamily1D fam = cylinders_1d(fs, 6);
    Alphabet p2{2};
    // the point of address w.0^inf lies in the cylinder of every prefix of w.0^k
    for (const Word& w : {Word({1, 0, 1}, p2), Word({0, 1, 1}, p2), Word({1, 1, 0, 1}, p2)}) {
        const double x = cantor_point_1d(tower, w);
        Word ext = w;
        while (ext.length() < 6) ext = ext.append(0);
        CHECK(fam.at(ext).contains(x, 1e-9));
    }
    // address 0^inf is the critical point
    CHECK(cantor_point_1d(tower, Word::zeros(3, p2)) == doctest::Approx(fs.c0).epsilon(1e-10));
}

}  // TEST_SUITE

#include "doctest.h"

#include <cmath>
#include <random>

#include "henonlab/henon.hpp"

using namespace henonlab;


namespace {
const FixedPointResult& fstar() {
    static FixedPointResult r = solve_fixed_point(40, 1e-9);
    return r;
}

// towers over tuned infinitely renormalizable maps, shared across cases
const RenormTower& thick_tower() {  // b = 0.08, pure shape, depth 10
    static RenormTower t = build_tower(tune_renormalizable(0.08, EpsShape::PureY, 11).map, 10);
    return t;
}
const RenormTower& thin_tower() {  // b = 0.05, pure shape, depth 5
    static RenormTower t = build_tower(tune_renormalizable(0.05, EpsShape::PureY, 6).map, 5);
    return t;
}
const RenormTower& tilted_tower() {  // b = 0.05, tilted shape, depth 3
    static RenormTower t = build_tower(tune_renormalizable(0.05, EpsShape::TiltedY, 4).map, 3);
    return t;
}

double grid_map_distance(const HenonLikeMap& A, const HenonLikeMap& B, int g = 50) {
    double m = 0.0;
    for (int i = 0; i <= g; ++i) {
        const double x = -1.0 + 2.0 * i / g;
        for (int j = 0; j <= g; ++j) {
            const double y = -1.0 + 2.0 * j / g;
            m = std::max(m, std::fabs(A.phi(x, y) - B.phi(x, y)));
        }
    }
    return m;
}
}  // namespace

TEST_SUITE("henon") {

TEST_CASE("apply and jacobian basics") {
    HenonLikeMap D = embed_unimodal(fstar().fstar);
    const Point z{0.3, -0.4};
    const Point w = D.apply(z);
    CHECK(w.x == doctest::Approx(fstar().fstar(0.3)).epsilon(1e-14));
    CHECK(w.y == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(D.jacobian(z) == 0.0);

    HenonLikeMap F = thickened_map(fstar().fstar, 0.05);
    // on the axis y = 0 the thickening vanishes
    CHECK(F.phi(0.3, 0.0) == doctest::Approx(fstar().fstar(0.3)).epsilon(1e-12));
    CHECK(F.jacobian({0.2, 0.7}) == doctest::Approx(0.05).epsilon(1e-12));

    // generic thickening: jacobian matches a central finite difference of F
    HenonLikeMap G = thickened_map(fstar().fstar, 0.05, EpsShape::TiltedY);
    const double h = 1e-6;
    const double fd = (G.phi(0.2, 0.7 + h) - G.phi(0.2, 0.7 - h)) / (2 * h);
    CHECK(G.jacobian({0.2, 0.7}) == doctest::Approx(std::fabs(fd)).epsilon(1e-6));

    CHECK_THROWS_AS(G.apply({1.5, 0.0}), OutOfDomain);
}

TEST_CASE("degenerate renormalization commutes with the unimodal operator") {
    for (double a : {1.32, 1.35, 1.38, 1.40, 1.4011551890920506}) {
        UnimodalMap f = quadratic_family(a);
        auto [RF, psi] = renormalize_henon(embed_unimodal(f));
        HenonLikeMap target = embed_unimodal(renormalize_unimodal(f));
        CHECK(grid_map_distance(RF, target) < 1e-8);
        CHECK(RF.degenerate);
    }
}

TEST_CASE("thickness contracts under renormalization") {
    HenonLikeMap F = thickened_map(fstar().fstar, 1e-4);
    auto [RF, psi] = renormalize_henon(F);
    CHECK(!RF.degenerate);
    CHECK(RF.eps_bound < F.eps_bound);
    CHECK(RF.eps_bound < 5.0 * 1e-8);  // quadratic contraction, C eps^2
}

TEST_CASE("thickness precondition") {
    HenonOptions opt;
    opt.eps_bound_max = 0.02;
    HenonLikeMap F = thickened_map(fstar().fstar, 0.05, EpsShape::PureY, opt);
    CHECK_THROWS_AS(renormalize_henon(F, opt), ThicknessTooLarge);
}

TEST_CASE("fixed-point tower: all levels equal, tips on the critical curve") {
    HenonLikeMap D = embed_unimodal(fstar().fstar);
    RenormTower t = build_tower(D, 6);
    REQUIRE(t.depth() == 7);
    for (int n = 1; n < t.depth(); ++n) CHECK(grid_map_distance(t.level(0), t.level(n)) < 1e-8);
    // tau = (f(y_tau), y_tau): x-coordinate equals f* of y-coordinate
    for (int n = 0; n < t.depth(); ++n) {
        const Point tau = t.tip(n);
        CHECK(std::fabs(tau.x - fstar().fstar(tau.y)) < 1e-8);
    }
    // tip is fixed by the scope maps
    const Point img = t.psi[0].apply_exact(t.tip(1));
    CHECK(dist(img, t.tip(0)) < 1e-10);
    // tip x-coordinate is the critical value, y the critical point
    CHECK(t.tip(0).x == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(t.tip(0).y == doctest::Approx(fstar().fstar.c0).epsilon(1e-7));
}

TEST_CASE("N=0 tower holds only the base map") {
    RenormTower t = build_tower(embed_unimodal(fstar().fstar), 0);
    CHECK(t.depth() == 1);
    CHECK_THROWS_AS(t.tip(0), InsufficientDepth);
}

TEST_CASE("thickened tower: eps ladder decreases strictly") {
    const RenormTower& t = thick_tower();
    int nontrivial = 0;
    for (int n = 1; n < t.depth(); ++n) {
        if (t.level(n).degenerate) break;
        CHECK(t.level(n).eps_bound < t.level(n - 1).eps_bound);
        ++nontrivial;
    }
    CHECK(nontrivial >= 5);
}

TEST_CASE("average jacobian: constant integrand is exact") {
    const LogMag b = average_jacobian(thin_tower(), 4096);
    CHECK(b.value() == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("average jacobian: tilted shape against a long-orbit oracle") {
    const RenormTower& t = tilted_tower();
    const LogMag b_main = average_jacobian(t, 1 << 15);
    const LogMag b_oracle = average_jacobian(t, 1 << 20);  // >= 10^6 iterates
    CHECK(std::fabs(b_main.value() / b_oracle.value() - 1.0) < 1e-5);
}

TEST_CASE("average jacobian: degenerate map has none") {
    RenormTower t = build_tower(embed_unimodal(fstar().fstar), 2);
    CHECK_THROWS_AS(average_jacobian(t, 4096), JacobianVanished);
}

TEST_CASE("b(F_n) = b^(p^n) down the tower") {
    const RenormTower& t = thin_tower();
    const LogMag b0 = average_jacobian(t, 1 << 14, 0);
    for (int n = 1; n <= 4; ++n) {
        if (t.level(n).degenerate) break;
        const LogMag bn = average_jacobian(t, 1 << 14, n);
        const double expected = std::pow(2.0, n) * b0.log_abs;
        CHECK(std::fabs(bn.log_abs / expected - 1.0) < 1e-4);
    }
}

TEST_CASE("scope decomposition: triangular form and exactness") {
    const RenormTower& t = thick_tower();
    for (int m : {1, 2}) {
        for (int n : {m + 2, m + 4}) {
            ScopeDecomposition d = scope_decomposition(t, m, n);
            CHECK(d.recon_error < 1e-10);
            CHECK(d.r_at_tip < 1e-10);
            CHECK(d.dr_at_tip < 1e-8);
            CHECK(d.fit_error < 1e-7);
            // tilt negative, squeeze sign alternates with n-m
            CHECK(d.t_mn < 0.0);
            CHECK((d.s_mn > 0.0) == ((n - m) % 2 == 0));
            CHECK(std::fabs(d.sigma_mn) < 1.0);
        }
    }
}

TEST_CASE("scope scaling approaches the 1-D rescaling factor") {
    RenormTower t = build_tower(embed_unimodal(fstar().fstar), 8);
    ScopeDecomposition d = scope_decomposition(t, 2, 7);
    const double est = std::pow(std::fabs(d.sigma_mn), 1.0 / (7 - 2));
    CHECK(std::fabs(est - fstar().lambda) / fstar().lambda < 0.02);
}

TEST_CASE("semigroup property of scope maps") {
    const RenormTower& t = thick_tower();
    for (int i = 0; i <= 10; ++i) {
        const double s = -0.9 + 1.8 * i / 10.0;
        const Point z{s, -s * 0.7};
        const Point lhs = t.scope_mn(1, 6, z, true);
        const Point rhs = t.scope_mn(1, 4, t.scope_mn(4, 6, z, true), true);
        CHECK(dist(lhs, rhs) < 1e-9);
    }
}

TEST_CASE("degenerate tower has no tilt") {
    RenormTower t = build_tower(embed_unimodal(fstar().fstar), 8);
    ScopeDecomposition d = scope_decomposition(t, 2, 6);
    CHECK(std::fabs(d.t_mn) < 1e-12);
    CHECK(d.t_mn_log.is_zero());
}

TEST_CASE("universal data from a thickened tower") {
    const RenormTower& t = thick_tower();
    UniversalData u = estimate_universal(t, fstar().lambda);
    CHECK(u.sigma == doctest::Approx(fstar().lambda));
    CHECK(u.rho_est > 0.0);
    CHECK(u.rho_est < 1.0);
    CHECK(u.has_a);
    CHECK(u.a_tip > 0.0);
    CHECK(u.a_const > 0.0);
    // v is tip-centered: v(0) = 0, v'(0) = 1
    CHECK(std::fabs(u.v_star(0.0)) < 1e-8);
    CHECK(u.v_star.deriv(0.0) == doctest::Approx(1.0).epsilon(1e-6));
    // tilt calibration consistent with sigma * a(x_tip) within 10%
    CHECK(u.a_const == doctest::Approx(u.sigma * u.a_tip).epsilon(0.10));
}

TEST_CASE("universal data: degenerate tower still yields v_star") {
    RenormTower t = build_tower(embed_unimodal(fstar().fstar), 9);
    UniversalData u = estimate_universal(t, fstar().lambda);
    CHECK(!u.has_a);
    CHECK(std::fabs(u.v_star(0.0)) < 1e-9);
    CHECK(u.v_star.deriv(0.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("remainder slices converge toward the universal function") {
    RenormTower t = build_tower(embed_unimodal(fstar().fstar), 10);
    const int m0 = 2;
    ScopeDecomposition d4 = scope_decomposition(t, m0, 4);
    ScopeDecomposition d6 = scope_decomposition(t, m0, 6);
    ScopeDecomposition d8 = scope_decomposition(t, m0, 8);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i <= 30; ++i) {
        const double x = d6.remainder.xlo() + (d6.remainder.xhi() - d6.remainder.xlo()) * i / 30.0;
        e1 = std::max(e1, std::fabs(d6.remainder(x, 0.0) - d8.remainder(x, 0.0)));
        e2 = std::max(e2, std::fabs(d4.remainder(x, 0.0) - d6.remainder(x, 0.0)));
    }
    CHECK(e1 < e2);
}

TEST_CASE("derivative bounds report") {
    const RenormTower& t = thin_tower();
    const LogMag b = average_jacobian(t, 1 << 14);
    // level 0: |d_y phi| = b exactly for the pure shape
    DerivativeBounds r0 = derivative_bounds_report(t, 0, b);
    CHECK(r0.min_abs_dy == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(r0.max_abs_dy == doctest::Approx(0.05).epsilon(1e-9));
    // levels 1..4: the ratio |d_y phi_n| / b^(p^n) stays in one fixed window
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    double max_dx = 0.0;
    for (int n = 1; n <= 4; ++n) {
        if (t.level(n).degenerate) break;
        DerivativeBounds r = derivative_bounds_report(t, n, b);
        lo = std::min(lo, r.ratio_lo_log);
        hi = std::max(hi, r.ratio_hi_log);
        max_dx = std::max(max_dx, r.max_abs_dx);
    }
    CHECK(hi - lo < std::log(500.0));  // one C-window across levels
    CHECK(max_dx < 6.0);
}

TEST_CASE("mean value witness exists for random pairs") {
    HenonLikeMap F = thickened_map(fstar().fstar, 0.05, EpsShape::TiltedY);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int i = 0; i < 50; ++i) {
        const Point z0{u(rng), u(rng)}, z1{u(rng), u(rng)};
        MeanValueWitness w = mean_value_witness(F, z0, z1);
        REQUIRE(w.found);
        CHECK(w.xi >= std::min(z0.x, z1.x) - 1e-12);
        CHECK(w.xi <= std::max(z0.x, z1.x) + 1e-12);
        CHECK(w.eta >= std::min(z0.y, z1.y) - 1e-12);
        CHECK(w.eta <= std::max(z0.y, z1.y) + 1e-12);
        const double lhs = F.phi(z0.x, z0.y) - F.phi(z1.x, z1.y);
        const double rhs = F.dphi_x(w.xi, z0.y) * (z0.x - z1.x) +
                           (-F.deps_y(z1.x, w.eta)) * (z0.y - z1.y);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("cantor points: dynamics of addresses") {
    const RenormTower& t = thick_tower();
    const HenonLikeMap& F = t.level(0);
    Alphabet p2{2};
    // F(point with address w) = point with address 1+w
    for (const Word& w : {Word({0, 0, 1}, p2), Word({1, 0, 1}, p2), Word({0, 1, 0}, p2)}) {
        const Point z = t.cantor_point(0, w);
        const Point img = F.apply(z);
        const Point target = t.cantor_point(0, w.successor());
        CHECK(dist(img, target) < 1e-7);
    }
}

}  // TEST_SUITE

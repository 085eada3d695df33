#include "doctest.h"

#include <cmath>
#include <random>

#include "henonlab/cheb.hpp"

using namespace henonlab;

TEST_SUITE("cheb") {

TEST_CASE("1d fit reproduces analytic functions to spectral accuracy") {
    auto f = [](double x) { return std::sin(3.0 * x) + std::exp(0.5 * x); };
    Cheb1D c = Cheb1D::fit(f, -1.5, 2.0, 40);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.5, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        CHECK(std::fabs(c(x) - f(x)) < 1e-12);
    }
}

TEST_CASE("1d derivative matches analytic derivative") {
    auto f = [](double x) { return std::cos(2.0 * x) * x; };
    auto df = [](double x) { return std::cos(2.0 * x) - 2.0 * x * std::sin(2.0 * x); };
    Cheb1D c = Cheb1D::fit(f, -1.0, 1.0, 40);
    for (double x = -0.95; x < 1.0; x += 0.13) {
        CHECK(std::fabs(c.deriv(x) - df(x)) < 1e-10);
        CHECK(std::fabs(c.derivative()(x) - df(x)) < 1e-10);
    }
}

TEST_CASE("divided differences are stable near coincident points") {
    auto f = [](double x) { return std::exp(x); };
    Cheb1D c = Cheb1D::fit(f, -1.0, 1.0, 30);
    // far apart: matches the quotient
    CHECK(std::fabs(c.divided_diff(0.3, -0.4) - (f(0.3) - f(-0.4)) / 0.7) < 1e-12);
    // nearly coincident: no cancellation blowup
    const double a = 0.25, b = 0.25 + 1e-13;
    CHECK(std::fabs(c.divided_diff(a, b) - std::exp(0.25)) < 1e-9);
    // exactly coincident: derivative
    CHECK(std::fabs(c.divided_diff(a, a) - std::exp(0.25)) < 1e-11);
}

TEST_CASE("2d fit, partials, slices") {
    auto f = [](double x, double y) { return std::sin(x + 0.5 * y) + 0.1 * x * y * y; };
    auto fx = [](double x, double y) { return std::cos(x + 0.5 * y) + 0.1 * y * y; };
    auto fy = [](double x, double y) { return 0.5 * std::cos(x + 0.5 * y) + 0.2 * x * y; };
    Cheb2D c = Cheb2D::fit(f, -1.0, 1.0, -1.0, 1.0, 24, 24);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng), y = u(rng);
        CHECK(std::fabs(c(x, y) - f(x, y)) < 1e-12);
        CHECK(std::fabs(c.dx(x, y) - fx(x, y)) < 1e-10);
        CHECK(std::fabs(c.dy(x, y) - fy(x, y)) < 1e-10);
    }
    Cheb1D s = c.slice_y(0.37);
    for (double x = -0.9; x < 1.0; x += 0.21) CHECK(std::fabs(s(x) - f(x, 0.37)) < 1e-12);
}

TEST_CASE("2d divided differences match quotients away from collision") {
    auto f = [](double x, double y) { return std::exp(0.3 * x) * (1.0 + 0.5 * y + 0.2 * y * y); };
    Cheb2D c = Cheb2D::fit(f, -1.0, 1.0, -1.0, 1.0, 20, 20);
    const double q = (f(0.5, 0.2) - f(-0.3, 0.2)) / 0.8;
    CHECK(std::fabs(c.divided_diff_x(0.5, -0.3, 0.2) - q) < 1e-12);
    const double qy = (f(0.1, 0.6) - f(0.1, -0.2)) / 0.8;
    CHECK(std::fabs(c.divided_diff_y(0.1, 0.6, -0.2) - qy) < 1e-12);
    // coincident limit equals the partial
    CHECK(std::fabs(c.divided_diff_y(0.1, 0.4, 0.4) - c.dy(0.1, 0.4)) < 1e-10);
}

}  // TEST_SUITE

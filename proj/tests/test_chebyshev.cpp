#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cyclospec/chebyshev.hpp"

using namespace cyclospec;

TEST_CASE("fit reproduces smooth functions") {
    Cheb c = Cheb::fit([](double x) { return std::cos(x); }, 0.0, M_PI, 20);
    REQUIRE(std::abs(c(0.0) - 1.0) < 1e-12);
    REQUIRE(std::abs(c(M_PI / 2) - 0.0) < 1e-10);
    REQUIRE(std::abs(c(1.234) - std::cos(1.234)) < 1e-12);
}

TEST_CASE("fit is exact for polynomials within degree") {
    Cheb c = Cheb::fit([](double x) { return cplx(2.0 * x * x - x + 0.5, 0.0); }, 0.0, 3.0, 6);
    for (double x : {0.0, 0.7, 1.9, 3.0})
        REQUIRE(std::abs(c(x) - cplx(2 * x * x - x + 0.5)) < 1e-13);
}

TEST_CASE("derivative and integral") {
    Cheb c = Cheb::fit([](double x) { return std::sin(x); }, 0.0, M_PI, 24);
    Cheb d = c.derivative();
    REQUIRE(std::abs(d(0.3) - std::cos(0.3)) < 1e-11);
    REQUIRE(std::abs(c.integrate() - cplx(2.0)) < 1e-12);   // int_0^pi sin = 2
}

TEST_CASE("evaluation is linear in coefficients") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<cplx> a(8), b(8), sum(8);
        for (int i = 0; i < 8; ++i) {
            a[i] = cplx(u(rng), u(rng));
            b[i] = cplx(u(rng), u(rng));
        }
        cplx alpha(u(rng), u(rng)), beta(u(rng), u(rng));
        for (int i = 0; i < 8; ++i) sum[i] = alpha * a[i] + beta * b[i];
        Cheb ca(0.0, 2.0, a), cb(0.0, 2.0, b), cs(0.0, 2.0, sum);
        double x = 1.0 + u(rng);
        REQUIRE(std::abs(cs(x) - (alpha * ca(x) + beta * cb(x))) < 1e-13);
    }
}

#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "isingcorr/quadrature.hpp"

using namespace isingcorr;

TEST_CASE("circle grid construction and validation") {
    auto g = circle_grid(16);
    CHECK(g.M == 16);
    CHECK(g.nodes.size() == 16);
    for (auto z : g.nodes) CHECK(std::abs(std::abs(z) - 1.0) < 1e-15);
    CHECK(g.angles.front() == doctest::Approx(-pi));

    auto shifted = circle_grid(8, pi / 8.0);
    CHECK(shifted.angles.front() == doctest::Approx(-pi + pi / 8.0));

    CHECK_THROWS_AS(circle_grid(12), domain_error);
    CHECK_THROWS_AS(circle_grid(3), domain_error);
    CHECK_THROWS_AS(circle_grid(0), domain_error);
    CHECK_THROWS_AS(circle_grid(-16), domain_error);
}

TEST_CASE("moments of Laurent polynomials are exact") {
    auto g = circle_grid(16);
    auto f = [](cxd z) { return 3.0 * z * z + 2.0 / z; };
    CHECK(std::abs(circle_moment(f, -2, g) - cxd(3.0)) < 1e-14);
    CHECK(std::abs(circle_moment(f, 1, g) - cxd(2.0)) < 1e-14);
    CHECK(std::abs(circle_moment(f, 0, g)) < 1e-14);

    // sample-based entry point agrees with the callable one
    std::vector<cxd> samples(g.M);
    for (int j = 0; j < g.M; ++j) samples[j] = f(g.nodes[j]);
    CHECK(std::abs(circle_moment(samples, -2, g) - cxd(3.0)) < 1e-14);
}

TEST_CASE("moments of analytic functions converge geometrically") {
    // f(z) = 1/(1 - z/2): moment_n = 2^n for n <= 0, 0 for n > 0
    auto f = [](cxd z) { return 1.0 / (1.0 - z / 2.0); };
    auto g = circle_grid(64);
    CHECK(std::abs(circle_moment(f, -3, g) - cxd(0.125)) < 1e-15);
    CHECK(std::abs(circle_moment(f, 2, g)) < 1e-15);

    // entire function: moment_{-m}[exp(c z)] = c^m / m!
    auto e = [](cxd z) { return std::exp(0.3 * z); };
    auto g32 = circle_grid(32);
    CHECK(std::abs(circle_moment(e, -3, g32) - cxd(0.3 * 0.3 * 0.3 / 6.0)) < 1e-15);
}

TEST_CASE("phase offset does not disturb spectral accuracy") {
    auto f = [](cxd z) { return 3.0 * z * z + 2.0 / z; };
    auto g = circle_grid(16, pi / 16.0);
    CHECK(std::abs(circle_moment(f, -2, g) - cxd(3.0)) < 1e-14);
    CHECK(std::abs(circle_moment(f, 1, g) - cxd(2.0)) < 1e-14);
}

TEST_CASE("Cauchy kernel integral reproduces interior and exterior values") {
    auto g = circle_grid(256);
    auto one = [](cxd) { return cxd(1.0); };
    auto id = [](cxd z) { return z; };

    // kernel average of 1: +1 inside, -1 outside
    CHECK(std::abs(cauchy_kernel_integral(one, cxd(0.3, 0.2), g) - cxd(1.0)) < 1e-13);
    CHECK(std::abs(cauchy_kernel_integral(one, cxd(2.5, 0.0), g) - cxd(-1.0)) < 1e-13);

    // kernel against f(z) = z picks out 2z inside
    const cxd z0(0.4, -0.1);
    CHECK(std::abs(cauchy_kernel_integral(id, z0, g) - 2.0 * z0) < 1e-13);
}

TEST_CASE("guard band rejects near-circle evaluation points") {
    auto g = circle_grid(256);
    auto one = [](cxd) { return cxd(1.0); };
    CHECK(guard_band_width(256) == doctest::Approx(10.0 * 2.0 * pi / 256.0));

    CHECK_THROWS_AS(cauchy_kernel_integral(one, cxd(1.1, 0.0), g), near_singular_error);
    CHECK_THROWS_AS(cauchy_kernel_integral(one, cxd(0.93, 0.0), g), near_singular_error);
    CHECK_NOTHROW(cauchy_kernel_integral(one, cxd(1.3, 0.0), g));

    // the band narrows as the grid refines
    auto fine = circle_grid(1024);
    CHECK_NOTHROW(cauchy_kernel_integral(one, cxd(1.1, 0.0), fine));
}

TEST_CASE("escalation ladder stops at the first converged level") {
    // moment_0 of 1/(1 - z/r) with r = 1.05 carries an aliasing error
    // r^{-M}: visible at 256 and 512, below 1e-10 first at 1024.
    auto value_at = [](int m) {
        auto g = circle_grid(m);
        auto f = [](cxd z) { return 1.0 / (1.0 - z / 1.05); };
        return circle_moment(f, 0, g);
    };
    auto res = escalate_until_converged(value_at, 1e-10);
    CHECK(res.nodes_used == 1024);
    CHECK(std::abs(res.value - cxd(1.0)) < 1e-10);
}

TEST_CASE("escalation reports failure when levels never agree") {
    auto noisy = [](int m) { return cxd(double(m)); };
    CHECK_THROWS_AS(escalate_until_converged(noisy, 1e-10), convergence_error);
    auto ok = [](int) { return cxd(1.0); };
    CHECK_THROWS_AS(escalate_until_converged(ok, 1e-10, 100), domain_error);
}

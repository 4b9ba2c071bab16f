#include "doctest.h"

#include <cmath>
#include <complex>

#include "isingcorr/specfun.hpp"

#include "oracle_helpers.hpp"

using namespace isingcorr;

namespace {

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("gamma and Pochhammer basics") {
    CHECK(rel_close(gamma_fn(0.5), std::sqrt(pi), 1e-15));
    CHECK(rel_close(gamma_fn(6.0), 120.0, 1e-15));
    CHECK(rel_close(gamma_fn(-0.5), -2.0 * std::sqrt(pi), 1e-14));
    CHECK(pochhammer(1.0, 5) == doctest::Approx(120.0));
    CHECK(pochhammer(0.5, 3) == doctest::Approx(0.5 * 1.5 * 2.5));
    CHECK(pochhammer(-2.0, 3) == 0.0);
    CHECK(pochhammer(3.7, 0) == 1.0);
    CHECK_THROWS_AS(gamma_fn(0.0), domain_error);
    CHECK_THROWS_AS(gamma_fn(-3.0), domain_error);
    CHECK_THROWS_AS(pochhammer(1.0, -1), domain_error);
}

TEST_CASE("2F1 elementary closed forms") {
    // 2F1(1,1;2;x) = -log(1-x)/x
    CHECK(rel_close(hyp2f1(1.0, 1.0, 2.0, 0.5), 2.0 * std::log(2.0), 1e-14));
    // 2F1(1/2,1;3/2;-x^2) = atan(x)/x, exercised on the Pfaff branch
    CHECK(rel_close(hyp2f1(0.5, 1.0, 1.5, -1.0), pi / 4.0, 1e-14));
    // binomial series 2F1(a,b;b;x) = (1-x)^(-a)
    CHECK(rel_close(hyp2f1(0.3, 1.7, 1.7, 0.4), std::pow(0.6, -0.3), 1e-14));
    CHECK(rel_close(hyp2f1(0.3, 1.7, 1.7, -0.6), std::pow(1.6, -0.3), 1e-14));
    // argument zero
    CHECK(hyp2f1(2.3, -1.2, 0.7, 0.0) == 1.0);
}

TEST_CASE("2F1 terminating cases reach any argument") {
    const double a = -3.0, b = 2.5, c = 1.25, x = 2.7;
    double explicit_sum = 0.0;
    for (int j = 0; j <= 3; ++j)
        explicit_sum += pochhammer(a, j) * pochhammer(b, j) /
                        (pochhammer(c, j) * pochhammer(1.0, j)) * std::pow(x, j);
    CHECK(rel_close(hyp2f1(a, b, c, x), explicit_sum, 1e-14));

    // nonpositive integer c is fine when termination strikes first
    CHECK(rel_close(hyp2f1(-2.0, 1.5, -3.0, 0.4), 1.5, 1e-15));
    CHECK_THROWS_AS(hyp2f1(-5.0, 1.5, -3.0, 0.4), domain_error);
}

TEST_CASE("2F1 domain rejections") {
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, 1.0, 1.0), domain_error);
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, 1.0, 1.7), domain_error);
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, -2.0, 0.3), domain_error);
    using C = std::complex<double>;
    CHECK_THROWS_AS(hyp2f1(0.5, 0.5, 1.0, C(0.8, 0.7)), domain_error);
}

TEST_CASE("2F1 complex argument against Euler integral") {
    // For a=b=1/2, c=1: 2F1 = (2/pi) int_0^{pi/2} (1 - z sin^2)^{-1/2} dphi.
    using C = std::complex<double>;
    const C z(0.3, 0.4);
    const auto& rule = testing_oracles::gl64();
    const double h = pi / 4.0, mid = pi / 4.0;
    C integral(0.0, 0.0);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double phi = mid + h * rule.x[i];
        const double s2 = std::sin(phi) * std::sin(phi);
        integral += rule.w[i] / std::sqrt(C(1.0, 0.0) - z * s2);
    }
    integral *= h * 2.0 / pi;
    const C f = hyp2f1(0.5, 0.5, 1.0, z);
    CHECK(std::abs(f - integral) < 1e-13);
}

TEST_CASE("complete elliptic integrals K and E") {
    CHECK(rel_close(ellip_K(0.0), pi / 2.0, 1e-15));
    CHECK(rel_close(ellip_E(0.0), pi / 2.0, 1e-15));
    CHECK(ellip_E(1.0) == 1.0);

    // hypergeometric bridges
    for (double k : {0.3, 0.8}) {
        CHECK(rel_close(ellip_K(k), (pi / 2.0) * hyp2f1(0.5, 0.5, 1.0, k * k), 1e-13));
        CHECK(rel_close(ellip_E(k), (pi / 2.0) * hyp2f1(-0.5, 0.5, 1.0, k * k), 1e-13));
    }

    // Legendre relation on the Pythagorean pair (0.6, 0.8)
    const double lhs = ellip_E(0.6) * ellip_K(0.8) + ellip_E(0.8) * ellip_K(0.6) -
                       ellip_K(0.6) * ellip_K(0.8);
    CHECK(rel_close(lhs, pi / 2.0, 1e-14));

    // defining integral
    auto integrand = [](double phi) {
        const double s = std::sin(phi);
        return 1.0 / std::sqrt(1.0 - 0.49 * s * s);
    };
    CHECK(rel_close(ellip_K(0.7), testing_oracles::integrate(integrand, 0.0, pi / 2.0),
                    1e-13));

    CHECK_THROWS_AS(ellip_K(1.0), domain_error);
    CHECK_THROWS_AS(ellip_K(-0.1), domain_error);
    CHECK_THROWS_AS(ellip_E(1.2), domain_error);
}

TEST_CASE("Carlson symmetric integrals") {
    // degenerate closed forms
    CHECK(rel_close(carlson_rf(2.0, 2.0, 2.0), 1.0 / std::sqrt(2.0), 1e-15));
    CHECK(rel_close(carlson_rc(1.0, 2.0), pi / 4.0, 1e-14));
    CHECK(rel_close(carlson_rj(4.0, 4.0, 4.0, 4.0), 0.125, 1e-14));
    // first-kind bridge
    const double k = 0.55;
    CHECK(rel_close(carlson_rf(0.0, 1.0 - k * k, 1.0), ellip_K(k), 1e-13));

    CHECK_THROWS_AS(carlson_rf(-1.0, 1.0, 1.0), domain_error);
    CHECK_THROWS_AS(carlson_rc(1.0, -1.0), domain_error);
    CHECK_THROWS_AS(carlson_rj(1.0, 1.0, 1.0, -2.0), domain_error);
}

TEST_CASE("complete elliptic integral of the third kind") {
    CHECK(rel_close(ellip_Pi(0.0, 0.55), ellip_K(0.55), 1e-13));
    // Pi(n,0) = pi / (2 sqrt(1-n))
    CHECK(rel_close(ellip_Pi(-3.0, 0.0), pi / 4.0, 1e-13));

    // independent quadrature oracle at an interior point
    const double n = -0.81, k = 0.5;
    auto integrand = [n, k](double phi) {
        const double s2 = std::sin(phi) * std::sin(phi);
        return 1.0 / ((1.0 - n * s2) * std::sqrt(1.0 - k * k * s2));
    };
    CHECK(rel_close(ellip_Pi(n, k),
                    testing_oracles::integrate(integrand, 0.0, pi / 2.0), 1e-12));

    CHECK_THROWS_AS(ellip_Pi(1.0, 0.3), domain_error);
    CHECK_THROWS_AS(ellip_Pi(-0.5, 1.0), domain_error);
}

TEST_CASE("third kind at extreme characteristic stays accurate") {
    // Just past the route switch the adaptive evaluation must agree with the
    // Carlson combination evaluated directly.
    const double k = 0.5, kp2 = 1.0 - k * k;
    const double n = -1.0e8 - 1.0;
    const double carlson =
        carlson_rf(0.0, kp2, 1.0) + (n / 3.0) * carlson_rj(0.0, kp2, 1.0, 1.0 - n);
    CHECK(rel_close(ellip_Pi(n, k), carlson, 1e-9));

    // deep asymptotic anchor: Pi(n,k) -> pi / (2 sqrt(-n)) as n -> -infinity
    const double deep = ellip_Pi(-1.0e9, 0.5);
    CHECK(rel_close(deep, pi / (2.0 * std::sqrt(1.0e9)), 1e-4));
}

TEST_CASE("inverse Landen moduli") {
    auto m = inverse_landen(1.0);
    CHECK(m.k_dia == doctest::Approx(1.0));
    CHECK(m.kprime_dia == 0.0);

    // invariance under k -> 1/k
    auto lo = inverse_landen(0.3);
    auto hi = inverse_landen(1.0 / 0.3);
    CHECK(rel_close(lo.k_dia, hi.k_dia, 1e-15));
    CHECK(rel_close(lo.kprime_dia, hi.kprime_dia, 1e-15));

    // Pythagorean pair
    auto p = inverse_landen(0.7);
    CHECK(rel_close(p.k_dia * p.k_dia + p.kprime_dia * p.kprime_dia, 1.0, 1e-15));

    // ascending Landen identity K(2 sqrt(k)/(1+k)) = (1+k) K(k), k < 1
    const double k = 0.4;
    auto q = inverse_landen(k);
    CHECK(rel_close(ellip_K(q.k_dia), (1.0 + k) * ellip_K(k), 1e-13));

    CHECK_THROWS_AS(inverse_landen(0.0), domain_error);
    CHECK_THROWS_AS(inverse_landen(-1.0), domain_error);
}

TEST_CASE("elliptic triple bundles consistently") {
    auto t = elliptic_triple(0.6, -0.5);
    CHECK(t.modulus == 0.6);
    CHECK(t.K == ellip_K(0.6));
    CHECK(t.E == ellip_E(0.6));
    REQUIRE(t.Pi.has_value());
    CHECK(*t.Pi == ellip_Pi(-0.5, 0.6));
    auto bare = elliptic_triple(0.25);
    CHECK_FALSE(bare.Pi.has_value());
    CHECK_FALSE(bare.characteristic.has_value());
}

#pragma once

// Anisotropic square-lattice Ising parametrization and the unimodular
// symbol whose Laurent moments fill the correlation determinants.
//
// Couplings enter through S = sinh 2K, Sbar = sinh 2Kbar for the two axes;
// k = S Sbar separates the low-temperature (k > 1) and high-temperature
// (k < 1) regimes, with criticality at k = 1. The symbol
//
//   w(zeta) = sqrt((1 - 1/(k zeta)) / (1 - zeta/k))      (principal branch)
//
// has modulus one on |zeta| = 1 and branch points at zeta = k and 1/k. Its
// contour moments a_n = int dzeta/(2 pi i zeta) zeta^n w(zeta) are the
// determinant entries; the reciprocal symbol 1/w is the weight against
// which the biorthogonal polynomial system downstream is orthogonal.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "isingcorr/errors.hpp"
#include "isingcorr/quadrature.hpp"
#include "isingcorr/specfun.hpp"

namespace isingcorr {

struct IsingParams {
    double S;    // sinh 2K
    double Sbar; // sinh 2Kbar
    double C;    // cosh 2K
    double Cbar; // cosh 2Kbar
    double k;    // S * Sbar
};

inline IsingParams ising_params(double S, double Sbar) {
    if (!(S > 0.0) || !(Sbar > 0.0) || !std::isfinite(S) || !std::isfinite(Sbar))
        throw domain_error("ising_params: require finite S > 0 and Sbar > 0");
    IsingParams p;
    p.S = S;
    p.Sbar = Sbar;
    p.C = std::hypot(1.0, S);
    p.Cbar = std::hypot(1.0, Sbar);
    p.k = S * Sbar;
    return p;
}

inline IsingParams ising_params_from_k(double k, double S) {
    if (!(k > 0.0) || !(S > 0.0))
        throw domain_error("ising_params_from_k: require k > 0 and S > 0");
    return ising_params(S, k / S);
}

// The symbol, evaluated on or off the unit circle as the analytic branch
// on the annulus k < |zeta| < 1/k (its Laurent series there has the moments
// below as coefficients). Unimodular on the circle; at criticality k = 1 it
// jumps between -i and +i across zeta = 1, so grids there must avoid that
// node. zeta = 0 is refused.
//
// For k >= 1 both factors of the ratio stay in the right half plane and the
// principal branch is already analytic. For k < 1 the factor 1 - zeta/k
// winds around zero, so the square root is rewritten with the winding pulled
// into an explicit 1/zeta; the overall sign is fixed by a_1 -> -1 as k -> 0.
inline cxd weight_eval(cxd zeta, double k) {
    if (!(k > 0.0)) throw domain_error("weight_eval: require k > 0");
    if (zeta == cxd(0.0, 0.0)) throw domain_error("weight_eval: zeta = 0");
    if (k < 1.0)
        return -std::exp(0.5 * (std::log(1.0 - k * zeta) - std::log(1.0 - k / zeta))) /
               zeta;
    const cxd ratio = (1.0 - 1.0 / (k * zeta)) / (1.0 - zeta / k);
    return std::exp(0.5 * std::log(ratio));
}

inline cxd dual_weight_eval(cxd zeta, double k) { return weight_eval(zeta, 1.0 / k); }

// Reciprocal symbol: the orthogonality weight of the polynomial system.
inline cxd ortho_weight(cxd zeta, double k) { return 1.0 / weight_eval(zeta, k); }

inline std::vector<cxd> ortho_weight_samples(double k, const CircleGrid& g) {
    std::vector<cxd> s(g.M);
    for (int j = 0; j < g.M; ++j) s[j] = ortho_weight(g.nodes[j], k);
    return s;
}

// Closed-form moments. Both regimes reduce to Gauss hypergeometric values
// with argument k^2 or k^{-2}; at k = 1 the moments collapse to the
// rational family 2/(pi (1-2n)). Real for all integer n.
inline double moment_closed(int n, double k) {
    if (!(k > 0.0)) throw domain_error("moment_closed: require k > 0");
    if (k == 1.0) return 2.0 / (pi * (1.0 - 2.0 * n));
    if (k > 1.0) {
        if (n >= 0)
            return -(gamma_fn(n - 0.5) * gamma_fn(1.5) / (pi * gamma_fn(n + 1.0))) *
                   std::pow(k, double(-n)) *
                   hyp2f1(0.5, n - 0.5, n + 1.0, 1.0 / (k * k));
        const int m = -n;
        return (gamma_fn(m + 0.5) * gamma_fn(0.5) / (pi * gamma_fn(m + 1.0))) *
               std::pow(k, double(-m)) * hyp2f1(-0.5, m + 0.5, m + 1.0, 1.0 / (k * k));
    }
    if (n >= 1)
        return -(gamma_fn(n - 0.5) * gamma_fn(0.5) / (pi * gamma_fn(double(n)))) *
               std::pow(k, double(n - 1)) * hyp2f1(-0.5, n - 0.5, double(n), k * k);
    const int m = -n; // m >= 0
    return (gamma_fn(m + 0.5) * gamma_fn(1.5) / (pi * gamma_fn(m + 2.0))) *
           std::pow(k, double(m + 1)) * hyp2f1(0.5, m + 0.5, m + 2.0, k * k);
}

// Moments of the dual symbol w(zeta; 1/k); algebraically equal to
// -a_{-n+1}(k).
inline double dual_moment_closed(int n, double k) { return moment_closed(n, 1.0 / k); }

// Moments a_{n_min..n_max} as a contiguous table, index i <-> n_min + i.
inline std::vector<double> moment_table(int n_min, int n_max, double k) {
    if (n_max < n_min) throw domain_error("moment_table: empty range");
    std::vector<double> t;
    t.reserve(n_max - n_min + 1);
    for (int n = n_min; n <= n_max; ++n) t.push_back(moment_closed(n, k));
    return t;
}

// Quadrature moments from the real cosine form
//
//   a_n = int dtheta/(2 pi) (k cos n theta - cos (n-1) theta)
//                            / sqrt(k^2 + 1 - 2 k cos theta).
//
// At k = 1 the radical vanishes at theta = 0; a grid with a node there
// (any unshifted grid) is refused, a phase-shifted grid converges.
inline double moment_quadrature(int n, double k, const CircleGrid& g) {
    if (!(k > 0.0)) throw domain_error("moment_quadrature: require k > 0");
    double acc = 0.0, comp = 0.0;
    for (int j = 0; j < g.M; ++j) {
        const double th = g.angles[j];
        const double rad = k * k + 1.0 - 2.0 * k * std::cos(th);
        if (rad <= 0.0)
            throw near_singular_error(
                "moment_quadrature: critical branch point on a grid node; use a "
                "phase-shifted grid");
        const double v =
            (k * std::cos(n * th) - std::cos((n - 1) * th)) / std::sqrt(rad);
        const double y = v - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc / g.M;
}

// Border moments of the one-step-off-diagonal determinant,
//
//   b_n = Cbar int dzeta/(2 pi i zeta) zeta^n (1/w(zeta)) / (Sbar + S zeta),
//
// in their real cosine form. The kernel pole -Sbar/S pinches the contour as
// Sbar -> S, so a narrow band around isotropy is refused.
inline double border_moment_quadrature(int n, const IsingParams& p,
                                       const CircleGrid& g) {
    if (std::abs(std::log(p.Sbar / p.S)) < 5e-4)
        throw near_singular_error(
            "border_moment_quadrature: pole pinches the contour near isotropy; use "
            "the recurrence route");
    const double k = p.k;
    double acc = 0.0, comp = 0.0;
    for (int j = 0; j < g.M; ++j) {
        const double th = g.angles[j];
        const double c = std::cos(th);
        const double rad = k * k + 1.0 - 2.0 * k * c;
        if (rad <= 0.0)
            throw near_singular_error(
                "border_moment_quadrature: critical branch point on a grid node; use "
                "a phase-shifted grid");
        const double num = (k * p.Sbar - p.S) * std::cos(n * th) +
                           k * p.S * std::cos((n - 1) * th) -
                           p.Sbar * std::cos((n + 1) * th);
        const double den = (p.S * p.S + p.Sbar * p.Sbar + 2.0 * k * c) * std::sqrt(rad);
        const double v = p.Cbar * num / den;
        const double y = v - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc / g.M;
}

// Border moments of the dual determinant: the parameter map
// (k, S, Sbar) -> (1/k, 1/Sbar, 1/S) turns one family into the other.
inline double dual_border_moment_quadrature(int n, const IsingParams& p,
                                            const CircleGrid& g) {
    return border_moment_quadrature(n, ising_params(1.0 / p.Sbar, 1.0 / p.S), g);
}

// Cauchy transform of the reciprocal symbol against a monomial,
//
//   g_j(z) = -2 z int dzeta/(2 pi i zeta) zeta^j (1/w(zeta)) / (zeta - z),
//
// assembled from the moment and the two-sided Cauchy kernel so the guard
// band applies. For the trivial symbol this is -2 z^j inside the disc.
inline cxd cauchy_transform_of_weight(int j, double k, cxd z, const CircleGrid& g) {
    if (j < 0) throw domain_error("cauchy_transform_of_weight: require j >= 0");
    std::vector<cxd> samples(g.M);
    for (int i = 0; i < g.M; ++i)
        samples[i] = std::pow(g.nodes[i], j) * ortho_weight(g.nodes[i], k);
    const cxd m0 = circle_moment(samples, 0, g);
    return m0 - cauchy_kernel_integral(samples, z, g);
}

// b_n recovered through the transform at the kernel pole:
// b_n = (Cbar / (2 Sbar)) g_n(-Sbar/S). Cross-validates the cosine-form
// quadrature; the result is real by conjugation symmetry.
inline double border_moment_via_transform(int n, const IsingParams& p,
                                          const CircleGrid& g) {
    const cxd gn = cauchy_transform_of_weight(n, p.k, cxd(-p.Sbar / p.S, 0.0), g);
    if (std::abs(gn.imag()) > 1e-8 * (1.0 + std::abs(gn.real())))
        throw evaluation_error(
            "border_moment_via_transform: nonreal transform value, imag = " +
            std::to_string(gn.imag()));
    return 0.5 * (p.Cbar / p.Sbar) * gn.real();
}

} // namespace isingcorr

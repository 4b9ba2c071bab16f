#pragma once

// Spectral quadrature on the unit circle. The equispaced trapezoid rule is
// spectrally accurate for smooth periodic integrands (Trefethen & Weideman,
// SIAM Rev. 56 (2014)): with M nodes it integrates trigonometric
// polynomials of degree below M exactly, and the error for an analytic
// integrand decays geometrically in M. Node counts are powers of two so
// that accuracy escalation by doubling reuses no state and lands on the
// same family of grids.
//
// Integrals are written as contour moments
//
//   moment_n[f] = int dzeta/(2 pi i zeta) zeta^n f(zeta),
//
// i.e. the coefficient of zeta^{-n} in the Laurent expansion of f on the
// circle, discretized as (1/M) sum_j e^{i n theta_j} f(zeta_j).

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "isingcorr/errors.hpp"
#include "isingcorr/specfun.hpp"

namespace isingcorr {

using cxd = std::complex<double>;

namespace detail {

inline bool is_pow2(int m) { return m > 0 && (m & (m - 1)) == 0; }

// Compensated complex accumulation; node counts reach 65536 and the
// downstream unimodularity checks sit at 1e-12, so plain summation error
// (M eps) would be visible.
struct KahanCxd {
    cxd sum{0.0, 0.0};
    cxd comp{0.0, 0.0};
    void add(cxd v) {
        cxd y = v - comp;
        cxd t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

} // namespace detail

struct CircleGrid {
    int M = 0;
    double offset = 0.0; // phase added to every node angle
    std::vector<double> angles;
    std::vector<cxd> nodes;
};

// Equispaced grid theta_j = -pi + 2 pi j / M + offset. M must be a power of
// two, at least 4. A nonzero offset (typically pi/M) shifts nodes off any
// integrand feature pinned at theta = 0 or theta = -pi.
inline CircleGrid circle_grid(int M, double offset = 0.0) {
    if (!detail::is_pow2(M) || M < 4)
        throw domain_error("circle_grid: node count must be a power of two >= 4, got " +
                           std::to_string(M));
    CircleGrid g;
    g.M = M;
    g.offset = offset;
    g.angles.resize(M);
    g.nodes.resize(M);
    for (int j = 0; j < M; ++j) {
        g.angles[j] = -pi + (2.0 * pi * j) / M + offset;
        g.nodes[j] = std::polar(1.0, g.angles[j]);
    }
    return g;
}

// moment_n from precomputed samples f(zeta_j).
inline cxd circle_moment(const std::vector<cxd>& samples, int n, const CircleGrid& g) {
    if (static_cast<int>(samples.size()) != g.M)
        throw evaluation_error("circle_moment: sample count does not match grid");
    detail::KahanCxd acc;
    for (int j = 0; j < g.M; ++j)
        acc.add(std::polar(1.0, n * g.angles[j]) * samples[j]);
    return acc.sum / double(g.M);
}

template <typename F, typename = std::enable_if_t<std::is_invocable_v<F, cxd>>>
cxd circle_moment(const F& f, int n, const CircleGrid& g) {
    detail::KahanCxd acc;
    for (int j = 0; j < g.M; ++j)
        acc.add(std::polar(1.0, n * g.angles[j]) * cxd(f(g.nodes[j])));
    return acc.sum / double(g.M);
}

// Half-width of the annulus around |z| = 1 in which the Cauchy kernel
// (zeta+z)/(zeta-z) varies too fast for the grid to resolve.
inline double guard_band_width(int M) { return 10.0 * (2.0 * pi / M); }

// int dzeta/(2 pi i zeta) (zeta+z)/(zeta-z) f(zeta), for z off the unit
// circle. Inside the guard band the quadrature error is O(1) regardless of
// smoothness of f, so the request is refused rather than answered badly.
inline cxd cauchy_kernel_integral(const std::vector<cxd>& samples, cxd z,
                                  const CircleGrid& g) {
    if (static_cast<int>(samples.size()) != g.M)
        throw evaluation_error("cauchy_kernel_integral: sample count does not match grid");
    if (std::abs(std::abs(z) - 1.0) < guard_band_width(g.M))
        throw near_singular_error(
            "cauchy_kernel_integral: evaluation point inside the guard band around "
            "the unit circle (|z| = " +
            std::to_string(std::abs(z)) + ", M = " + std::to_string(g.M) + ")");
    detail::KahanCxd acc;
    for (int j = 0; j < g.M; ++j) {
        const cxd zeta = g.nodes[j];
        acc.add(((zeta + z) / (zeta - z)) * samples[j]);
    }
    return acc.sum / double(g.M);
}

template <typename F, typename = std::enable_if_t<std::is_invocable_v<F, cxd>>>
cxd cauchy_kernel_integral(const F& f, cxd z, const CircleGrid& g) {
    std::vector<cxd> samples(g.M);
    for (int j = 0; j < g.M; ++j) samples[j] = f(g.nodes[j]);
    return cauchy_kernel_integral(samples, z, g);
}

template <typename T>
struct EscalationResult {
    T value;
    int nodes_used;
};

// Evaluate value_at(M) on the doubling ladder m_start, 2 m_start, ... until
// two consecutive levels agree to tol (relative once |value| > 1), then
// return the finer one. Throws convergence_error if the cap is reached
// without agreement.
template <typename Gen>
auto escalate_until_converged(Gen&& value_at, double tol, int m_start = 256,
                              int m_cap = 65536)
    -> EscalationResult<std::decay_t<decltype(value_at(int{}))>> {
    using T = std::decay_t<decltype(value_at(int{}))>;
    if (!detail::is_pow2(m_start) || m_start < 4 || m_cap < m_start)
        throw domain_error("escalate_until_converged: bad node-count ladder");
    T prev = value_at(m_start);
    for (int m = 2 * m_start; m <= m_cap; m *= 2) {
        T cur = value_at(m);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur)))
            return {cur, m};
        prev = cur;
    }
    throw convergence_error(
        "escalate_until_converged: no agreement to tol " + std::to_string(tol) +
        " within " + std::to_string(m_cap) + " nodes");
}

} // namespace isingcorr

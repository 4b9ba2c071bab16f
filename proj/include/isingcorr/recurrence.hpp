#pragma once

// Nonlinear recurrence engine for the reflection data (r_N, rbar_N), the
// auxiliary norm ladder (kappa_N, I_N), the linear three-term recurrence
// for the associated reciprocal functions eps*_n, quadrature definitions of
// the associated functions, and the complete critical-point closed forms.
//
// The coupled second-order maps advance
//
//   r_{N+1} = ( 2N [k + 1/k + (2N-1) r_N rbar_{N-1}] r_N
//               - (2N-3) [(2N-1) r_N rbar_N + 1] r_{N-1} )
//             / ( (2N+3)(1 - r_N rbar_N) ),
//
//   rbar_{N+1} = ( 2N [k + 1/k - (2N-3) rbar_N r_{N-1}] rbar_N
//                  - (2N-1) [1 - (2N+1) r_N rbar_N] rbar_{N-1} )
//                / ( (2N+1)(1 - r_N rbar_N) ),
//
// from r_0 = rbar_0 = 1 and elliptic data at N = 1. The auxiliaries follow
// kappa_{n+1} = kappa_n / sqrt(1 - r_{n+1} rbar_{n+1}), I_{n+1} = I_n /
// kappa_n^2 with I_0 = 1, kappa_0^2 = 1/a_0, so the accumulated I_N equals
// the order-N Toeplitz determinant.
//
// The linearised step has multipliers k^{+2} and k^{-2}: away from k = 1
// one mode always grows, so a double-precision trajectory sheds about
// 2N lg(max(k,1/k)) bits by index N (at k = 0.3 the whole mantissa is gone
// near N = 15). run_recurrence therefore carries the trajectory in
// binary128 and rounds on output; the single-step functions below keep
// plain double for inspection and tests.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "isingcorr/detkit.hpp"
#include "isingcorr/errors.hpp"
#include "isingcorr/quadrature.hpp"
#include "isingcorr/specfun.hpp"
#include "isingcorr/weight.hpp"

namespace isingcorr {

struct ReflectionPair {
    double r;
    double rbar;
};

// Elliptic initial data at N = 1. Both regimes obey r1 = (rbar1 - 2/k)/3;
// at k = 1 the pair is exactly (-1/3, 1).
inline ReflectionPair initial_reflections(double k) {
    if (!(k > 0.0)) throw domain_error("initial_reflections: require k > 0");
    if (k == 1.0) return {-1.0 / 3.0, 1.0};
    double rbar1;
    if (k < 1.0) {
        const double K = ellip_K(k), E = ellip_E(k);
        rbar1 = k * E / ((k * k - 1.0) * K + E);
    } else {
        const double K = ellip_K(1.0 / k), E = ellip_E(1.0 / k);
        rbar1 = k + ((1.0 - k * k) / k) * K / E;
    }
    return {(rbar1 - 2.0 / k) / 3.0, rbar1};
}

// The same data through the inverse Landen modulus 2 sqrt(k)/(1+k). The
// complementary combination enters SIGNED, (1-k)/(1+k), which keeps the
// expression regime-correct: with it, (1+k')/(1-k') = 1/k identically and
// the phase-split relation r1 = (rbar1 - 2/k)/3 is reproduced for all k.
inline ReflectionPair initial_reflections_landen(double k) {
    if (!(k > 0.0)) throw domain_error("initial_reflections_landen: require k > 0");
    if (k == 1.0) return {-1.0 / 3.0, 1.0};
    const double kd = 2.0 * std::sqrt(k) / (1.0 + k);
    const double kp = (1.0 - k) / (1.0 + k); // signed complement
    const double Kd = ellip_K(kd), Ed = ellip_E(kd);
    const double rbar1 =
        ((1.0 - kp) / (1.0 + kp)) * (Ed + kp * Kd) / (Ed - kp * Kd);
    return {(rbar1 - 2.0 / k) / 3.0, rbar1};
}

// Trajectory state: index N with a two-deep history window (the two maps
// cross-couple at different depths), plus the auxiliary pair at N.
struct RecurrenceState {
    int N = 1;
    double r_prev = 1.0, r_cur = 0.0;
    double rbar_prev = 1.0, rbar_cur = 0.0;
    double kappa = 0.0; // kappa_N
    double I = 0.0;     // I_N
    double k = 0.0;
};

inline RecurrenceState initial_state(double k, bool landen = false) {
    const ReflectionPair p =
        landen ? initial_reflections_landen(k) : initial_reflections(k);
    RecurrenceState s;
    s.N = 1;
    s.r_prev = 1.0;
    s.r_cur = p.r;
    s.rbar_prev = 1.0;
    s.rbar_cur = p.rbar;
    s.k = k;
    const double a0 = moment_closed(0, k);
    const double rad = 1.0 - p.r * p.rbar;
    if (!(rad > 0.0))
        throw regime_error("initial_state: 1 - r1 rbar1 not positive");
    s.kappa = std::sqrt(1.0 / (a0 * rad));
    s.I = a0;
    return s;
}

namespace detail {

inline void check_step_denominator(const RecurrenceState& s) {
    if (1.0 - s.r_cur * s.rbar_cur == 0.0)
        throw degeneracy_error("reflection step: vanishing leading factor at N = " +
                               std::to_string(s.N));
}

// Scalar-generic step kernels; the double instantiations below are
// bit-identical to the historical formulas.
template <typename T>
T step_r_core(T N, T kk, T r_prev, T r_cur, T rbar_prev, T rbar_cur) {
    const T num = 2 * N * (kk + (2 * N - 1) * r_cur * rbar_prev) * r_cur -
                  (2 * N - 3) * ((2 * N - 1) * r_cur * rbar_cur + 1) * r_prev;
    return num / ((2 * N + 3) * (1 - r_cur * rbar_cur));
}

template <typename T>
T step_rbar_core(T N, T kk, T r_prev, T r_cur, T rbar_prev, T rbar_cur) {
    const T num = 2 * N * (kk - (2 * N - 3) * rbar_cur * r_prev) * rbar_cur -
                  (2 * N - 1) * (1 - (2 * N + 1) * r_cur * rbar_cur) * rbar_prev;
    return num / ((2 * N + 1) * (1 - r_cur * rbar_cur));
}

// binary128 support for the long trajectory. Only +-*/ are used directly
// (soft-float builtins); sqrt is a Newton refinement of the double seed and
// pi is a two-double split, so no quad math library is required.
using quad = __float128;

inline quad quad_pi() {
    return quad(3.141592653589793116) + quad(1.2246467991473532e-16);
}

inline quad quad_sqrt(quad v) {
    if (v <= 0) return 0;
    quad x = quad(std::sqrt(double(v)));
    for (int i = 0; i < 3; ++i) x = (x + v / x) / 2;
    return x;
}

// Complete elliptic integrals by the arithmetic-geometric mean (AMS55
// 17.6): K = pi / (2 AGM(1, k')), E = K (1 - sum 2^{j-1} c_j^2), c_0 = k.
struct QuadKE {
    quad K, E;
};

inline QuadKE quad_ellip_KE(quad k) {
    quad a = 1;
    quad b = quad_sqrt(1 - k * k);
    quad c = k;
    quad sum = c * c / 2;
    quad pow2 = 0.5;
    for (int j = 0; j < 60; ++j) {
        c = (a - b) / 2;
        const quad an = (a + b) / 2;
        b = quad_sqrt(a * b);
        a = an;
        pow2 *= 2;
        sum += pow2 * c * c;
        if (c < quad(1e-36)) break;
    }
    QuadKE out;
    out.K = quad_pi() / (2 * a);
    out.E = out.K * (1 - sum);
    return out;
}

struct QuadPair {
    quad r, rbar;
};

// Index-1 seeds from the elliptic closed forms, in binary128 so the long
// trajectory starts with a full quad mantissa.
inline QuadPair quad_initial(double k, bool landen) {
    const quad qk = k;
    quad rbar1;
    if (k == 1.0) {
        return {-quad(1) / 3, 1};
    } else if (landen) {
        const quad kd = 2 * quad_sqrt(qk) / (1 + qk);
        const quad kp = (1 - qk) / (1 + qk);
        const QuadKE ke = quad_ellip_KE(kd);
        rbar1 = ((1 - kp) / (1 + kp)) * (ke.E + kp * ke.K) / (ke.E - kp * ke.K);
    } else if (k < 1.0) {
        const QuadKE ke = quad_ellip_KE(qk);
        rbar1 = qk * ke.E / ((qk * qk - 1) * ke.K + ke.E);
    } else {
        const QuadKE ke = quad_ellip_KE(1 / qk);
        rbar1 = qk + ((1 - qk * qk) / qk) * (ke.K / ke.E);
    }
    return {(rbar1 - 2 / qk) / 3, rbar1};
}

inline quad quad_a0(double k) {
    if (k == 1.0) return 2 / quad_pi();
    const quad qk = k;
    if (k > 1.0) return 2 * quad_ellip_KE(1 / qk).E / quad_pi();
    const QuadKE ke = quad_ellip_KE(qk);
    return 2 * (ke.E - (1 - qk * qk) * ke.K) / (quad_pi() * qk);
}

} // namespace detail

inline double step_r(const RecurrenceState& s) {
    detail::check_step_denominator(s);
    return detail::step_r_core<double>(s.N, s.k + 1.0 / s.k, s.r_prev, s.r_cur,
                                       s.rbar_prev, s.rbar_cur);
}

inline double step_rbar(const RecurrenceState& s) {
    detail::check_step_denominator(s);
    return detail::step_rbar_core<double>(s.N, s.k + 1.0 / s.k, s.r_prev, s.r_cur,
                                         s.rbar_prev, s.rbar_cur);
}

// Auxiliary ladder step for a freshly computed pair at index N+1.
inline void step_aux(double r_next, double rbar_next, double& kappa, double& I) {
    const double rad = 1.0 - r_next * rbar_next;
    if (!(rad > 0.0))
        throw regime_error("step_aux: 1 - r rbar not positive outside the physical "
                           "regime");
    I /= kappa * kappa;
    kappa /= std::sqrt(rad);
}

inline RecurrenceState advance(const RecurrenceState& s) {
    const double r_next = step_r(s);
    const double rbar_next = step_rbar(s);
    RecurrenceState t = s;
    t.N = s.N + 1;
    t.r_prev = s.r_cur;
    t.r_cur = r_next;
    t.rbar_prev = s.rbar_cur;
    t.rbar_cur = rbar_next;
    step_aux(r_next, rbar_next, t.kappa, t.I);
    return t;
}

// Full trajectory with n-indexed arrays: r[n], rbar[n], kappa2[n] for
// n = 0..N_max and I[n] for n = 0..N_max+1.
struct ReflectionLadder {
    double k = 0.0;
    std::vector<double> r, rbar, kappa2, I;
};

inline ReflectionLadder run_recurrence(int N_max, double k, bool landen = false) {
    if (N_max < 0) throw domain_error("run_recurrence: negative horizon");
    using detail::quad;
    ReflectionLadder L;
    L.k = k;
    const quad a0 = detail::quad_a0(k);
    L.r.assign(N_max + 1, 1.0);
    L.rbar.assign(N_max + 1, 1.0);
    L.kappa2.assign(N_max + 1, double(1 / a0));
    L.I.assign(N_max + 2, 1.0);
    L.I[1] = double(a0);
    if (N_max == 0) return L;

    const detail::QuadPair init = detail::quad_initial(k, landen);
    quad r_prev = 1, r_cur = init.r;
    quad rbar_prev = 1, rbar_cur = init.rbar;
    quad rad = 1 - r_cur * rbar_cur;
    if (!(rad > 0))
        throw regime_error("initial_state: 1 - r1 rbar1 not positive");
    quad kap2 = 1 / (a0 * rad);
    quad I_cur = a0;
    L.r[1] = double(r_cur);
    L.rbar[1] = double(rbar_cur);
    L.kappa2[1] = double(kap2);
    L.I[2] = double(I_cur / kap2);
    const quad qk = k;
    const quad kk = qk + 1 / qk;
    for (int n = 1; n < N_max; ++n) {
        if (rad == 0)
            throw degeneracy_error(
                "reflection step: vanishing leading factor at N = " +
                std::to_string(n));
        const quad N = n;
        const quad rn =
            detail::step_r_core<quad>(N, kk, r_prev, r_cur, rbar_prev, rbar_cur);
        const quad rbn =
            detail::step_rbar_core<quad>(N, kk, r_prev, r_cur, rbar_prev, rbar_cur);
        r_prev = r_cur;
        r_cur = rn;
        rbar_prev = rbar_cur;
        rbar_cur = rbn;
        rad = 1 - r_cur * rbar_cur;
        if (!(rad > 0))
            throw regime_error("step_aux: 1 - r rbar not positive outside the "
                               "physical regime");
        I_cur /= kap2;
        kap2 /= rad;
        L.r[n + 1] = double(r_cur);
        L.rbar[n + 1] = double(rbar_cur);
        L.kappa2[n + 1] = double(kap2);
        L.I[n + 1] = double(I_cur);
        L.I[n + 2] = double(I_cur / kap2);
    }
    return L;
}

// Largest n <= N_max at which the stepped (r, rbar, I) still agree with the
// structured-determinant oracle to rel_tol; the stability horizon is an
// observed quantity, not an assumption.
inline int recurrence_agreement_horizon(double k, int N_max, double rel_tol) {
    auto L = run_recurrence(N_max, k);
    auto a = moment_window(-N_max - 1, N_max + 1, k);
    auto close = [rel_tol](double x, double y) {
        return std::abs(x - y) <= rel_tol * std::max({1.0, std::abs(x), std::abs(y)});
    };
    int horizon = 0;
    for (int n = 1; n <= N_max; ++n) {
        auto s = biorth_solve(a, n);
        if (!close(L.r[n], s.r) || !close(L.rbar[n], s.rbar) ||
            !close(L.I[n], toeplitz_det(a, n)))
            break;
        horizon = n;
    }
    return horizon;
}

// Critical-point closed forms. The reflection data freeze to the rational
// family r_N = -1/((2N+1)(2N-1)), rbar_N = 1 (the N = 0 value of the first
// expression is +1, consistent with the convention r_0 = 1).
inline double critical_r(int N) {
    if (N < 0) throw domain_error("critical_r: negative index");
    return -1.0 / ((2.0 * N + 1.0) * (2.0 * N - 1.0));
}

inline double critical_rbar(int N) {
    if (N < 0) throw domain_error("critical_rbar: negative index");
    return 1.0;
}

inline double critical_kappa2(int N) {
    if (N < 0) throw domain_error("critical_kappa2: negative index");
    return gamma_fn(N + 1.5) * gamma_fn(N + 0.5) /
           (gamma_fn(N + 1.0) * gamma_fn(N + 1.0));
}

// Diagonal correlation at criticality: prod_{j=1}^N Gamma(j)^2 /
// (Gamma(j+1/2) Gamma(j-1/2)).
inline double critical_diagonal(int N) {
    if (N < 0) throw domain_error("critical_diagonal: negative index");
    double p = 1.0;
    for (int j = 1; j <= N; ++j)
        p *= gamma_fn(double(j)) * gamma_fn(double(j)) /
             (gamma_fn(j + 0.5) * gamma_fn(j - 0.5));
    return p;
}

// The four members of the critical system at order n: both polynomials
// (terminating hypergeometric sums, any z) and both associated functions
// (argument 1/z, z != 0 and off [1, infinity) of the reciprocal):
//
//   phi_n      = kappa_n r_n 2F1(3/2, -n; -n+3/2; z)
//   phi*_n     = kappa_n 2F1(1/2, -n; -n+1/2; z)
//   eps_n      = -2 / (kappa_n (2n+3)(2n+1) z) 2F1(3/2, n+1; n+5/2; 1/z)
//   eps*_n     = (2 / kappa_n) 2F1(1/2, n+1; n+3/2; 1/z)
struct CriticalSystem {
    cxd phi, phi_star, eps, eps_star;
};

inline CriticalSystem critical_system(int n, cxd z) {
    if (n < 0) throw domain_error("critical_system: negative order");
    if (z == cxd(0.0, 0.0))
        throw domain_error("critical_system: z = 0 is outside the associated "
                           "functions' domain");
    const double kap = std::sqrt(critical_kappa2(n));
    CriticalSystem out;
    out.phi = kap * critical_r(n) * hyp2f1(1.5, double(-n), -n + 1.5, z);
    out.phi_star = kap * hyp2f1(0.5, double(-n), -n + 0.5, z);
    const cxd w = 1.0 / z;
    out.eps = -2.0 / (kap * (2.0 * n + 3.0) * (2.0 * n + 1.0) * z) *
              hyp2f1(1.5, n + 1.0, n + 2.5, w);
    out.eps_star = (2.0 / kap) * hyp2f1(0.5, n + 1.0, n + 1.5, w);
    return out;
}

// Associated functions by quadrature: Cauchy-kernel transforms of the
// orthogonality weight against the order-n polynomials,
//
//   eps_n(z)  =          int dzeta/(2 pi i zeta) (zeta+z)/(zeta-z) W phi_n,
//   eps*_n(z) = 1/kappa_n - int dzeta/(2 pi i zeta) (zeta+z)/(zeta-z) W phi*_n.
//
// eps* extends verbatim to n = 0, where it is kappa_0 times the Cauchy
// transform g_0; eps needs n >= 1. Both vanish appropriately: eps at
// |z| -> infinity, eps* at z = 0.
inline cxd epsilon_star_direct(int n, cxd z, double k, const CircleGrid& g) {
    if (n < 0) throw domain_error("epsilon_star_direct: negative order");
    auto a = moment_window(-n, n, k);
    auto s = biorth_solve(a, n);
    std::vector<cxd> samples(g.M);
    for (int j = 0; j < g.M; ++j)
        samples[j] = ortho_weight(g.nodes[j], k) * s.phi_star(g.nodes[j]);
    return cxd(1.0 / s.kappa) - cauchy_kernel_integral(samples, z, g);
}

inline cxd epsilon_direct(int n, cxd z, double k, const CircleGrid& g) {
    if (n < 1) throw domain_error("epsilon_direct: require n >= 1");
    auto a = moment_window(-n, n, k);
    auto s = biorth_solve(a, n);
    std::vector<cxd> samples(g.M);
    for (int j = 0; j < g.M; ++j)
        samples[j] = ortho_weight(g.nodes[j], k) * s.phi(g.nodes[j]);
    return cauchy_kernel_integral(samples, z, g);
}

// Linear three-term advance of the reciprocal associated family,
//
//   (kappa_n/kappa_{n+1}) rbar_n eps*_{n+1}
//     = [rbar_n + rbar_{n+1} z] eps*_n
//       - (kappa_{n-1}/kappa_n) rbar_{n+1} z eps*_{n-1}.
struct EpsilonState {
    cxd z;
    int n = 0;
    cxd eps_prev, eps_cur; // eps*_{n-1}(z), eps*_n(z)
};

inline cxd epsilon_star_step(const EpsilonState& es, double rbar_n, double rbar_np1,
                             double kappa_ratio_up, double kappa_ratio_down) {
    if (std::abs(rbar_n) < 1e-12)
        throw degeneracy_error(
            "epsilon_star_step: leading coefficient rbar_n below 1e-12 at n = " +
            std::to_string(es.n) + "; use the direct quadrature for this index");
    const cxd rhs = (rbar_n + rbar_np1 * es.z) * es.eps_cur -
                    kappa_ratio_down * rbar_np1 * es.z * es.eps_prev;
    return rhs / (kappa_ratio_up * rbar_n);
}

// Convenience advance pulling the coefficients from a ladder; requires
// entries up to index n+1.
inline EpsilonState advance_epsilon(const EpsilonState& es, const ReflectionLadder& L) {
    const int n = es.n;
    if (n < 1 || n + 1 >= static_cast<int>(L.rbar.size()))
        throw domain_error("advance_epsilon: ladder does not cover index " +
                           std::to_string(n + 1));
    const double up = std::sqrt(L.kappa2[n] / L.kappa2[n + 1]);
    const double down = std::sqrt(L.kappa2[n - 1] / L.kappa2[n]);
    EpsilonState next;
    next.z = es.z;
    next.n = n + 1;
    next.eps_prev = es.eps_cur;
    next.eps_cur = epsilon_star_step(es, L.rbar[n], L.rbar[n + 1], up, down);
    return next;
}

// Leading-order reflection data at the temperature extremes, for validating
// trajectories: as k -> infinity both decay like k^{-N}; as k -> 0 the
// first datum vanishes like k^N while the second grows like k^{-N}.
enum class TemperatureRegime { zero_temperature, infinite_temperature };

inline ReflectionPair asymptotic_reflections(int N, double k, TemperatureRegime reg) {
    if (N < 1) throw domain_error("asymptotic_reflections: require N >= 1");
    const double fact_N = gamma_fn(N + 1.0);
    if (reg == TemperatureRegime::zero_temperature) {
        if (!(k >= 20.0))
            throw domain_error("asymptotic_reflections: zero-temperature form needs "
                               "k >= 20");
        const double kn = std::pow(k, double(-N));
        return {pochhammer(-0.5, N) / fact_N * kn, pochhammer(0.5, N) / fact_N * kn};
    }
    if (!(k <= 0.05))
        throw domain_error("asymptotic_reflections: infinite-temperature form needs "
                           "k <= 0.05");
    return {pochhammer(-0.5, N) / gamma_fn(N + 2.0) * std::pow(k, double(N)),
            fact_N / pochhammer(0.5, N) * std::pow(k, double(-N))};
}

} // namespace isingcorr

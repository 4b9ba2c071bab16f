// Acceptance gate: ten numbered end-to-end checks over the whole library,
// one PASS/FAIL line each. Every sub-check carries its own pinned
// tolerance; a line's "margin" is the worst observed deviation divided by
// its tolerance, so any margin above 1 fails. The exit status is the
// number of failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "isingcorr/correlations.hpp"

using namespace isingcorr;

namespace {

double suite_seconds = 0.0;
int failures = 0;

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }
double crel(cxd x, cxd ref) { return std::abs(x - ref) / std::abs(ref); }

// Runs one check body (returning its worst margin), times it, and prints
// the line. A nonzero time budget in seconds is part of the gate.
template <typename F>
void check(int id, const char* what, double budget, F&& body) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    double margin = 0.0;
    bool threw = false;
    std::string msg;
    try {
        margin = body();
    } catch (const std::exception& e) {
        threw = true;
        msg = e.what();
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    suite_seconds += secs;
    const bool in_budget = budget == 0.0 || secs < budget;
    const bool pass = !threw && margin <= 1.0 && in_budget;
    if (!pass) ++failures;
    if (threw) {
        std::printf("[%2d] FAIL  %-58s threw: %s\n", id, what, msg.c_str());
        return;
    }
    std::printf("[%2d] %s  %-58s margin %8.2e  %6.3f s", id, pass ? "PASS" : "FAIL",
                what, margin, secs);
    if (budget > 0.0) std::printf("  (budget %.0f s)", budget);
    std::printf("\n");
}

// Normalized residual of the three-term relation linking consecutive
// associated functions through the reflection ladder.
double tt_residual(const ReflectionLadder& L, const std::vector<cxd>& e, int n,
                   cxd z) {
    const double up = std::sqrt(L.kappa2[n] / L.kappa2[n + 1]);
    const double down = std::sqrt(L.kappa2[n - 1] / L.kappa2[n]);
    const cxd t1 = up * L.rbar[n] * e[n + 1];
    const cxd t2 = -(L.rbar[n] + L.rbar[n + 1] * z) * e[n];
    const cxd t3 = down * L.rbar[n + 1] * z * e[n - 1];
    return std::abs(t1 + t2 + t3) /
           std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
}

} // namespace

int main() {
    // 1. Closed-form moments against contour quadrature on a midpoint grid.
    check(1, "moments: closed forms vs contour quadrature", 2.0, [] {
        const double tol = 1e-10;
        const auto g = circle_grid(4096, pi / 4096);
        double m = 0.0;
        for (double k : {0.3, 0.5, 2.0, 4.0})
            for (int n = -8; n <= 8; ++n)
                m = std::max(
                    m, rel(moment_quadrature(n, k, g), moment_closed(n, k)) / tol);
        return m;
    });

    // 2. The k -> 1/k map at every level: moments, shifted determinants,
    // and reflection data (both the solver route and the stepped ladder).
    check(2, "duality: moments, shifted determinants, reflections", 0.0, [] {
        const double tol = 1e-9;
        double m = 0.0;
        for (double k : {0.3, 0.5, 2.0, 4.0}) {
            for (int n = -8; n <= 8; ++n)
                m = std::max(m, rel(moment_closed(n, 1.0 / k),
                                    -moment_closed(-n + 1, k)) /
                                    tol);
            const auto a = moment_window(-10, 10, k);
            const auto ad = moment_window(-10, 10, 1.0 / k);
            for (int n = 0; n <= 8; ++n) {
                const double sign = n % 2 == 0 ? 1.0 : -1.0;
                for (int eps : {-1, 0, 1}) {
                    const double lhs = shifted_toeplitz_det(ad, n, eps);
                    const double rhs = sign * shifted_toeplitz_det(a, n, -1 - eps);
                    m = std::max(m, std::abs(lhs - rhs) /
                                        std::max({1.0, std::abs(lhs), std::abs(rhs)}) /
                                        tol);
                }
            }
            const auto Lk = run_recurrence(8, k);
            const auto Ld = run_recurrence(8, 1.0 / k);
            for (int n = 1; n <= 8; ++n) {
                const auto s = biorth_solve(a, n);
                const auto sd = biorth_solve(ad, n);
                m = std::max(m, std::abs(sd.rbar * s.rbar - 1.0) / tol);
                m = std::max(m, std::abs(Ld.rbar[n] * Lk.rbar[n] - 1.0) / tol);
            }
        }
        return m;
    });

    // 3. The stepped reflection ladder against independently computed
    // structured determinants, plus the determinant-ratio identity
    // I_{N+1} I_{N-1} / I_N^2 = 1 - r_N rbar_N along the way.
    check(3, "reflection ladder vs structured determinants", 0.0, [] {
        const double tol_det = 1e-8;
        const double tol_ratio = 1e-9;
        double m = 0.0;
        for (double k : {0.3, 0.5, 2.0, 4.0}) {
            const auto L = run_recurrence(16, k);
            const auto a = moment_window(-15, 15, k);
            for (int n = 1; n <= 15; ++n) {
                m = std::max(m, rel(L.I[n], toeplitz_det(a, n)) / tol_det);
                const double lhs = L.I[n + 1] * L.I[n - 1] / (L.I[n] * L.I[n]);
                m = std::max(
                    m, std::abs(lhs - (1.0 - L.r[n] * L.rbar[n])) / tol_ratio);
            }
        }
        return m;
    });

    // 4. Everything at the critical coupling: the gamma-product diagonal
    // values, the rational reflection table, and the closed-form
    // polynomial/associated-function system against the linear solver and
    // contour quadrature. Inside the unit circle the quadrature lands on
    // the other side of the weight's cut, so the jump term 2 W phi is
    // added back before comparing.
    check(4, "critical coupling: closed forms, table, function system", 0.0, [] {
        const double tol_det = 1e-10;
        const double tol_table = 1e-9;
        const double tol_sys = 1e-8;
        double m = 0.0;
        const auto L = run_recurrence(10, 1.0);
        for (int n = 0; n <= 10; ++n)
            m = std::max(m, rel(L.I[n], critical_diagonal(n)) / tol_det);
        for (int n = 1; n <= 10; ++n) {
            m = std::max(m, std::abs(L.r[n] - critical_r(n)) / tol_table);
            m = std::max(m, std::abs(L.rbar[n] - critical_rbar(n)) / tol_table);
        }
        const int n = 2;
        const auto g = circle_grid(131072, pi / 131072);
        const auto a = moment_window(-n, n, 1.0);
        const auto s = biorth_solve(a, n);
        for (double zr : {-0.5, -2.0, -5.0}) {
            const cxd z(zr, 0.0);
            const auto cs = critical_system(n, z);
            m = std::max(m, crel(s.phi(z), cs.phi) / tol_sys);
            m = std::max(m, crel(s.phi_star(z), cs.phi_star) / tol_sys);
            cxd es = epsilon_star_direct(n, z, 1.0, g);
            cxd e = epsilon_direct(n, z, 1.0, g);
            if (std::abs(z) < 1.0) {
                const cxd W = ortho_weight(z, 1.0);
                es += 2.0 * W * s.phi_star(z);
                e -= 2.0 * W * s.phi(z);
            }
            m = std::max(m, crel(es, cs.eps_star) / tol_sys);
            m = std::max(m, crel(e, cs.eps) / tol_sys);
        }
        return m;
    });

    // 5. Next-to-diagonal values three ways on an anisotropic grid:
    // associated-function seeds, bordered determinants, and (for the first
    // two separations) the elliptic closed forms.
    check(5, "next-diagonal: seeds vs bordered dets vs closed forms", 30.0, [] {
        const double tol = 1e-7;
        double m = 0.0;
        for (double k : {0.5, 1.25, 2.0})
            for (double S : {0.6, 1.0, 1.7}) {
                const auto p = ising_params(S, k / S);
                for (int N = 1; N <= 8; ++N) {
                    const double ve =
                        nextdiag_corr(N, p, Method::epsilon_recurrence).value;
                    const double vd = nextdiag_corr(N, p, Method::determinant).value;
                    m = std::max(m, rel(ve, vd) / tol);
                    if (N <= 2)
                        m = std::max(
                            m,
                            rel(nextdiag_corr(N, p, Method::elliptic).value, vd) /
                                tol);
                }
            }
        return m;
    });

    // 6. Three-term relation satisfied by quadrature-evaluated associated
    // functions at two off-critical points, and by the closed critical
    // family.
    check(6, "three-term relation for associated functions", 0.0, [] {
        const double tol_off = 1e-8;
        const double tol_crit = 1e-10;
        double m = 0.0;
        const struct {
            double k;
            cxd z;
        } pts[] = {{0.8, {-0.4, 0.0}}, {2.0, {-3.0, 0.5}}};
        for (const auto& pt : pts) {
            const auto g = circle_grid(4096, pi / 4096);
            const auto L = run_recurrence(9, pt.k);
            std::vector<cxd> e(10);
            for (int j = 0; j <= 9; ++j)
                e[j] = epsilon_star_direct(j, pt.z, pt.k, g);
            for (int n = 1; n <= 8; ++n)
                m = std::max(m, tt_residual(L, e, n, pt.z) / tol_off);
        }
        const auto Lc = run_recurrence(9, 1.0);
        for (double zr : {-2.0, -0.5}) {
            const cxd z(zr, 0.0);
            std::vector<cxd> e(10);
            for (int j = 0; j <= 9; ++j) e[j] = critical_system(j, z).eps_star;
            for (int n = 1; n <= 8; ++n)
                m = std::max(m, tt_residual(Lc, e, n, z) / tol_crit);
        }
        return m;
    });

    // 7. The two one-sided limits toward the isotropic line, taken with a
    // log-aware extrapolant (exact on 1, s, s ln s, s^2), must agree with
    // each other and with the on-line value; at the critical point the
    // routed evaluator must hit sqrt(2)/2.
    check(7, "isotropic line: two-sided limits and critical value", 0.0, [] {
        const double tol_lim = 1e-6;
        const double tol_crit = 1e-8;
        const double delta = 8e-3;
        const double w[4] = {-1.0 / 3.0, 8.0 / 3.0, -20.0 / 3.0, 16.0 / 3.0};
        double m = 0.0;
        for (double k : {0.5, 1.0, 2.0}) {
            const double S = std::sqrt(k);
            const double ref = k == 1.0 ? std::sqrt(2.0) / 2.0
                                        : nextdiag_landen(1, ising_params(S, S));
            double lim[2];
            for (int side = 0; side < 2; ++side) {
                const double sgn = side == 0 ? 1.0 : -1.0;
                double acc = 0.0;
                double s = delta;
                for (int j = 0; j < 4; ++j, s /= 2.0)
                    acc += w[j] * nextdiag_corr(1, ising_params(S, S * (1.0 + sgn * s)),
                                                Method::elliptic)
                                      .value;
                lim[side] = acc;
            }
            m = std::max(m, std::abs(lim[0] - lim[1]) / tol_lim);
            m = std::max(m, std::abs(lim[0] - ref) / tol_lim);
            m = std::max(m, std::abs(lim[1] - ref) / tol_lim);
        }
        m = std::max(m,
                     std::abs(nextdiag_isotropic_limit(1, ising_params(1.0, 1.0)).value -
                              std::sqrt(2.0) / 2.0) /
                         tol_crit);
        return m;
    });

    // 8. Extreme couplings: the elliptic initial data must sit within 1%
    // of the leading asymptotic forms, and the deep-ordered diagonal
    // correlation must saturate above 0.999 through the first five
    // separations.
    check(8, "extreme couplings: asymptotic seeds and saturation", 0.0, [] {
        const double tol = 1e-2;
        double m = 0.0;
        const auto ih = initial_reflections(100.0);
        const auto ah =
            asymptotic_reflections(1, 100.0, TemperatureRegime::zero_temperature);
        m = std::max(m, rel(ih.r, ah.r) / tol);
        m = std::max(m, rel(ih.rbar, ah.rbar) / tol);
        const auto il = initial_reflections(0.01);
        const auto al =
            asymptotic_reflections(1, 0.01, TemperatureRegime::infinite_temperature);
        m = std::max(m, rel(il.r, al.r) / tol);
        m = std::max(m, rel(il.rbar, al.rbar) / tol);
        for (int N = 1; N <= 5; ++N)
            if (!(diag_corr(N, 100.0).value > 0.999)) m = std::max(m, 2.0);
        return m;
    });

    // 9. The orthogonality weight is unimodular on the contour at every
    // sampled coupling, critical included.
    check(9, "weight unimodularity on the contour", 0.0, [] {
        const double tol = 1e-12;
        const auto g = circle_grid(1024, pi / 1024);
        double m = 0.0;
        for (double k : {0.3, 0.5, 0.9, 1.0, 1.1, 2.0, 4.0, 100.0})
            for (int j = 0; j < g.M; ++j)
                m = std::max(
                    m, std::abs(std::abs(weight_eval(g.nodes[j], k)) - 1.0) / tol);
        return m;
    });

    // 10. The whole gate must finish inside a minute.
    {
        const double budget = 60.0;
        const bool pass = suite_seconds < budget;
        if (!pass) ++failures;
        std::printf("[10] %s  %-58s margin %8.2e  %6.3f s  (budget %.0f s)\n",
                    pass ? "PASS" : "FAIL", "total runtime of checks 1-9",
                    suite_seconds / budget, suite_seconds, budget);
    }

    std::printf("%d/10 checks passed\n", 10 - failures);
    return failures;
}

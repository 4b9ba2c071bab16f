#pragma once

// Real special-function kernel: Gamma, Pochhammer, Gauss 2F1, complete
// elliptic integrals of all three kinds, inverse Landen transformation.
//
// Conventions: elliptic integrals take the modulus k as argument (not the
// parameter m = k^2 used by Abramowitz & Stegun 17.3), and the third kind is
//
//   Pi(n,k) = int_0^{pi/2} dphi / ((1 - n sin^2 phi) sqrt(1 - k^2 sin^2 phi)),
//
// with characteristic n < 1 so the first factor never vanishes on the range.
// Accuracy target is 1e-12 relative throughout; the downstream determinant
// cross-checks need about 1e-8, so this leaves headroom.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>

#include "isingcorr/errors.hpp"

namespace isingcorr {

inline constexpr double pi = 3.14159265358979323846264338327950288;

namespace detail {

inline bool is_nonpositive_integer(double x, int* magnitude = nullptr) {
    if (x > 0.0 || x != std::floor(x)) return false;
    if (x < -1.0e9) return false; // treat as generic; nothing downstream uses such values
    if (magnitude) *magnitude = static_cast<int>(-x);
    return true;
}

template <typename X>
double magnitude_of(const X& x) {
    if constexpr (std::is_floating_point_v<X>) {
        return std::abs(x);
    } else {
        return std::abs(x);
    }
}

} // namespace detail

// Gamma(x) for real x away from the poles at 0, -1, -2, ...
template <typename T = double>
T gamma_fn(T x) {
    int dummy = 0;
    if (detail::is_nonpositive_integer(static_cast<double>(x), &dummy))
        throw domain_error("gamma_fn: pole at nonpositive integer x = " +
                           std::to_string(static_cast<double>(x)));
    return std::tgamma(x);
}

// Pochhammer symbol (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1.
template <typename T = double>
T pochhammer(T a, int n) {
    if (n < 0) throw domain_error("pochhammer: n must be nonnegative");
    T p = T(1);
    for (int j = 0; j < n; ++j) p *= a + T(j);
    return p;
}

namespace detail {

// Ascending series sum_{j} (a)_j (b)_j / ((c)_j j!) x^j with compensated
// accumulation. terminate_at >= 0 runs exactly that many terms (finite sum
// for a polynomial case); otherwise the series stops when terms fall below
// the roundoff floor of the partial sum.
template <typename X>
X hyp2f1_series(double a, double b, double c, X x, int terminate_at = -1) {
    constexpr int max_terms = 4000000;
    const double eps = std::numeric_limits<double>::epsilon();
    X sum = X(1);
    X comp = X(0);
    X term = X(1);
    const int limit = terminate_at >= 0 ? terminate_at : max_terms;
    int quiet = 0;
    for (int j = 0; j < limit; ++j) {
        term *= (X((a + j) * (b + j)) / X((c + j) * (1.0 + j))) * x;
        X y = term - comp;
        X t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (terminate_at < 0) {
            if (magnitude_of(term) <= eps * magnitude_of(sum)) {
                if (++quiet >= 2) return sum;
            } else {
                quiet = 0;
            }
        }
    }
    if (terminate_at < 0)
        throw convergence_error("hyp2f1: series did not settle within term budget");
    return sum;
}

} // namespace detail

// Gauss hypergeometric function 2F1(a,b;c;x).
//
// Strategy: terminating series (a or b a nonpositive integer) is summed
// directly for any argument; otherwise x < 0 is mapped into [0,1) by the
// Pfaff transformation
//
//   2F1(a,b;c;x) = (1-x)^(-a) 2F1(a, c-b; c; x/(x-1)),
//
// and 0 <= x < 1 is summed directly (the series converges for all x < 1;
// close to 1 it is merely slow, which the term budget absorbs). Every
// argument required downstream (k^{\pm 2} in (0,1), negative -S^2, negative
// reciprocal spectral points) lands in a convergent region under this map.
// Also instantiable with a complex argument, used for the terminating and
// half-plane Re x < 1/2 cases only.
template <typename X = double>
X hyp2f1(double a, double b, double c, X x) {
    int c_mag = 0;
    const bool c_bad = detail::is_nonpositive_integer(c, &c_mag);
    int d = -1; // termination degree
    int m = 0;
    if (detail::is_nonpositive_integer(a, &m)) d = m;
    if (detail::is_nonpositive_integer(b, &m)) d = (d < 0) ? m : std::min(d, m);
    if (c_bad && (d < 0 || d > c_mag))
        throw domain_error("hyp2f1: c is a nonpositive integer");
    if (d >= 0) return detail::hyp2f1_series(a, b, c, x, d);

    const double xr = [&] {
        if constexpr (std::is_floating_point_v<X>) return static_cast<double>(x);
        else return x.real();
    }();

    if (xr < 0.0) {
        X y = x / (x - X(1));
        return std::pow(X(1) - x, X(-a)) * detail::hyp2f1_series(a, c - b, c, y);
    }
    if constexpr (std::is_floating_point_v<X>) {
        if (x >= 1.0) throw domain_error("hyp2f1: argument must satisfy x < 1");
    } else {
        if (std::abs(x) >= 1.0) {
            if (xr < 0.5) {
                X y = x / (x - X(1));
                return std::pow(X(1) - x, X(-a)) * detail::hyp2f1_series(a, c - b, c, y);
            }
            throw domain_error("hyp2f1: complex argument outside the convergent disc");
        }
    }
    return detail::hyp2f1_series(a, b, c, x);
}

// Complete elliptic integral of the first kind by the arithmetic-geometric
// mean: K(k) = pi / (2 agm(1, k')). Quadratic convergence, full precision in
// a handful of sweeps (Abramowitz & Stegun 17.6).
template <typename T = double>
T ellip_K(T k) {
    if (!(k >= T(0)) || k >= T(1))
        throw domain_error("ellip_K: modulus must lie in [0,1)");
    T a = T(1);
    T b = std::sqrt((T(1) - k) * (T(1) + k));
    const T eps = std::numeric_limits<T>::epsilon();
    for (int i = 0; i < 64 && std::abs(a - b) > eps * a; ++i) {
        T am = (a + b) / T(2);
        b = std::sqrt(a * b);
        a = am;
    }
    return T(pi) / (a + b);
}

// Complete elliptic integral of the second kind by the AGM with the
// c_n-sum: E = K (1 - sum_n 2^{n-1} c_n^2), c_0 = k (Abramowitz & Stegun
// 17.6.4). E(1) = 1 is taken exactly.
template <typename T = double>
T ellip_E(T k) {
    if (!(k >= T(0)) || k > T(1))
        throw domain_error("ellip_E: modulus must lie in [0,1]");
    if (k == T(1)) return T(1);
    T a = T(1);
    T b = std::sqrt((T(1) - k) * (T(1) + k));
    T c = k;
    T sum = c * c / T(2);
    T two_pow = T(1) / T(2);
    const T eps = std::numeric_limits<T>::epsilon();
    for (int i = 0; i < 64 && std::abs(c) > eps; ++i) {
        c = (a - b) / T(2);
        T am = (a + b) / T(2);
        b = std::sqrt(a * b);
        a = am;
        two_pow *= T(2);
        sum += two_pow * c * c;
    }
    return (T(pi) / (a + b)) * (T(1) - sum);
}

// Carlson symmetric forms, by the duplication theorem with the fifth-order
// Taylor tail (Carlson 1995, Numerical computation of real or complex
// elliptic integrals, secs. 2-3). With loop tolerance t the truncation error
// is O(t^6), far below double roundoff at t = 1e-3.

template <typename T = double>
T carlson_rf(T x, T y, T z) {
    if (x < T(0) || y < T(0) || z < T(0) || (x + y) == T(0) || (y + z) == T(0) ||
        (z + x) == T(0))
        throw domain_error("carlson_rf: arguments outside domain");
    const T errtol = T(1e-3);
    T dx, dy, dz, ave;
    for (int i = 0; i < 128; ++i) {
        T sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        T lam = sx * (sy + sz) + sy * sz;
        x = (x + lam) / T(4);
        y = (y + lam) / T(4);
        z = (z + lam) / T(4);
        ave = (x + y + z) / T(3);
        dx = (ave - x) / ave;
        dy = (ave - y) / ave;
        dz = (ave - z) / ave;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < errtol) break;
    }
    T e2 = dx * dy - dz * dz;
    T e3 = dx * dy * dz;
    return (T(1) + (e2 / T(24) - T(0.1) - T(3) * e3 / T(44)) * e2 + e3 / T(14)) /
           std::sqrt(ave);
}

template <typename T = double>
T carlson_rc(T x, T y) {
    if (x < T(0) || y <= T(0))
        throw domain_error("carlson_rc: requires x >= 0, y > 0");
    const T errtol = T(6e-4);
    T s, ave;
    for (int i = 0; i < 256; ++i) {
        T lam = T(2) * std::sqrt(x) * std::sqrt(y) + y;
        x = (x + lam) / T(4);
        y = (y + lam) / T(4);
        ave = (x + y + y) / T(3);
        s = (y - ave) / ave;
        if (std::abs(s) < errtol) break;
    }
    return (T(1) +
            s * s * (T(0.3) + s * (T(1) / T(7) + s * (T(0.375) + s * T(9) / T(22))))) /
           std::sqrt(ave);
}

template <typename T = double>
T carlson_rj(T x, T y, T z, T p) {
    if (x < T(0) || y < T(0) || z < T(0) || p <= T(0) || (x + y) == T(0) ||
        (y + z) == T(0) || (z + x) == T(0))
        throw domain_error("carlson_rj: arguments outside domain (p > 0 required)");
    const T errtol = T(1e-3);
    const T C1 = T(3) / T(14), C2 = T(1) / T(3), C3 = T(3) / T(22), C4 = T(3) / T(26);
    T sum = T(0), fac = T(1);
    T dx, dy, dz, dp, ave;
    for (int i = 0; i < 128; ++i) {
        T sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        T lam = sx * (sy + sz) + sy * sz;
        T alpha = p * (sx + sy + sz) + sx * sy * sz;
        alpha *= alpha;
        T beta = p * (p + lam) * (p + lam);
        sum += fac * carlson_rc(alpha, beta);
        fac /= T(4);
        x = (x + lam) / T(4);
        y = (y + lam) / T(4);
        z = (z + lam) / T(4);
        p = (p + lam) / T(4);
        ave = (x + y + z + T(2) * p) / T(5);
        dx = (ave - x) / ave;
        dy = (ave - y) / ave;
        dz = (ave - z) / ave;
        dp = (ave - p) / ave;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz), std::abs(dp)}) < errtol)
            break;
    }
    T ea = dx * (dy + dz) + dy * dz;
    T eb = dx * dy * dz;
    T ec = dp * dp;
    T ed = ea - T(3) * ec;
    T ee = eb + T(2) * dp * (ea - ec);
    T tail = T(1) + ed * (-C1 + T(0.75) * C1 * ed - T(1.5) * C4 * ee) +
             eb * (T(0.5) * C2 + dp * (-C3 - C3 + dp * C4)) + dp * ea * (C2 - dp * C3) -
             C2 * dp * ec;
    return T(3) * sum + fac * tail / (ave * std::sqrt(ave));
}

namespace detail {

// Adaptive Gauss(7)-Kronrod(15) quadrature (node/weight set of QUADPACK's
// QK15). Used as the fallback evaluator for the third elliptic integral when
// the characteristic is extreme, and by tests as an independent oracle.
template <typename F>
double gk15(F&& f, double a, double b, double* err) {
    static const double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static const double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static const double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = wgk[7] * fc;
    double resg = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        resk += wgk[j] * fsum;
        if (j % 2 == 1) resg += wg[j / 2] * fsum;
    }
    if (err) *err = std::abs((resk - resg) * h);
    return resk * h;
}

template <typename F>
double adaptive_gk(F&& f, double a, double b, double tol, int depth = 0) {
    double err = 0.0;
    const double whole = gk15(f, a, b, &err);
    if (err <= tol || (b - a) <= std::numeric_limits<double>::epsilon() * std::abs(a))
        return whole;
    if (depth >= 48)
        throw convergence_error("adaptive_gk: recursion depth exhausted");
    const double c = 0.5 * (a + b);
    return adaptive_gk(f, a, c, tol / 2, depth + 1) +
           adaptive_gk(f, c, b, tol / 2, depth + 1);
}

} // namespace detail

// Complete elliptic integral of the third kind,
// Pi(n,k) = R_F(0,1-k^2,1) + (n/3) R_J(0,1-k^2,1,1-n).
//
// For extreme negative characteristics the Carlson route loses relative
// accuracy to cancellation (Pi itself shrinks like |n|^{-1/2} while the two
// terms stay O(K)), so the defining integral is evaluated adaptively
// instead; the integrand is then a benign spike of width |n|^{-1/2} at the
// origin, which the bisection resolves.
template <typename T = double>
T ellip_Pi(T n, T k) {
    if (!(k >= T(0)) || k >= T(1))
        throw domain_error("ellip_Pi: modulus must lie in [0,1)");
    if (n >= T(1))
        throw domain_error("ellip_Pi: singular characteristic (n >= 1)");
    const T kp2 = (T(1) - k) * (T(1) + k);
    if (n > T(-1e8)) {
        return carlson_rf(T(0), kp2, T(1)) +
               (n / T(3)) * carlson_rj(T(0), kp2, T(1), T(1) - n);
    }
    auto integrand = [n, k](double phi) {
        const double s2 = std::sin(phi) * std::sin(phi);
        return 1.0 / ((1.0 - n * s2) * std::sqrt(1.0 - k * k * s2));
    };
    // Pi ~ pi/(2 sqrt(-n)) here; an absolute floor keeps the tolerance above
    // the roundoff noise of the panel error estimate.
    const double scale = pi / (2.0 * std::sqrt(-static_cast<double>(n)));
    const double tol = std::max(1e-12 * scale, 1e-15);
    return detail::adaptive_gk(integrand, 0.0, pi / 2, tol);
}

// Inverse Landen transformation k -> 2 sqrt(k)/(1+k), with complementary
// modulus |1-k|/(1+k) written in its exact algebraic form. Invariant under
// k -> 1/k.
struct LandenModuli {
    double k_dia;
    double kprime_dia;
};

inline LandenModuli inverse_landen(double k) {
    if (!(k > 0.0)) throw domain_error("inverse_landen: requires k > 0");
    return {2.0 * std::sqrt(k) / (1.0 + k), std::abs(1.0 - k) / (1.0 + k)};
}

// Bundle of complete elliptic integrals sharing one modulus.
struct EllipticTriple {
    double K;
    double E;
    std::optional<double> Pi;
    double modulus;
    std::optional<double> characteristic;
};

inline EllipticTriple elliptic_triple(double modulus,
                                      std::optional<double> characteristic = {}) {
    EllipticTriple t;
    t.modulus = modulus;
    t.K = ellip_K(modulus);
    t.E = ellip_E(modulus);
    t.characteristic = characteristic;
    if (characteristic) t.Pi = ellip_Pi(*characteristic, modulus);
    return t;
}

} // namespace isingcorr

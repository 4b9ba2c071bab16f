#pragma once

// Independent quadrature oracle for the test suite: a 64-point
// Gauss-Legendre rule with nodes located by Newton iteration on P_64
// (Numerical Recipes gauleg). Deliberately separate from the library's own
// circle quadrature so that integral cross-checks do not share code with the
// thing being checked.

#include <cmath>
#include <cstddef>
#include <vector>

namespace testing_oracles {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct GaussLegendre {
    std::vector<double> x, w;
};

inline const GaussLegendre& gl64() {
    static const GaussLegendre rule = [] {
        const int n = 64;
        GaussLegendre r;
        r.x.resize(n);
        r.w.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
                }
                pp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            r.x[i] = -z;
            r.x[n - 1 - i] = z;
            r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            r.w[n - 1 - i] = r.w[i];
        }
        return r;
    }();
    return rule;
}

template <typename F>
double integrate(F&& f, double a, double b) {
    const auto& r = gl64();
    const double c = 0.5 * (b + a), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

// Composite version for integrands with localized structure.
template <typename F>
double integrate_panels(F&& f, double a, double b, int panels) {
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + (b - a) * i / panels;
        const double pb = a + (b - a) * (i + 1) / panels;
        s += integrate(f, pa, pb);
    }
    return s;
}

} // namespace testing_oracles

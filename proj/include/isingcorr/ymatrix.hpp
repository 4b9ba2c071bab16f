#pragma once

// 2x2 spectral matrix pairing the order-n polynomials with their associated
// functions,
//
//   Y_n(z) = [ phi_n(z)    eps_n(z)  / W(z) ]
//            [ phi*_n(z)  -eps*_n(z) / W(z) ],
//
// where W is the orthogonality weight continued off the circle by its
// principal-branch formula along the evaluation ray. Assembled numerically
// only; no monodromy analysis is attempted here.

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "isingcorr/detkit.hpp"
#include "isingcorr/errors.hpp"
#include "isingcorr/quadrature.hpp"
#include "isingcorr/weight.hpp"

namespace isingcorr {

inline Eigen::Matrix2cd assemble_Y(int n, cxd z, double k, const CircleGrid& g) {
    if (n < 0) throw domain_error("assemble_Y: negative order");
    auto a = moment_window(-n, n, k);
    auto s = biorth_solve(a, n);

    // one pass of weight samples serves both kernel integrals
    std::vector<cxd> wphi(g.M), wphistar(g.M);
    for (int j = 0; j < g.M; ++j) {
        const cxd W = ortho_weight(g.nodes[j], k);
        wphi[j] = W * s.phi(g.nodes[j]);
        wphistar[j] = W * s.phi_star(g.nodes[j]);
    }
    const cxd eps = cauchy_kernel_integral(wphi, z, g);
    const cxd eps_star = cxd(1.0 / s.kappa) - cauchy_kernel_integral(wphistar, z, g);

    const cxd W_at_z = ortho_weight(z, k);
    Eigen::Matrix2cd Y;
    Y(0, 0) = s.phi(z);
    Y(0, 1) = eps / W_at_z;
    Y(1, 0) = s.phi_star(z);
    Y(1, 1) = -eps_star / W_at_z;
    return Y;
}

} // namespace isingcorr

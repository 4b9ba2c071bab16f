#pragma once

// Structured determinant kernel on Eigen: Toeplitz and bordered-Toeplitz
// assembly from moment windows, the shifted-index determinant family, and
// the biorthogonal (two-sided) polynomial solve whose reflection data feed
// the nonlinear recurrences.
//
// Conventions: the order-N Toeplitz determinant with shift eps is
// det [ a_{-eps+i-j} ], i,j = 0..N-1, equal to 1 at N = 0. The bordered
// variant replaces the last column by border values b_{N-1-i}. The
// biorthogonal pairing is <zeta^p, zeta^q> = a_{q-p}; both monic families
// at order n share the norm h_n = I_{n+1}/I_n, and their constant terms
// r_n, rbar_n are the reflection coefficients.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "isingcorr/errors.hpp"
#include "isingcorr/weight.hpp"

namespace isingcorr {

// Contiguous table of moments a_n for n in [n_min, n_min + size).
struct MomentWindow {
    std::vector<double> values;
    int n_min = 0;

    double at(int n) const {
        const int i = n - n_min;
        if (i < 0 || i >= static_cast<int>(values.size()))
            throw evaluation_error("MomentWindow: index " + std::to_string(n) +
                                   " outside [" + std::to_string(n_min) + ", " +
                                   std::to_string(n_min + int(values.size()) - 1) +
                                   "]");
        return values[i];
    }
};

inline MomentWindow moment_window(int n_min, int n_max, double k) {
    return {moment_table(n_min, n_max, k), n_min};
}

inline MomentWindow dual_moment_window(int n_min, int n_max, double k) {
    return moment_window(n_min, n_max, 1.0 / k);
}

// N x N matrix with entries a_{offset + i - j}.
inline Eigen::MatrixXd toeplitz_matrix(const MomentWindow& a, int N, int offset = 0) {
    if (N < 0) throw domain_error("toeplitz_matrix: negative order");
    Eigen::MatrixXd m(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m(i, j) = a.at(offset + i - j);
    return m;
}

// Body a_{i-j} with the last column replaced by b_{N-1-i}; b must supply
// b_0..b_{N-1}.
inline Eigen::MatrixXd bordered_toeplitz_matrix(const MomentWindow& a,
                                                const std::vector<double>& b, int N) {
    if (N < 1) throw domain_error("bordered_toeplitz_matrix: order must be >= 1");
    if (static_cast<int>(b.size()) < N)
        throw domain_error("bordered_toeplitz_matrix: border too short");
    Eigen::MatrixXd m(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j + 1 < N; ++j) m(i, j) = a.at(i - j);
        m(i, N - 1) = b[N - 1 - i];
    }
    return m;
}

inline double lu_det(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw domain_error("lu_det: matrix not square");
    if (m.rows() == 0) return 1.0;
    return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

// I^eps_N = det [ a_{-eps+i-j} ]; I^eps_0 = 1.
inline double shifted_toeplitz_det(const MomentWindow& a, int N, int eps) {
    if (N == 0) return 1.0;
    return lu_det(toeplitz_matrix(a, N, -eps));
}

inline double toeplitz_det(const MomentWindow& a, int N) {
    return shifted_toeplitz_det(a, N, 0);
}

inline double bordered_toeplitz_det(const MomentWindow& a, const std::vector<double>& b,
                                    int N) {
    return lu_det(bordered_toeplitz_matrix(a, b, N));
}

// Order-n slice of the biorthogonal system. chat/dhat hold the non-leading
// coefficients of the two monic families; h is their pairing norm, kappa
// its inverse square root, r and rbar the constant terms.
struct BiorthSystem {
    int n = 0;
    Eigen::VectorXd chat;
    Eigen::VectorXd dhat;
    double h = 0.0;
    double kappa = 0.0;
    double r = 1.0;
    double rbar = 1.0;

    // normalized first-family polynomial kappa (z^n + sum_p chat_p z^p)
    cxd phi(cxd z) const {
        cxd acc(1.0, 0.0);
        for (int p = n - 1; p >= 0; --p) acc = acc * z + chat(p);
        return kappa * acc;
    }
    // normalized second-family polynomial
    cxd phibar(cxd z) const {
        cxd acc(1.0, 0.0);
        for (int p = n - 1; p >= 0; --p) acc = acc * z + dhat(p);
        return kappa * acc;
    }
    // reciprocal polynomial z^n phibar(1/z): ascending coefficients
    // kappa * (dhat_n, dhat_{n-1}, ..., dhat_0) with dhat_n = 1
    cxd phi_star(cxd z) const {
        cxd acc(n > 0 ? dhat(0) : 1.0, 0.0);
        for (int m = 1; m <= n; ++m) acc = acc * z + (m == n ? cxd(1.0) : cxd(dhat(m)));
        return kappa * acc;
    }
};

// Solve both monic systems at order n against the pairing <z^p, z^q> =
// a_{q-p}; needs the window [-n, n]. Throws degeneracy_error if the Gram
// matrix is singular or the pairing norm is not positive; the two
// independent contractions of h must also agree, which catches silently
// ill-conditioned solves.
inline BiorthSystem biorth_solve(const MomentWindow& a, int n) {
    if (n < 0) throw domain_error("biorth_solve: negative order");
    BiorthSystem s;
    s.n = n;
    if (n == 0) {
        s.h = a.at(0);
        if (s.h <= 0.0)
            throw degeneracy_error("biorth_solve: pairing norm not positive at order 0");
        s.kappa = 1.0 / std::sqrt(s.h);
        s.chat.resize(0);
        s.dhat.resize(0);
        return s;
    }
    Eigen::MatrixXd A(n, n);
    for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) A(q, p) = a.at(q - p);
    Eigen::VectorXd rhs_c(n), rhs_d(n);
    for (int q = 0; q < n; ++q) rhs_c(q) = -a.at(q - n);
    for (int p = 0; p < n; ++p) rhs_d(p) = -a.at(n - p);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
        throw degeneracy_error("biorth_solve: Gram matrix singular at order " +
                               std::to_string(n));
    s.chat = lu.solve(rhs_c);
    Eigen::FullPivLU<Eigen::MatrixXd> luT(A.transpose());
    s.dhat = luT.solve(rhs_d);

    double h_d = a.at(0);
    for (int q = 0; q < n; ++q) h_d += s.dhat(q) * a.at(q - n);
    double h_c = a.at(0);
    for (int p = 0; p < n; ++p) h_c += s.chat(p) * a.at(n - p);
    if (std::abs(h_d - h_c) > 1e-6 * std::max(std::abs(h_d), 1e-300))
        throw degeneracy_error(
            "biorth_solve: inconsistent pairing contractions at order " +
            std::to_string(n));
    if (!(h_d > 0.0))
        throw degeneracy_error("biorth_solve: pairing norm not positive at order " +
                               std::to_string(n));
    s.h = h_d;
    s.kappa = 1.0 / std::sqrt(h_d);
    s.r = s.chat(0);
    s.rbar = s.dhat(0);
    return s;
}

} // namespace isingcorr

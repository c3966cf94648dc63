#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>

#include "hhpsi/resummed.hpp"

namespace hhpsi {

/// The constant-coefficient linear system satisfied by one grade of the
/// regrouped series,
///
///     d/dz (f_g, g_g, h_g, k_g)^T + A_g * (f_g, g_g, h_g, k_g)^T = F_g,
///
/// together with its diagonalization A_g = P D_g P^-1.  A_g depends on the
/// grade only through a multiple of the identity, so P is grade-independent
/// and the diagonal entries are g/n - k_r over the resonance set k_r
/// ({-1, 6, r, rbar} for the first balance, {-1, 0, 6, rbar} for the
/// second).  M_lambda = ||P|| * ||P^-1|| under the max-row-sum norm.
template <class R>
struct VariationalSystem {
    using C = std::complex<R>;
    using M4 = Eigen::Matrix<C, 4, 4>;

    int gamma = 0;
    int n = 1;
    M4 A;                        // A_gamma
    M4 P, Pinv;                  // eigenvectors and inverse
    Eigen::Matrix<C, 4, 1> D;    // diagonal of D_gamma, in P's column order
    R M_lambda = 0;              // conditioning constant of P
    std::array<ExpoSum<R>, 4> F; // forcing (F, G, H, K); empty rows 0 and 2
};

namespace detail {

// Forcing convolutions.  Products of exponential blocks land on grade
// g1 + g2 plus, for the first balance, a carry: a principal key (p, 0)
// times a conjugate key (0, q) reduces by c = min(p, q) steps, each step
// trading mu1 + mu2 = (5n - 2)/n of exponent for 5n - 2 units of grade.
// The second balance has additive keys and no carry.  Emits only terms
// landing exactly on `target`; pairs with a grade-0 factor cannot land on
// a higher target (grade-0 blocks are constants), which is consistent
// with the linear extraction of those products into A_gamma itself.
template <class R>
void convolve_into(ExpoSum<R>& out, const ResummedSeries<R>& s,
                   ExpoSum<R> GradeBlock<R>::*lhs,
                   ExpoSum<R> GradeBlock<R>::*rhs, std::complex<R> scale,
                   int target, bool carry) {
    for (int g1 = 1; g1 < target; ++g1)
        for (int g2 = 1; g1 + g2 <= target; ++g2) {
            const ExpoSum<R>& sa = s.grade(g1).*lhs;
            const ExpoSum<R>& sb = s.grade(g2).*rhs;
            for (const auto& ta : sa.terms())
                for (const auto& tb : sb.terms()) {
                    int p = ta.i1 + tb.i1;
                    int q = ta.i2 + tb.i2;
                    int c = carry ? std::min(p, q) : 0;
                    if (g1 + g2 + (5 * s.n - 2) * c != target) continue;
                    out.add(p - c, q - c, scale * ta.c * tb.c);
                }
        }
}

} // namespace detail

/// Matrices only (no forcing): enough for spectrum and conditioning work.
/// f0 is the leading x amplitude the linearization is taken around.
template <class R>
VariationalSystem<R> build_variational(const RegimeReport& reg,
                                       std::complex<R> f0, int gamma, int n) {
    using C = std::complex<R>;
    using M4 = typename VariationalSystem<R>::M4;
    if (gamma < 0) throw invalid_input("build_variational: gamma < 0");
    if (n < 1) throw invalid_input("build_variational: n < 1");

    const R lam = to_real<R>(reg.lambda);
    const bool two = reg.regime == RegimeCase::case_ii_positive ||
                     reg.regime == RegimeCase::case_ii_negative ||
                     reg.regime == RegimeCase::case_ii_repeated_zero ||
                     reg.regime == RegimeCase::case_ii_imaginary;

    VariationalSystem<R> v;
    v.gamma = gamma;
    v.n = n;
    const R gn = R(gamma) / R(n);

    M4 A0 = M4::Zero();
    M4 P = M4::Zero();
    Eigen::Matrix<C, 4, 1> D0;
    if (!two) {
        const C r = reg.r.value<R>();
        const C rb = reg.rbar.value<R>();
        A0 << C(-2), C(-1), C(0), C(0),                  //
            C(-6), C(-3), 2 * lam * f0, C(0),            //
            C(0), C(0), C(-2), C(-1),                    //
            2 * lam * f0, C(0), C(6 / lam), C(-3);
        const C w = C(3) * (2 + 1 / lam);
        P << -lam * f0, -lam * f0, lam * f0, lam * f0,          //
            3 * lam * f0, -4 * lam * f0, lam * f0 * (r - C(2)), //
            lam * f0 * (rb - C(2)),                             //
            C(3), C(3), w, w,                                   //
            C(-9), C(12), w * (r - C(2)), w * (rb - C(2));
        D0 << C(1), C(-6), -r, -rb;
    } else {
        const C ab = reg.alpha_bar.value<R>();
        const C s = reg.rbar.value<R>();
        A0 << ab, C(-1), C(0), C(0),                     //
            C(12 * lam), ab - C(1), 2 * lam * f0, C(0),  //
            C(0), C(0), C(-2), C(-1),                    //
            C(0), C(0), C(-12), C(-3);
        const C w = C(2) * ab + C(5);
        P << -ab / C(12) * f0, C(1), -lam * f0, C(1),     //
            lam * f0, ab, -lam * f0 * (ab + C(6)), C(1) - ab, //
            C(1), C(0), C(3) * w, C(0),                      //
            C(-3), C(0), C(12) * w, C(0);
        D0 << C(1), C(0), C(-6), -s;
    }
    v.A = A0 + gn * M4::Identity();
    v.P = P;
    const C det = P.determinant();
    const R pscale = P.cwiseAbs().maxCoeff();
    if (std::abs(det) <= 1e-12 * pscale * pscale * pscale * pscale)
        throw error(
            "variational eigenvector matrix is singular (degenerate "
            "resonances or vanishing leading amplitude)");
    v.Pinv = P.inverse();
    v.D = (D0.array() + C(gn)).matrix();
    const R pn = v.P.cwiseAbs().rowwise().sum().maxCoeff();
    const R pni = v.Pinv.cwiseAbs().rowwise().sum().maxCoeff();
    v.M_lambda = pn * pni;
    return v;
}

/// Full system for one grade of a resummed series: matrices plus the
/// forcing assembled from strictly lower grades.
///
///   first balance:  G = -A f_(g-2n) - 2 lam (f*h),
///                   K = -B h_(g-2n) - lam (f*f) + (h*h);
///   second balance: G = -A f_(g-2n) - 2 lam (f*h),
///                   K = -B h_(g-2n) + (h*h)
///                       - lam * e^(2 alphabar z) (f*f)_(g-4n, full range),
///
/// where (*) excludes grade-0 factors (those products are the linear terms
/// inside A_gamma) except in the second-balance f*f sum, whose 4n grade
/// shift keeps even its end-point products below the current grade.
template <class R>
VariationalSystem<R> build_variational(const ResummedSeries<R>& s, int gamma) {
    using C = std::complex<R>;
    if (gamma > s.gamma_max)
        throw invalid_input(
            "build_variational: gamma exceeds the resummed grade range");
    std::complex<R> f0 = s.grade(0).f.coeff(0, 0);
    VariationalSystem<R> v = build_variational<R>(s.regime, f0, gamma, s.n);

    const R lam = to_real<R>(s.regime.lambda);
    const R Ap = to_real<R>(s.regime.A);
    const R Bp = to_real<R>(s.regime.B);
    const bool carry = !s.second_balance;

    if (gamma >= 2 * s.n) {
        v.F[1].axpy(C(-Ap), s.grade(gamma - 2 * s.n).f);
        v.F[3].axpy(C(-Bp), s.grade(gamma - 2 * s.n).h);
    }
    detail::convolve_into(v.F[1], s, &GradeBlock<R>::f, &GradeBlock<R>::h,
                          C(-2 * lam), gamma, carry);
    detail::convolve_into(v.F[3], s, &GradeBlock<R>::h, &GradeBlock<R>::h,
                          C(1), gamma, carry);
    if (!s.second_balance) {
        detail::convolve_into(v.F[3], s, &GradeBlock<R>::f, &GradeBlock<R>::f,
                              C(-lam), gamma, carry);
    } else if (gamma >= 4 * s.n) {
        // x^2 forcing: full convolution, shifted by e^(2 alphabar z) and
        // 4n grades (the leading x block sits 2 + alphabar tau-powers
        // above the y block).
        for (int g1 = 0; g1 <= gamma - 4 * s.n; ++g1) {
            const ExpoSum<R>& sa = s.grade(g1).f;
            const ExpoSum<R>& sb = s.grade(gamma - 4 * s.n - g1).f;
            for (const auto& ta : sa.terms())
                for (const auto& tb : sb.terms())
                    v.F[3].add(ta.i1 + tb.i1 + 2, ta.i2 + tb.i2,
                               C(-lam) * ta.c * tb.c);
        }
    }
    return v;
}

/// Largest residual amplitude of  f' + A_g f - F_g  over the four rows,
/// relative to the largest amplitude appearing in the grade (blocks and
/// forcing).  Differentiation is term-exact, so this measures only the
/// consistency of the table recursion with the regrouped linear system.
template <class R>
R ode_residual(const ResummedSeries<R>& s, const VariationalSystem<R>& v) {
    using C = std::complex<R>;
    const GradeBlock<R>& blk = s.grade(v.gamma);
    const ExpoSum<R>* comp[4] = {&blk.f, &blk.g, &blk.h, &blk.k};
    R scale = 0;
    for (int i = 0; i < 4; ++i)
        scale = std::max({scale, comp[i]->max_abs(), v.F[i].max_abs()});
    if (scale == 0) return 0;
    R worst = 0;
    for (int i = 0; i < 4; ++i) {
        ExpoSum<R> e = comp[i]->derivative(s.mu1, s.mu2);
        for (int j = 0; j < 4; ++j) e.axpy(v.A(i, j), *comp[j]);
        e.axpy(C(-1), v.F[i]);
        worst = std::max(worst, e.max_abs());
    }
    return worst / scale;
}

/// Independent reconstruction of one grade from its forcing alone, through
/// the diagonalized integral representation
///
///   f_g(z) = P * integral_(-inf)^z exp(D_g (x - z)) P^-1 F_g(x) dx,
///
/// evaluated in closed form term by term: an amplitude c with exponent mu
/// against a diagonal entry d contributes c/(mu + d) e^(mu z).  Requires
/// gamma/n > 6 so every diagonal entry has positive real part.
template <class R>
GradeBlock<R> solve_by_integral(const ResummedSeries<R>& s,
                                const VariationalSystem<R>& v) {
    using C = std::complex<R>;
    if (v.gamma <= 6 * s.n)
        throw invalid_input(
            "solve_by_integral requires gamma/n > 6 (positive spectrum)");
    std::array<ExpoSum<R>, 4> w;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) w[i].axpy(v.Pinv(i, j), v.F[j]);
    std::array<ExpoSum<R>, 4> y;
    for (int i = 0; i < 4; ++i)
        for (const auto& t : w[i].terms()) {
            const C den = s.mu_value(t.i1, t.i2) + v.D(i);
            if (!(std::real(den) > 0))
                throw error(
                    "divergent integral: exponent plus eigenvalue has "
                    "nonpositive real part");
            y[i].add(t.i1, t.i2, t.c / den);
        }
    GradeBlock<R> out;
    ExpoSum<R>* rows[4] = {&out.f, &out.g, &out.h, &out.k};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rows[i]->axpy(v.P(i, j), y[j]);
    return out;
}

/// Largest amplitude difference between two grade blocks, relative to the
/// largest amplitude present (1 if both are empty).
template <class R>
R block_rel_diff(const GradeBlock<R>& a, const GradeBlock<R>& b) {
    const ExpoSum<R>* pa[4] = {&a.f, &a.g, &a.h, &a.k};
    const ExpoSum<R>* pb[4] = {&b.f, &b.g, &b.h, &b.k};
    R scale = 0, worst = 0;
    for (int i = 0; i < 4; ++i) {
        scale = std::max({scale, pa[i]->max_abs(), pb[i]->max_abs()});
        worst = std::max(worst, max_abs_diff(*pa[i], *pb[i]));
    }
    return scale > 0 ? worst / scale : 0;
}

} // namespace hhpsi

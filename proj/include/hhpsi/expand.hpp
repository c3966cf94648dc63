#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <complex>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "hhpsi/model.hpp"
#include "hhpsi/quadratic.hpp"
#include "hhpsi/regime.hpp"
#include "hhpsi/table.hpp"

namespace hhpsi {

/// Free constants and tolerances of a series expansion.  Defaults follow
/// the CLI contract: resonance amplitudes 0.1, higher free constants 0.
template <class R>
struct ExpandOptions {
    std::complex<R> a010{R(0.1L), 0}; // resonance r (case i) / rbar (case ii)
    std::complex<R> a001{R(0.1L), 0}; // resonance rbar (case i)
    std::complex<R> a600{0, 0};       // case i grade-6 free constant
    std::complex<R> a000{1, 0};       // case ii leading x amplitude
    std::complex<R> b600{0, 0};       // case ii grade-6 free constant
    int sign = +1;                    // case i leading branch
    double tol = 1e-10;               // relative compatibility tolerance
    unsigned threads = 1;
};

/// One resonant index the recursion could not invert: either a documented
/// insertion of a free constant or a structurally forced zero.  `residual`
/// is the relative compatibility defect that was checked against tol.
struct Insertion {
    int k, l, m;
    std::string kind;
    double residual;
};

template <class R>
struct Expansion {
    RegimeReport regime;
    ExpandOptions<R> options;
    CoefficientTable<R> table;
    std::vector<Insertion> insertions;
};

namespace detail {

template <class R>
struct SlotRhs {
    std::complex<R> ra{}, rb{};
    R scale_a{}, scale_b{}; // sums of term magnitudes, for relative checks
};

// Strict-box right-hand side shared by both leading balances:
//   ra = -A a_{k-2,l,m} - 2 lam * sum'' a b
//   rb = -B b_{k-2,l,m} - lam * QA + sum'' b b
// where QA is the strict a*a box in case i, and the *full* a*a box at
// (k,l,m-2) in case ii (the x^2 term sits two m-steps below its target).
template <class R>
SlotRhs<R> assemble_rhs(const CoefficientTable<R>& t, int k, int l, int m,
                        R A, R B, R lam, bool full_xx_shifted) {
    using C = std::complex<R>;
    SlotRhs<R> out;
    C conv_ab{}, conv_aa{}, conv_bb{};
    R s_ab = 0, s_aa = 0, s_bb = 0;
    for (int p = 0; p <= k; ++p)
        for (int q = 0; q <= l; ++q)
            for (int s = 0; s <= m; ++s) {
                if ((p == 0 && q == 0 && s == 0) || (p == k && q == l && s == m))
                    continue;
                const C a1 = t.a(p, q, s), b1 = t.b(p, q, s);
                const C a2 = t.a(k - p, l - q, m - s), b2 = t.b(k - p, l - q, m - s);
                conv_ab += a1 * b2;
                conv_bb += b1 * b2;
                s_ab += std::abs(a1 * b2);
                s_bb += std::abs(b1 * b2);
                if (!full_xx_shifted) {
                    conv_aa += a1 * a2;
                    s_aa += std::abs(a1 * a2);
                }
            }
    if (full_xx_shifted && m >= 2) {
        for (int p = 0; p <= k; ++p)
            for (int q = 0; q <= l; ++q)
                for (int s = 0; s <= m - 2; ++s) {
                    const C prod = t.a(p, q, s) * t.a(k - p, l - q, m - 2 - s);
                    conv_aa += prod;
                    s_aa += std::abs(prod);
                }
    }
    const C a_down = t.a(k - 2, l, m), b_down = t.b(k - 2, l, m);
    out.ra = -A * a_down - R(2) * lam * conv_ab;
    out.rb = -B * b_down - lam * conv_aa + conv_bb;
    out.scale_a = std::abs(A * a_down) + R(2) * std::abs(lam) * s_ab;
    out.scale_b = std::abs(B * b_down) + std::abs(lam) * s_aa + s_bb;
    return out;
}

inline bool compat_ok(double residual, double scale, double tol) {
    return residual <= tol * std::max(scale, 1e-30);
}

[[noreturn]] inline void compat_fail(int k, int l, int m, double rel, double tol) {
    throw verification_failure(
        "resonance compatibility failed at (" + std::to_string(k) + "," +
        std::to_string(l) + "," + std::to_string(m) + "): relative residual " +
        fmt_real(rel) + " exceeds tolerance " + fmt_real(tol));
}

// Minimal-norm solution of a singular 2x2 system with compatibility check.
// Returns the relative residual that was accepted.
template <class R>
double solve_singular(const Eigen::Matrix<std::complex<R>, 2, 2>& M,
                      const Eigen::Matrix<std::complex<R>, 2, 1>& rhs,
                      R scale, double tol, int k, int l, int m,
                      Eigen::Matrix<std::complex<R>, 2, 1>& out) {
    Eigen::JacobiSVD<Eigen::Matrix<std::complex<R>, 2, 2>> svd(
        M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // Treat the structurally-zero singular value as exactly zero.
    const R cutoff = svd.singularValues()[0] *
                     R(std::numeric_limits<R>::epsilon()) * R(64);
    Eigen::Matrix<std::complex<R>, 2, 1> x = Eigen::Matrix<std::complex<R>, 2, 1>::Zero();
    for (int i = 0; i < 2; ++i) {
        if (svd.singularValues()[i] <= cutoff) continue;
        x += svd.matrixV().col(i) *
             (svd.matrixU().col(i).adjoint() * rhs)(0) / svd.singularValues()[i];
    }
    const double resid = static_cast<double>((M * x - rhs).template lpNorm<Eigen::Infinity>());
    const double s = static_cast<double>(scale);
    if (!compat_ok(resid, s, tol)) compat_fail(k, l, m, resid / std::max(s, 1e-30), tol);
    out = x;
    return resid / std::max(s, 1e-30);
}

template <class R>
Expansion<R> expand_case_i(const RegimeReport& regime, int order,
                           const ExpandOptions<R>& opt) {
    using C = std::complex<R>;
    const R lam = to_real<R>(regime.lambda);
    const R A = to_real<R>(regime.A);
    const R B = to_real<R>(regime.B);
    const R radicand = 2 + 1 / lam;
    if (radicand <= 0)
        throw out_of_scope("leading amplitude is not real: 2 + 1/lambda <= 0");
    const C a000 = C(R(opt.sign) * (R(3) / lam) * std::sqrt(radicand));
    const C b000 = C(R(-3) / lam);
    const C coupling = R(2) * lam * a000; // off-diagonal matrix entry

    Expansion<R> out{regime, opt, CoefficientTable<R>(order)};
    CoefficientTable<R>& t = out.table;
    t.set(0, 0, 0, a000, b000);
    std::vector<Insertion> inserts;

    const QuadExt& r = regime.r;
    const QuadExt& rbar = regime.rbar;
    const C rv = r.value<R>();

    for (int g = 1; g <= order; ++g) {
        // Slots of one grade only read strictly lower grades: safe to solve
        // concurrently, deterministic regardless of thread count.
        std::vector<std::array<int, 3>> slots;
        for (int k = g; k >= 0; --k)
            for (int l = g - k; l >= 0; --l) slots.push_back({k, l, g - k - l});
        std::vector<Insertion> slot_ins(slots.size(), Insertion{-1, 0, 0, "", 0.0});
        std::vector<std::exception_ptr> errs(slots.size());

        parallel_for(slots.size(), opt.threads, [&](std::size_t si) {
            try {
                const int k = slots[si][0], l = slots[si][1], m = slots[si][2];
                const QuadExt K = QuadExt::from_rational(k) + r * Rational(l) +
                                  rbar * Rational(m);
                const bool singular = (K + Rational(1)).is_zero() ||
                                      (K - Rational(6)).is_zero() ||
                                      (K - r).is_zero() || (K - rbar).is_zero();
                const auto rhs = assemble_rhs(t, k, l, m, A, B, lam, false);

                if (!singular) {
                    const C Kv = K.value<R>();
                    const C m00 = Kv * (Kv - R(5));
                    const C m11 = (Kv - R(2)) * (Kv - R(3)) + R(6) / lam;
                    // Determinant through its exact factorization
                    // (K+1)(K-6)(K-r)(K-rbar): immune to the cancellation
                    // the textbook 2x2 formula suffers near resonances.
                    const C det = (K + Rational(1)).value<R>() *
                                  (K - Rational(6)).value<R>() *
                                  (K - r).value<R>() * (K - rbar).value<R>();
                    t.set(k, l, m, (m11 * rhs.ra - coupling * rhs.rb) / det,
                          (m00 * rhs.rb - coupling * rhs.ra) / det);
                    return;
                }

                if (k == 0 && l == 1 && m == 0) {
                    const C a = opt.a010;
                    t.set(k, l, m, a, -(rv * (rv - R(5))) / coupling * a);
                    slot_ins[si] = {k, l, m, "free a010", 0.0};
                    return;
                }
                if (k == 0 && l == 0 && m == 1) {
                    const C rbv = rbar.value<R>();
                    const C a = opt.a001;
                    t.set(k, l, m, a, -(rbv * (rbv - R(5))) / coupling * a);
                    slot_ins[si] = {k, l, m, "free a001", 0.0};
                    return;
                }
                if (k == 6 && l == 0 && m == 0) {
                    // Left null vector (2 lam a000, -6); its pairing with the
                    // right-hand side is the classical order-6 compatibility
                    // condition on A, B, lam.
                    const C res = coupling * rhs.ra - R(6) * rhs.rb;
                    const R scale = std::abs(coupling) * rhs.scale_a + R(6) * rhs.scale_b;
                    if (!compat_ok(static_cast<double>(std::abs(res)),
                                   static_cast<double>(scale), opt.tol))
                        compat_fail(k, l, m,
                                    static_cast<double>(std::abs(res) /
                                                        std::max(scale, R(1e-30))),
                                    opt.tol);
                    const C a = opt.a600;
                    t.set(k, l, m, a, (rhs.ra - R(6) * a) / coupling);
                    slot_ins[si] = {k, l, m, "free a600",
                                    static_cast<double>(std::abs(res) /
                                                        std::max(scale, R(1e-30)))};
                    return;
                }

                // Aliased resonance: an index whose exponent collides with a
                // resonance value without being one of the three documented
                // slots.  (1,1,1) always lands here since 1 + r + rbar = 6;
                // rational-resonance regimes contribute more.  Insert the
                // minimal-norm solution after checking compatibility.
                const C Kv = K.value<R>();
                Eigen::Matrix<C, 2, 2> M;
                M << Kv * (Kv - R(5)), coupling, coupling,
                     (Kv - R(2)) * (Kv - R(3)) + R(6) / lam;
                Eigen::Matrix<C, 2, 1> rv2, x;
                rv2 << rhs.ra, rhs.rb;
                const double rel = solve_singular(M, rv2,
                                                  std::max(rhs.scale_a, rhs.scale_b),
                                                  opt.tol, k, l, m, x);
                t.set(k, l, m, x[0], x[1]);
                slot_ins[si] = {k, l, m, "aliased resonance", rel};
            } catch (...) {
                errs[si] = std::current_exception();
            }
        });

        for (std::size_t si = 0; si < slots.size(); ++si)
            if (errs[si]) std::rethrow_exception(errs[si]);
        for (auto& ins : slot_ins)
            if (ins.k >= 0) inserts.push_back(ins);
    }
    out.insertions = std::move(inserts);
    return out;
}

template <class R>
Expansion<R> expand_case_ii(const RegimeReport& regime, int order,
                            const ExpandOptions<R>& opt) {
    using C = std::complex<R>;
    const R lam = to_real<R>(regime.lambda);
    const R A = to_real<R>(regime.A);
    const R B = to_real<R>(regime.B);
    const C a000 = opt.a000;
    const C b000 = C(6);
    const C coupling = R(2) * lam * a000;

    Expansion<R> out{regime, opt, CoefficientTable<R>(order)};
    CoefficientTable<R>& t = out.table;
    t.set(0, 0, 0, a000, b000);
    std::vector<Insertion> inserts;

    const QuadExt& rbar = regime.rbar;           // = s
    const QuadExt step_m = regime.alpha_bar + Rational(2); // 2 + alphabar

    for (int g = 1; g <= order; ++g) {
        std::vector<std::array<int, 3>> slots;
        for (int k = g; k >= 0; --k)
            for (int l = g - k; l >= 0; --l) slots.push_back({k, l, g - k - l});
        std::vector<Insertion> slot_ins(slots.size(), Insertion{-1, 0, 0, "", 0.0});
        std::vector<std::exception_ptr> errs(slots.size());

        parallel_for(slots.size(), opt.threads, [&](std::size_t si) {
            try {
                const int k = slots[si][0], l = slots[si][1], m = slots[si][2];
                const QuadExt E = QuadExt::from_rational(k) + rbar * Rational(l) +
                                  step_m * Rational(m);
                const auto rhs = assemble_rhs(t, k, l, m, A, B, lam, true);

                // The system is triangular: solve the y-row first.
                const QuadExt fb1 = E + Rational(1), fb2 = E - Rational(6);
                C b;
                if (!fb1.is_zero() && !fb2.is_zero()) {
                    b = rhs.rb / (fb1.value<R>() * fb2.value<R>());
                } else {
                    const double ab = static_cast<double>(std::abs(rhs.rb));
                    const double sc = static_cast<double>(rhs.scale_b);
                    if (!compat_ok(ab, sc, opt.tol))
                        compat_fail(k, l, m, ab / std::max(sc, 1e-30), opt.tol);
                    const bool primary = (k == 6 && l == 0 && m == 0);
                    b = primary ? opt.b600 : C(0);
                    slot_ins[si] = {k, l, m,
                                    primary ? "free b600" : "aliased resonance (y)",
                                    ab / std::max(sc, 1e-30)};
                }

                const C rhs_a = rhs.ra - coupling * b;
                const QuadExt fa2 = E - rbar;
                C a;
                if (!E.is_zero() && !fa2.is_zero()) {
                    a = rhs_a / (E.value<R>() * fa2.value<R>());
                } else {
                    const double aa = static_cast<double>(std::abs(rhs_a));
                    const double sc = static_cast<double>(
                        rhs.scale_a + std::abs(coupling * b));
                    if (!compat_ok(aa, sc, opt.tol))
                        compat_fail(k, l, m, aa / std::max(sc, 1e-30), opt.tol);
                    const bool primary = (k == 0 && l == 1 && m == 0);
                    a = primary ? opt.a010 : C(0);
                    if (slot_ins[si].k < 0)
                        slot_ins[si] = {k, l, m,
                                        primary ? "free a010" : "aliased resonance (x)",
                                        aa / std::max(sc, 1e-30)};
                }
                t.set(k, l, m, a, b);
            } catch (...) {
                errs[si] = std::current_exception();
            }
        });

        for (std::size_t si = 0; si < slots.size(); ++si)
            if (errs[si]) std::rethrow_exception(errs[si]);
        for (auto& ins : slot_ins)
            if (ins.k >= 0) inserts.push_back(ins);
    }
    out.insertions = std::move(inserts);
    return out;
}

} // namespace detail

/// Expand the pole-type series of the regime to the given total grade.
/// Requires a viable regime; throws out_of_scope otherwise.
template <class R>
Expansion<R> expand(const RegimeReport& regime, int order,
                    const ExpandOptions<R>& opt = {}) {
    if (!regime.viable)
        throw out_of_scope("regime '" + regime.label +
                           "' has no two-parameter pole-type series" +
                           (regime.status.empty() ? "" : ": " + regime.status));
    switch (regime.regime) {
        case RegimeCase::case_ii_positive:
            return detail::expand_case_ii(regime, order, opt);
        default:
            return detail::expand_case_i(regime, order, opt);
    }
}

/// Independent residual verification: substitutes the truncated series into
/// the equations of motion using only full-box convolutions and the
/// second-derivative factors, sharing no code with the recursion solver.
/// Returns the largest relative residual over all lattice slots of total
/// grade <= grade_max (which must be <= table order).
template <class R>
struct ResidualReport {
    double max_rel = 0;
    int k = 0, l = 0, m = 0; // worst slot
};

template <class R>
ResidualReport<R> ode_residual(const Expansion<R>& e, int grade_max) {
    using C = std::complex<R>;
    const CoefficientTable<R>& t = e.table;
    if (grade_max > t.order())
        throw invalid_input("ode_residual: grade_max exceeds table order");
    const R lam = to_real<R>(e.regime.lambda);
    const R A = to_real<R>(e.regime.A);
    const R B = to_real<R>(e.regime.B);
    const bool case_ii = e.regime.regime == RegimeCase::case_ii_positive;
    const QuadExt xshift = case_ii ? e.regime.alpha_bar
                                   : QuadExt::from_rational(-2);
    const QuadExt step_m = case_ii ? e.regime.alpha_bar + Rational(2)
                                   : e.regime.rbar;
    const QuadExt step_l = case_ii ? e.regime.rbar : e.regime.r;

    ResidualReport<R> rep;
    for (int g = 0; g <= grade_max; ++g)
        for (int k = g; k >= 0; --k)
            for (int l = g - k; l >= 0; --l) {
                const int m = g - k - l;
                const QuadExt E = QuadExt::from_rational(k) +
                                  step_l * Rational(l) + step_m * Rational(m);
                const C ex = (E + xshift).value<R>();
                const C ey = (E - Rational(2)).value<R>();

                C conv_ab{}, conv_bb{};
                R s_ab = 0, s_bb = 0;
                for (int p = 0; p <= k; ++p)
                    for (int q = 0; q <= l; ++q)
                        for (int s = 0; s <= m; ++s) {
                            const C v1 = t.a(p, q, s) * t.b(k - p, l - q, m - s);
                            const C v2 = t.b(p, q, s) * t.b(k - p, l - q, m - s);
                            conv_ab += v1;
                            conv_bb += v2;
                            s_ab += std::abs(v1);
                            s_bb += std::abs(v2);
                        }
                C conv_aa{};
                R s_aa = 0;
                const int mm = case_ii ? m - 2 : m;
                if (mm >= 0)
                    for (int p = 0; p <= k; ++p)
                        for (int q = 0; q <= l; ++q)
                            for (int s = 0; s <= mm; ++s) {
                                const C v = t.a(p, q, s) * t.a(k - p, l - q, mm - s);
                                conv_aa += v;
                                s_aa += std::abs(v);
                            }

                const C r1 = ex * (ex - R(1)) * t.a(k, l, m) + A * t.a(k - 2, l, m) +
                             R(2) * lam * conv_ab;
                const C r2 = ey * (ey - R(1)) * t.b(k, l, m) + B * t.b(k - 2, l, m) +
                             lam * conv_aa - conv_bb;
                const R s1 = std::abs(ex * (ex - R(1)) * t.a(k, l, m)) +
                             std::abs(A * t.a(k - 2, l, m)) + 2 * std::abs(lam) * s_ab;
                const R s2 = std::abs(ey * (ey - R(1)) * t.b(k, l, m)) +
                             std::abs(B * t.b(k - 2, l, m)) + std::abs(lam) * s_aa + s_bb;

                const double rel1 = static_cast<double>(std::abs(r1)) /
                                    std::max(static_cast<double>(s1), 1e-30);
                const double rel2 = static_cast<double>(std::abs(r2)) /
                                    std::max(static_cast<double>(s2), 1e-30);
                const double worst = std::max(rel1, rel2);
                if (worst > rep.max_rel && (s1 > 0 || s2 > 0)) {
                    rep.max_rel = worst;
                    rep.k = k;
                    rep.l = l;
                    rep.m = m;
                }
            }
    return rep;
}

/// Literal order-6 compatibility combination of the first balance, written
/// exactly as the closed-form condition on the axis coefficients; returns
/// the relative defect.  The table needs order >= 4.
template <class R>
double case_i_resonance_residual(const CoefficientTable<R>& t, R A, R B, R lam) {
    using C = std::complex<R>;
    const C a000 = t.a(0, 0, 0), a200 = t.a(2, 0, 0), a400 = t.a(4, 0, 0);
    const C b200 = t.b(2, 0, 0), b400 = t.b(4, 0, 0);
    const C terms[6] = {lam * a000 * a400 * A,
                        R(2) * lam * lam * a000 * a200 * b400,
                        R(2) * lam * lam * a000 * a400 * b200,
                        -R(3) * b400 * B,
                        -R(6) * lam * a200 * a400,
                        R(6) * b200 * b400};
    C sum{};
    R scale = 0;
    for (const C& v : terms) {
        sum += v;
        scale = std::max(scale, std::abs(v));
    }
    return static_cast<double>(std::abs(sum)) /
           std::max(static_cast<double>(scale), 1e-30);
}

/// Literal order-6 compatibility combination of the second balance:
/// -B b400 + sum_{p=1..5} b_{6-p,0,0} b_{p,0,0}.  Table order >= 5.
template <class R>
double case_ii_resonance_residual(const CoefficientTable<R>& t, R B) {
    using C = std::complex<R>;
    C sum = -B * t.b(4, 0, 0);
    R scale = std::abs(sum);
    for (int p = 1; p <= 5; ++p) {
        const C v = t.b(6 - p, 0, 0) * t.b(p, 0, 0);
        sum += v;
        scale = std::max(scale, std::abs(v));
    }
    return static_cast<double>(std::abs(sum)) /
           std::max(static_cast<double>(scale), 1e-30);
}

} // namespace hhpsi

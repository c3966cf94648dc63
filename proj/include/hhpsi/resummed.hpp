#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "hhpsi/expand.hpp"
#include "hhpsi/expo_sum.hpp"
#include "hhpsi/model.hpp"
#include "hhpsi/support.hpp"

namespace hhpsi {

/// One grade of the regrouped single series: the four exponential
/// polynomials multiplying w^(gamma + n*e) in x, u, y, v respectively.
template <class R>
struct GradeBlock {
    ExpoSum<R> f, g, h, k;
};

/// Regrouped form of a coefficient table.  With w = tau^(1/n), z = ln tau,
/// the four phase components become single series over an integer grade:
///
///   x = sum_g w^(g + n*ex)   f_g(z),   u = sum_g w^(g + n*ex - n) g_g(z),
///   y = sum_g w^(g - 2n)     h_g(z),   v = sum_g w^(g - 3n)       k_g(z),
///
/// where ex = -2 for the first leading balance and alphabar for the second,
/// and every f_g, g_g, h_g, k_g is a finite exponential polynomial whose
/// exponents i1*mu1 + i2*mu2 all have nonnegative real part.  Grade and key
/// of a table slot (k, l, m):
///
///   first balance    l >= m:  g = n(k + 5m) + (l - m),  key (l - m, 0)
///                    l <  m:  g = n(k + 5l) + (m - l),  key (0, m - l)
///                    with mu1 = r - 1/n, mu2 = rbar - 1/n;
///   second balance:           g = n(k + 2m) + l,        key (m, l)
///                    with mu1 = alphabar, mu2 = rbar - 1/n.
///
/// The u, v blocks are the exact term-wise identities
///   g_g = (g/n + ex) f_g + f_g',   k_g = (g/n - 2) h_g + h_g'.
template <class R>
class ResummedSeries {
public:
    using C = std::complex<R>;

    RegimeReport regime;
    int n = 1;
    int gamma_max = 0;
    bool second_balance = false;
    C mu1{}, mu2{}; // exponent generators per unit key
    R e_x = -2;     // leading tau-exponent offset of the x block
    std::vector<GradeBlock<R>> grades;

    const GradeBlock<R>& grade(int g) const {
        if (g < 0 || g > gamma_max)
            throw invalid_input("ResummedSeries: grade out of range");
        return grades[static_cast<std::size_t>(g)];
    }

    C mu_value(int i1, int i2) const { return R(i1) * mu1 + R(i2) * mu2; }

    /// Evaluate the four components at tau > 0 (z = ln tau may have either
    /// sign; the series is the regrouped truncation, not an approximation
    /// beyond it).
    CState<R> evaluate(R tau) const {
        if (!(tau > 0))
            throw invalid_input("ResummedSeries::evaluate requires tau > 0");
        const R z = std::log(tau);
        CState<R> st = CState<R>::Zero();
        for (int g = 0; g <= gamma_max; ++g) {
            const R gn = R(g) / R(n);
            const GradeBlock<R>& blk = grades[static_cast<std::size_t>(g)];
            const R px = std::pow(tau, gn + e_x);
            const R py = std::pow(tau, gn - 2);
            st[0] += px * blk.f.eval(mu1, mu2, z);
            st[1] += px / tau * blk.g.eval(mu1, mu2, z);
            st[2] += py * blk.h.eval(mu1, mu2, z);
            st[3] += py / tau * blk.k.eval(mu1, mu2, z);
        }
        return st;
    }

    ResummedSeries truncated(int new_gamma_max) const {
        if (new_gamma_max < 0 || new_gamma_max > gamma_max)
            throw invalid_input("ResummedSeries::truncated: bad grade limit");
        ResummedSeries out = *this;
        out.gamma_max = new_gamma_max;
        out.grades.resize(static_cast<std::size_t>(new_gamma_max) + 1);
        return out;
    }

    /// Deterministic JSON dump: grade array with (re_c, im_c, re_mu, im_mu)
    /// quadruples per component.
    std::string dump_json() const {
        std::ostringstream os;
        os << "{\n  \"case\": \"" << regime.label << "\",\n";
        os << "  \"n\": " << n << ",\n";
        os << "  \"gammaMax\": " << gamma_max << ",\n";
        os << "  \"xExponentOffset\": " << fmt_real(static_cast<double>(e_x))
           << ",\n";
        os << "  \"grades\": [";
        for (int g = 0; g <= gamma_max; ++g) {
            os << (g ? ",\n    {" : "\n    {") << "\"gamma\": " << g;
            const GradeBlock<R>& blk = grades[static_cast<std::size_t>(g)];
            const ExpoSum<R>* comp[4] = {&blk.f, &blk.g, &blk.h, &blk.k};
            const char* name[4] = {"f", "g", "h", "k"};
            for (int i = 0; i < 4; ++i) {
                os << ", \"" << name[i] << "\": [";
                bool first = true;
                for (const auto& t : comp[i]->terms()) {
                    const C mu = mu_value(t.i1, t.i2);
                    os << (first ? "[" : ", [")
                       << fmt_real(static_cast<double>(std::real(t.c))) << ", "
                       << fmt_real(static_cast<double>(std::imag(t.c))) << ", "
                       << fmt_real(static_cast<double>(std::real(mu))) << ", "
                       << fmt_real(static_cast<double>(std::imag(mu))) << "]";
                    first = false;
                }
                os << "]";
            }
            os << "}";
        }
        os << "\n  ]\n}\n";
        return os.str();
    }
};

/// Regroup a computed expansion into the single-series form, keeping grades
/// 0..gamma_max.  Grades up to the expansion order are complete (every table
/// slot of grade g has k+l+m <= g), so gamma_max may not exceed the order.
///
/// Throws out_of_scope when the regrouping cannot produce bounded
/// coefficient functions: non-viable regimes, regimes with no usable
/// substitution index, and second-balance parameters with alphabar < 0,
/// where convergence is not established.
template <class R>
ResummedSeries<R> resum(const Expansion<R>& e, int gamma_max) {
    using C = std::complex<R>;
    const RegimeReport& reg = e.regime;
    if (!reg.viable)
        throw out_of_scope("convergence not established for " + reg.label +
                           (reg.status.empty() ? "" : ": " + reg.status));
    if (reg.n < 1)
        throw out_of_scope(
            "convergence not established for " + reg.label +
            ": no usable substitution index (smallest positive resonance "
            "too close to zero)");
    if (gamma_max < 0)
        throw invalid_input("resum: gamma_max must be nonnegative");
    if (gamma_max > e.table.order())
        throw invalid_input(
            "resum: gamma_max exceeds the expansion order; higher grades "
            "would be incomplete");

    ResummedSeries<R> s;
    s.regime = reg;
    s.n = reg.n;
    s.gamma_max = gamma_max;
    s.second_balance = reg.regime == RegimeCase::case_ii_positive ||
                       reg.regime == RegimeCase::case_ii_negative ||
                       reg.regime == RegimeCase::case_ii_repeated_zero ||
                       reg.regime == RegimeCase::case_ii_imaginary;
    const R inv_n = R(1) / R(s.n);
    if (s.second_balance) {
        s.mu1 = reg.alpha_bar.value<R>();
        s.mu2 = reg.rbar.value<R>() - inv_n;
        s.e_x = std::real(s.mu1);
    } else {
        s.mu1 = reg.r.value<R>() - inv_n;
        s.mu2 = reg.rbar.value<R>() - inv_n;
        s.e_x = -2;
    }
    if (std::real(s.mu1) < 0 || std::real(s.mu2) < 0)
        throw out_of_scope(
            "convergence not established for " + reg.label +
            ": regrouping produces an exponent with negative real part");

    s.grades.assign(static_cast<std::size_t>(gamma_max) + 1, GradeBlock<R>{});
    e.table.for_each([&](int k, int l, int m, C a, C b) {
        int g, i1, i2;
        if (s.second_balance) {
            g = s.n * (k + 2 * m) + l;
            i1 = m;
            i2 = l;
        } else if (l >= m) {
            g = s.n * (k + 5 * m) + (l - m);
            i1 = l - m;
            i2 = 0;
        } else {
            g = s.n * (k + 5 * l) + (m - l);
            i1 = 0;
            i2 = m - l;
        }
        if (g > gamma_max) return;
        auto& blk = s.grades[static_cast<std::size_t>(g)];
        if (a != C{}) blk.f.add(i1, i2, a);
        if (b != C{}) blk.h.add(i1, i2, b);
    });

    for (int g = 0; g <= gamma_max; ++g) {
        const R gn = R(g) / R(s.n);
        auto& blk = s.grades[static_cast<std::size_t>(g)];
        for (const auto& t : blk.f.terms())
            blk.g.add(t.i1, t.i2,
                      (C(gn + s.e_x) + s.mu_value(t.i1, t.i2)) * t.c);
        for (const auto& t : blk.h.terms())
            blk.k.add(t.i1, t.i2,
                      (C(gn - 2) + s.mu_value(t.i1, t.i2)) * t.c);
    }
    return s;
}

} // namespace hhpsi

#pragma once

#include <map>
#include <utility>

#include "hhpsi/expand.hpp"

namespace hhpsi {

/// Double-indexed form of the first-balance series: terms tau^(i-2+j*r) on
/// the principal branch and tau^(i-2+j*rbar) (j >= 1) on the conjugate
/// branch.  Obtained from the triple form by the exact regrouping
///   l == m  ->  (i, 0)      with i = k + 5l
///   l >  m  ->  (i, l - m)  with i = k + 5m      (principal)
///   l <  m  ->  (i, m - l)  with i = k + 5l      (conjugate),
/// which uses r + rbar = 5 and is a bijection on terms, so truncated
/// evaluations agree with the triple form to rounding.
template <class R>
struct DoubleForm {
    using C = std::complex<R>;
    using Key = std::pair<int, int>; // (i, j)
    std::map<Key, C> xa, xabar, yb, ybbar;
    QuadExt r, rbar;
};

/// Re-expansion in powers of tau^(r-2), tau^(rbar-2): term (j, i) carries
/// tau^(i-2+j(r-2)) with A_{ji} = a_{i-2j, j} when i >= 2j, else zero.
template <class R>
struct CgtwForm {
    using C = std::complex<R>;
    using Key = std::pair<int, int>; // (j, i)
    std::map<Key, C> xa, xabar, yb, ybbar;
    QuadExt r, rbar;
};

template <class R>
DoubleForm<R> reindex_double(const Expansion<R>& e) {
    if (e.regime.regime == RegimeCase::case_ii_positive)
        throw invalid_input("double/CGTW regrouping applies to the first balance only");
    DoubleForm<R> f;
    f.r = e.regime.r;
    f.rbar = e.regime.rbar;
    e.table.for_each([&](int k, int l, int m, std::complex<R> a, std::complex<R> b) {
        if (l >= m) {
            typename DoubleForm<R>::Key key{k + 5 * m, l - m};
            f.xa[key] += a;
            f.yb[key] += b;
        } else {
            typename DoubleForm<R>::Key key{k + 5 * l, m - l};
            f.xabar[key] += a;
            f.ybbar[key] += b;
        }
    });
    return f;
}

template <class R>
CgtwForm<R> reindex_cgtw(const DoubleForm<R>& d) {
    CgtwForm<R> g;
    g.r = d.r;
    g.rbar = d.rbar;
    auto move_branch = [](const std::map<std::pair<int, int>, std::complex<R>>& src,
                          std::map<std::pair<int, int>, std::complex<R>>& dst) {
        for (const auto& [key, c] : src) {
            const auto [i, j] = key;
            dst[{j, i + 2 * j}] += c;
        }
    };
    move_branch(d.xa, g.xa);
    move_branch(d.xabar, g.xabar);
    move_branch(d.yb, g.yb);
    move_branch(d.ybbar, g.ybbar);
    return g;
}

/// Evaluate the triple-index series at real tau > 0.  Returns the complex
/// phase state (x, x', y, y'); for conjugate-symmetric data the imaginary
/// parts are rounding noise.
template <class R>
CState<R> evaluate_triple(const Expansion<R>& e, R tau) {
    using C = std::complex<R>;
    if (!(tau > 0)) throw invalid_input("series evaluation requires tau > 0");
    const RegimeReport& reg = e.regime;
    const bool case_ii = reg.regime == RegimeCase::case_ii_positive;
    const C rv = case_ii ? C{} : reg.r.value<R>();
    const C rbv = reg.rbar.value<R>();
    const C abv = case_ii ? reg.alpha_bar.value<R>() : C{};
    const R lt = std::log(tau);
    CState<R> out = CState<R>::Zero();
    e.table.for_each([&](int k, int l, int m, C a, C b) {
        C ex, ey; // x and y exponents of this slot
        if (case_ii) {
            const C E = C(R(k)) + rbv * R(l) + (R(2) + abv) * R(m);
            ex = E + abv;
            ey = E - R(2);
        } else {
            const C K = C(R(k)) + rv * R(l) + rbv * R(m);
            ex = K - R(2);
            ey = ex;
        }
        const C px = std::exp(ex * lt), py = std::exp(ey * lt);
        out[0] += a * px;
        out[1] += a * ex * px / tau;
        out[2] += b * py;
        out[3] += b * ey * py / tau;
    });
    return out;
}

/// Evaluate the double form (x, y only; the regrouping acts per exponent).
template <class R>
std::pair<std::complex<R>, std::complex<R>> evaluate_double(const DoubleForm<R>& f,
                                                            R tau) {
    using C = std::complex<R>;
    const QuadExt& qr = f.r;
    const QuadExt& qrb = f.rbar;
    const C rv = qr.value<R>();
    const C rbv = qrb.value<R>();
    const R lt = std::log(tau);
    C x{}, y{};
    auto run = [&](const std::map<std::pair<int, int>, C>& terms, const C& rr, C& acc) {
        for (const auto& [key, c] : terms)
            acc += c * std::exp((C(R(key.first)) - R(2) + rr * R(key.second)) * lt);
    };
    run(f.xa, rv, x);
    run(f.xabar, rbv, x);
    run(f.yb, rv, y);
    run(f.ybbar, rbv, y);
    return {x, y};
}

template <class R>
std::pair<std::complex<R>, std::complex<R>> evaluate_cgtw(const CgtwForm<R>& g,
                                                          R tau) {
    using C = std::complex<R>;
    const QuadExt& qr = g.r;
    const QuadExt& qrb = g.rbar;
    const C rv = qr.value<R>();
    const C rbv = qrb.value<R>();
    const R lt = std::log(tau);
    C x{}, y{};
    auto run = [&](const std::map<std::pair<int, int>, C>& terms, const C& rr, C& acc) {
        for (const auto& [key, c] : terms)
            acc += c * std::exp((C(R(key.second)) - R(2) + (rr - R(2)) * R(key.first)) * lt);
    };
    run(g.xa, rv, x);
    run(g.xabar, rbv, x);
    run(g.yb, rv, y);
    run(g.ybbar, rbv, y);
    return {x, y};
}

} // namespace hhpsi

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace hhpsi {

/// Finite sum of complex exponentials  z -> sum_t c_t * exp(mu_t * z)  whose
/// exponents live on an integer lattice mu = i1*mu1 + i2*mu2.  The two
/// generators (mu1, mu2) are fixed regime constants owned by the caller and
/// passed to the operations that need numeric exponents; terms store only
/// the lattice key (i1, i2).  Exponent equality is therefore structural and
/// never involves a floating-point tolerance, and differentiation and
/// antiderivatives are exact term-wise operations.
template <class R>
class ExpoSum {
public:
    using C = std::complex<R>;

    struct Term {
        int i1, i2;
        C c;
    };

    ExpoSum() = default;

    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }

    /// Accumulate c * exp((i1*mu1 + i2*mu2) z).  Terms with an equal key are
    /// merged; the term list stays sorted by key, so iteration order (and
    /// hence every downstream evaluation) is deterministic.
    void add(int i1, int i2, C c) {
        auto it = std::lower_bound(
            terms_.begin(), terms_.end(), std::make_pair(i1, i2),
            [](const Term& t, const std::pair<int, int>& key) {
                return std::make_pair(t.i1, t.i2) < key;
            });
        if (it != terms_.end() && it->i1 == i1 && it->i2 == i2)
            it->c += c;
        else
            terms_.insert(it, Term{i1, i2, c});
    }

    /// Amplitude at a key, zero when the key is absent.
    C coeff(int i1, int i2) const {
        auto it = std::lower_bound(
            terms_.begin(), terms_.end(), std::make_pair(i1, i2),
            [](const Term& t, const std::pair<int, int>& key) {
                return std::make_pair(t.i1, t.i2) < key;
            });
        if (it != terms_.end() && it->i1 == i1 && it->i2 == i2) return it->c;
        return C{};
    }

    /// *this += s * other, with every key of `other` shifted by (d1, d2).
    /// A zero scale is a structural no-op (no zero-amplitude keys appear).
    void axpy(C s, const ExpoSum& other, int d1 = 0, int d2 = 0) {
        if (s == C{}) return;
        for (const Term& t : other.terms_) add(t.i1 + d1, t.i2 + d2, s * t.c);
    }

    C eval(C mu1, C mu2, R z) const {
        C acc{};
        for (const Term& t : terms_)
            acc += t.c * std::exp((R(t.i1) * mu1 + R(t.i2) * mu2) * z);
        return acc;
    }

    /// Majorant sum_t |c_t| * exp(Re(mu_t) z).  For nonnegative exponent
    /// real parts this is nondecreasing in z, so its supremum over z < 0 is
    /// the plain amplitude sum (the z -> 0- limit).
    R abs_eval(C mu1, C mu2, R z) const {
        R acc = 0;
        for (const Term& t : terms_)
            acc += std::abs(t.c) *
                   std::exp(std::real(R(t.i1) * mu1 + R(t.i2) * mu2) * z);
        return acc;
    }

    /// Term-wise derivative d/dz: (key, c) -> (key, mu * c).  Exact.
    ExpoSum derivative(C mu1, C mu2) const {
        ExpoSum d;
        d.terms_.reserve(terms_.size());
        for (const Term& t : terms_)
            d.terms_.push_back(
                Term{t.i1, t.i2, (R(t.i1) * mu1 + R(t.i2) * mu2) * t.c});
        return d;
    }

    R abs_sum() const {
        R acc = 0;
        for (const Term& t : terms_) acc += std::abs(t.c);
        return acc;
    }

    R max_abs() const {
        R best = 0;
        for (const Term& t : terms_) best = std::max(best, std::abs(t.c));
        return best;
    }

private:
    std::vector<Term> terms_; // sorted by (i1, i2), keys unique
};

/// Largest amplitude of (a - b) over the union of their keys.
template <class R>
R max_abs_diff(const ExpoSum<R>& a, const ExpoSum<R>& b) {
    ExpoSum<R> d;
    d.axpy(std::complex<R>(1), a);
    d.axpy(std::complex<R>(-1), b);
    return d.max_abs();
}

} // namespace hhpsi

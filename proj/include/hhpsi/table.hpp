#pragma once

#include <complex>
#include <cstddef>
#include <ostream>
#include <vector>

#include "hhpsi/errors.hpp"
#include "hhpsi/support.hpp"

namespace hhpsi {

/// Triple-indexed coefficient pairs (a_klm, b_klm) for indices in the
/// simplex k + l + m <= order.  Reads outside the simplex return zero,
/// which lets convolution loops run over full boxes without bounds checks.
template <class R>
class CoefficientTable {
public:
    using C = std::complex<R>;

    explicit CoefficientTable(int order)
        : order_(order), np_(order + 1),
          a_(static_cast<std::size_t>(np_) * np_ * np_),
          b_(a_.size()) {
        if (order < 0 || order > 200)
            throw invalid_input("table order must be in [0, 200]");
    }

    int order() const { return order_; }

    C a(int k, int l, int m) const {
        return inside(k, l, m) ? a_[idx(k, l, m)] : C{};
    }
    C b(int k, int l, int m) const {
        return inside(k, l, m) ? b_[idx(k, l, m)] : C{};
    }

    void set(int k, int l, int m, C av, C bv) {
        if (!inside(k, l, m))
            throw error("CoefficientTable::set: index outside simplex");
        a_[idx(k, l, m)] = av;
        b_[idx(k, l, m)] = bv;
    }

    /// Visit the simplex in grade order (k+l+m ascending), lexicographic
    /// within a grade.  This is the canonical deterministic ordering used
    /// by the recursion and all serializers.
    template <class F>
    void for_each(F&& f) const {
        for (int g = 0; g <= order_; ++g)
            for (int k = g; k >= 0; --k)
                for (int l = g - k; l >= 0; --l) {
                    int m = g - k - l;
                    f(k, l, m, a_[idx(k, l, m)], b_[idx(k, l, m)]);
                }
    }

    /// max(|a|, |b|) over indices of total grade g.
    R max_abs_at_grade(int g) const {
        R best = 0;
        for (int k = g; k >= 0; --k)
            for (int l = g - k; l >= 0; --l) {
                int m = g - k - l;
                best = std::max({best, std::abs(a(k, l, m)), std::abs(b(k, l, m))});
            }
        return best;
    }

private:
    bool inside(int k, int l, int m) const {
        return k >= 0 && l >= 0 && m >= 0 && k + l + m <= order_;
    }
    std::size_t idx(int k, int l, int m) const {
        return (static_cast<std::size_t>(k) * np_ + l) * np_ + m;
    }

    int order_, np_;
    std::vector<C> a_, b_;
};

/// CSV dump, stable column set and row order: k,l,m,re_a,im_a,re_b,im_b.
template <class R>
void write_csv(std::ostream& os, const CoefficientTable<R>& t) {
    os << "k,l,m,re_a,im_a,re_b,im_b\n";
    t.for_each([&](int k, int l, int m, std::complex<R> a, std::complex<R> b) {
        os << k << ',' << l << ',' << m << ','
           << fmt_real(static_cast<double>(a.real())) << ','
           << fmt_real(static_cast<double>(a.imag())) << ','
           << fmt_real(static_cast<double>(b.real())) << ','
           << fmt_real(static_cast<double>(b.imag())) << '\n';
    });
}

} // namespace hhpsi

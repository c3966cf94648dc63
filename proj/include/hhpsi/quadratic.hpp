#pragma once

#include <complex>
#include <cstdlib>
#include <optional>
#include <string>

#include "hhpsi/rational.hpp"

namespace hhpsi {

/// Convert an exact rational to a floating scalar.  Goes through a decimal
/// string for long double so no precision is lost to an intermediate double.
template <class R>
R to_real(const Rational& q);

template <>
inline double to_real<double>(const Rational& q) {
    return q.get_d();
}

template <>
inline long double to_real<long double>(const Rational& q) {
    // mpq_get_d would round to double first; go through exact num/den.
    long double n = strtold(q.get_num().get_str().c_str(), nullptr);
    long double d = strtold(q.get_den().get_str().c_str(), nullptr);
    return n / d;
}

/// Element u + v*sqrt(d) of Q(sqrt(d)) for a fixed rational discriminant d,
/// which may be negative (then sqrt(d) = i*sqrt(|d|)).  If d is a perfect
/// square the radical part is folded into the rational part on construction,
/// so zero/equality tests remain exact in degenerate-resonance regimes.
///
/// Used for exact exponent arithmetic on the recursion lattice: an index
/// (k,l,m) maps to an element of Q(sqrt(d)), and resonance detection is an
/// exact is_zero() on the characteristic factors, never a float threshold.
class QuadExt {
public:
    QuadExt() : u_(0), v_(0), d_(0) {}

    QuadExt(Rational u, Rational v, Rational d)
        : u_(std::move(u)), v_(std::move(v)), d_(std::move(d)) {
        if (v_ != 0 && is_perfect_square(d_)) {
            u_ += v_ * exact_sqrt(d_);
            v_ = 0;
        }
        if (v_ == 0) d_ = 0; // rational element; discriminant irrelevant
    }

    static QuadExt from_rational(Rational u) { return QuadExt(std::move(u), 0, 0); }

    const Rational& rational_part() const { return u_; }
    const Rational& radical_part() const { return v_; }
    const Rational& discriminant() const { return d_; }

    bool is_zero() const { return u_ == 0 && v_ == 0; }
    bool is_rational() const { return v_ == 0; }

    std::optional<Rational> as_rational() const {
        if (v_ == 0) return u_;
        return std::nullopt;
    }

    QuadExt conj() const { return raw(u_, -v_, d_); }

    friend QuadExt operator+(const QuadExt& a, const QuadExt& b) {
        return raw(a.u_ + b.u_, a.v_ + b.v_, a.merge_d(b));
    }
    friend QuadExt operator-(const QuadExt& a, const QuadExt& b) {
        return raw(a.u_ - b.u_, a.v_ - b.v_, a.merge_d(b));
    }
    friend QuadExt operator*(const QuadExt& a, const QuadExt& b) {
        Rational d = a.merge_d(b);
        return raw(a.u_ * b.u_ + a.v_ * b.v_ * d, a.u_ * b.v_ + a.v_ * b.u_, d);
    }
    QuadExt operator-() const { return raw(-u_, -v_, d_); }

    friend QuadExt operator+(const QuadExt& a, const Rational& r) {
        return raw(a.u_ + r, a.v_, a.d_);
    }
    friend QuadExt operator-(const QuadExt& a, const Rational& r) {
        return raw(a.u_ - r, a.v_, a.d_);
    }
    friend QuadExt operator*(const QuadExt& a, const Rational& r) {
        return raw(a.u_ * r, a.v_ * r, a.d_);
    }

    friend bool operator==(const QuadExt& a, const QuadExt& b) {
        return a.u_ == b.u_ && a.v_ == b.v_;
    }
    friend bool operator==(const QuadExt& a, const Rational& r) {
        return a.v_ == 0 && a.u_ == r;
    }
    friend bool operator==(const QuadExt& a, long r) {
        return a.v_ == 0 && a.u_ == r;
    }

    /// Numeric value; imaginary part nonzero only when d < 0.
    template <class R>
    std::complex<R> value() const {
        R u = to_real<R>(u_);
        if (v_ == 0) return {u, R(0)};
        R v = to_real<R>(v_);
        if (sgn(d_) >= 0) {
            using std::sqrt;
            return {u + v * sqrt(to_real<R>(d_)), R(0)};
        }
        using std::sqrt;
        return {u, v * sqrt(-to_real<R>(d_))};
    }

    std::string str() const {
        if (v_ == 0) return u_.get_str();
        Rational av = sgn(v_) < 0 ? Rational(-v_) : v_;
        return u_.get_str() + (sgn(v_) < 0 ? " - " : " + ") +
               av.get_str() + "*sqrt(" + d_.get_str() + ")";
    }

private:
    // Internal constructor that skips square-folding: operands are already
    // normalized, and sums/products of normalized elements stay normalized.
    static QuadExt raw(Rational u, Rational v, Rational d) {
        QuadExt q;
        q.u_ = std::move(u);
        q.v_ = std::move(v);
        q.d_ = q.v_ == 0 ? Rational(0) : std::move(d);
        return q;
    }

    // Elements from the same expansion share one discriminant; a rational
    // element (v == 0, d == 0) combines with anything.
    Rational merge_d(const QuadExt& other) const {
        if (v_ == 0) return other.d_;
        if (other.v_ == 0) return d_;
        if (d_ != other.d_)
            throw error("QuadExt: mixing elements of different quadratic fields");
        return d_;
    }

    Rational u_, v_, d_;
};

} // namespace hhpsi

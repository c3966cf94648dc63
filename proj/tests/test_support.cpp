#include <doctest.h>

#include "hhpsi/quadratic.hpp"
#include "hhpsi/rational.hpp"
#include "hhpsi/serialize.hpp"
#include "hhpsi/support.hpp"

using namespace hhpsi;

TEST_CASE("rational parsing: fractions, integers, decimals") {
    CHECK(parse_rational("-24/23") == Rational(-24, 23));
    CHECK(parse_rational("7") == 7);
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("-1.5e-2") == Rational(-3, 200));
    CHECK(parse_rational("2/4") == Rational(1, 2)); // canonicalized
    CHECK(parse_rational("1e3") == 1000);
}

TEST_CASE("rational parsing: malformed input reports byte offsets") {
    CHECK_THROWS_AS(parse_rational(""), invalid_input);
    CHECK_THROWS_AS(parse_rational("1/0"), invalid_input);
    CHECK_THROWS_AS(parse_rational("1//2"), invalid_input);
    CHECK_THROWS_AS(parse_rational("abc"), invalid_input);
    CHECK_THROWS_AS(parse_rational("1.2.3"), invalid_input);
    try {
        parse_rational("3/x4");
    } catch (const invalid_input& e) {
        CHECK(std::string(e.what()).find("byte 2") != std::string::npos);
    }
}

TEST_CASE("perfect squares and exact square roots") {
    CHECK(is_perfect_square(Rational(49, 4)));
    CHECK(exact_sqrt(Rational(49, 4)) == Rational(7, 2));
    CHECK(!is_perfect_square(Rational(2)));
    CHECK(!is_perfect_square(Rational(-4)));
    CHECK(is_perfect_square(Rational(0)));
}

TEST_CASE("quadratic field arithmetic is exact") {
    // r, rbar = (5 +- sqrt(7))/2: the lam = -4/5 resonances.
    Rational d = 7;
    QuadExt r(Rational(5, 2), Rational(1, 2), d);
    QuadExt rbar = r.conj();
    CHECK((r + rbar) == Rational(5));
    // r * rbar = (25 - 7)/4 = 9/2; equals 12 + 6/lam at lam = -4/5.
    CHECK((r * rbar) == Rational(9, 2));
    // K at index (1,1,1): 1 + r + rbar = 6 exactly -- the aliased resonance.
    QuadExt K = QuadExt::from_rational(1) + r + rbar;
    CHECK(K == Rational(6));
    CHECK((K - Rational(6)).is_zero());
    CHECK(!(K - r).is_zero());
}

TEST_CASE("square discriminants fold to rationals") {
    // d = 1 (lam = -1): r = 3, rbar = 2.
    QuadExt r(Rational(5, 2), Rational(1, 2), Rational(1));
    CHECK(r.is_rational());
    CHECK(r == Rational(3));
    QuadExt rbar(Rational(5, 2), Rational(-1, 2), Rational(1));
    CHECK(rbar == Rational(2));
}

TEST_CASE("negative discriminants give conjugate complex values") {
    // lam = 1: d1 = -47, r = 5/2 + i sqrt(47)/2.
    QuadExt r(Rational(5, 2), Rational(1, 2), Rational(-47));
    auto z = r.value<double>();
    CHECK(z.real() == doctest::Approx(2.5));
    CHECK(z.imag() == doctest::Approx(std::sqrt(47.0) / 2));
    auto zb = r.conj().value<double>();
    CHECK(zb.imag() == doctest::Approx(-std::sqrt(47.0) / 2));
}

TEST_CASE("complex literal parsing") {
    auto close = [](std::complex<long double> z, double re, double im) {
        return std::abs(static_cast<double>(z.real()) - re) < 1e-18 &&
               std::abs(static_cast<double>(z.imag()) - im) < 1e-18;
    };
    CHECK(close(parse_complex("0.1"), 0.1, 0));
    CHECK(close(parse_complex("0.1+0.2i"), 0.1, 0.2));
    CHECK(close(parse_complex("-1e-3-2i"), -1e-3, -2));
    CHECK(close(parse_complex("3i"), 0, 3));
    CHECK(close(parse_complex("-i"), 0, -1));
    CHECK(close(parse_complex("1e+2-3i"), 100, -3));
    CHECK_THROWS_AS(parse_complex(""), invalid_input);
    CHECK_THROWS_AS(parse_complex("1+2j"), invalid_input);
    CHECK_THROWS_AS(parse_complex("i2"), invalid_input);
}

TEST_CASE("complex formatting round-trips") {
    auto z = parse_complex(fmt_complex({0.1, -0.25}));
    CHECK(static_cast<double>(z.real()) == 0.1);
    CHECK(static_cast<double>(z.imag()) == -0.25);
    CHECK(fmt_complex({0.5, 0.0}) == "0.5");
}

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (int h : hits) CHECK(h == 1);
}

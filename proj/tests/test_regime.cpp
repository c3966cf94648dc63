#include <doctest.h>

#include "hhpsi/regime.hpp"
#include "hhpsi/serialize.hpp"

using namespace hhpsi;

namespace {
RegimeReport go(const char* lam, const char* A = "1", const char* B = "1",
                CaseRequest req = CaseRequest::automatic) {
    return classify(parse_rational(lam), parse_rational(A), parse_rational(B), req);
}
} // namespace

TEST_CASE("regime boundaries are classified exactly") {
    CHECK(go("1").label == std::string("CaseI-Complex"));
    CHECK(go("-24/23").label == std::string("CaseI-Repeated"));
    CHECK(go("-1/2").label == std::string("CaseI-LogAnomaly"));
    CHECK(go("1/48").label == std::string("CaseII-RepeatedZero"));
    CHECK(go("-1/4").label == std::string("CaseII-PositiveRbar"));
    CHECK(go("-2").label == std::string("CaseI-Complex"));
    CHECK(go("-1", "1", "1").label == std::string("Integrable"));
    CHECK(go("-1/6").label == std::string("Integrable"));
    CHECK(go("-1/16", "1", "16").label == std::string("Integrable"));
}

TEST_CASE("near-boundary rationals do not leak across thresholds") {
    // A hair on either side of -24/23 leaves the repeated-resonance row.
    CHECK(go("-2400000000001/2300000000000").label == std::string("CaseI-Complex"));
    CHECK(go("-2399999999999/2300000000000").label ==
          std::string("CaseI-IrrationalDistinct"));
    CHECK(go("-24/23").label == std::string("CaseI-Repeated"));
    // Just below -1/2 the series family survives but rbar ~ 5e-13 makes a
    // power substitution impractical; classification must still succeed.
    auto rep = go("-500000000001/1000000000000");
    CHECK(rep.label == std::string("CaseI-IrrationalDistinct"));
    CHECK(rep.viable);
    CHECK(rep.n == 0);
    CHECK(rep.status.find("substitution index") != std::string::npos);
}

TEST_CASE("case i discriminant, resonances, viability") {
    auto rep = go("-4/5");
    CHECK(rep.label == std::string("CaseI-IrrationalDistinct"));
    CHECK(rep.viable);
    CHECK(rep.discriminant == Rational(7));
    CHECK((rep.r + rep.rbar) == Rational(5));
    // r*rbar = 12 + 6/lam
    CHECK((rep.r * rep.rbar) == Rational(12) + Rational(6) / Rational(-4, 5));
    CHECK(rep.n == 1);

    auto cx = go("1");
    CHECK(cx.discriminant == Rational(-47));
    CHECK(cx.n == 1);
    auto z = cx.r.value<double>();
    CHECK(z.real() == doctest::Approx(2.5));
    CHECK(z.imag() == doctest::Approx(std::sqrt(47.0) / 2));

    // lam = -3/4: d1 = 9, rational resonances r = 4, rbar = 1.
    auto rat = go("-3/4");
    CHECK(rat.label == std::string("CaseI-RationalDistinct"));
    CHECK(rat.r == Rational(4));
    CHECK(rat.rbar == Rational(1));
}

TEST_CASE("case ii branch data") {
    auto rep = go("1/96", "1", "1", CaseRequest::case_ii);
    CHECK(rep.label == std::string("CaseII-PositiveRbar"));
    CHECK(rep.viable);
    CHECK(rep.discriminant == Rational(1, 2));
    auto s = rep.rbar.value<double>();
    CHECK(s.real() == doctest::Approx(std::sqrt(0.5)));
    auto ab = rep.alpha_bar.value<double>();
    CHECK(ab.real() == doctest::Approx((1 - std::sqrt(0.5)) / 2));
    CHECK(rep.n == 2); // 1/2 < sqrt(1/2) but 1 > sqrt(1/2)

    // Negative-resonance mirror branch is reported but not viable.
    auto alt = go("1/96", "1", "1", CaseRequest::case_ii_alt);
    CHECK(alt.label == std::string("CaseII-NegativeResonance"));
    CHECK(!alt.viable);

    // lam > 1/48: pure imaginary resonance.
    CHECK(go("1", "1", "1", CaseRequest::case_ii).label ==
          std::string("CaseII-ImaginaryRbar"));

    // case ii balance does not exist at lam <= -1/2.
    CHECK_THROWS_AS(go("-1", "1", "1", CaseRequest::case_ii), out_of_scope);
}

TEST_CASE("logarithmic obstructions set status but keep the labels") {
    auto li = go("-1", "1", "2");
    CHECK(li.label == std::string("CaseI-RationalDistinct"));
    CHECK(!li.viable);
    CHECK(li.status.find("logarithmic") != std::string::npos);

    auto lii = go("-1/16", "1", "1");
    CHECK(lii.label == std::string("CaseII-PositiveRbar"));
    CHECK(!lii.viable);
    CHECK(lii.status.find("logarithmic") != std::string::npos);
}

TEST_CASE("forced case-i view of the case-ii window is not viable") {
    auto rep = go("-1/4", "1", "1", CaseRequest::case_i);
    CHECK(rep.label == std::string("CaseI-IrrationalDistinct"));
    CHECK(!rep.viable); // rbar = (5 - sqrt(73))/2 < 0
}

TEST_CASE("substitution index tracks rbar") {
    // rbar just above 1/4: lam with d1 = (4.5 - eps)^2... use d2 route:
    // case ii with s = 0.3: d2 = 9/100, lam = (1 - 9/100)/48 = 91/4800.
    auto rep = go("91/4800", "1", "1", CaseRequest::case_ii);
    CHECK(rep.rbar == Rational(3, 10));
    CHECK(rep.n == 4);
}

TEST_CASE("lambda = 0 is rejected") {
    CHECK_THROWS_AS(go("0"), invalid_input);
}

TEST_CASE("regime report serializes the contract fields") {
    auto j = to_json(go("1"));
    CHECK(j["case"] == "CaseI-Complex");
    CHECK(j["viable"] == true);
    CHECK(j["n"] == 1);
    CHECK(j["discriminant"] == "-47");
    CHECK(j["resonances"].size() == 4);
    CHECK(j.contains("alphaBar"));
}

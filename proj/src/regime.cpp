#include "hhpsi/regime.hpp"

namespace hhpsi {

namespace {

const Rational kHalf = Rational(1, 2);

// d1 = -(23 lam + 24)/lam, discriminant of the case-i resonance pair.
Rational case_i_discriminant(const Rational& lam) {
    return -(23 * lam + 24) / lam;
}

// d2 = 1 - 48 lam, square of the case-ii resonance s.
Rational case_ii_discriminant(const Rational& lam) {
    return 1 - 48 * lam;
}

void fill_case_i(RegimeReport& rep) {
    const Rational d1 = case_i_discriminant(rep.lambda);
    rep.discriminant = d1;
    rep.alpha = QuadExt::from_rational(-2);
    rep.alpha_bar = rep.alpha;
    rep.r = QuadExt(Rational(5, 2), kHalf, d1);
    rep.rbar = QuadExt(Rational(5, 2), -kHalf, d1);
    rep.resonances = {QuadExt::from_rational(-1), QuadExt::from_rational(6),
                      rep.r, rep.rbar};
}

void fill_case_ii(RegimeReport& rep, bool alt_branch) {
    const Rational d2 = case_ii_discriminant(rep.lambda);
    rep.discriminant = d2;
    const QuadExt s(0, 1, d2); // folds to a rational when d2 is a square
    rep.alpha = QuadExt(kHalf, kHalf, d2);      // (1 + s)/2
    rep.alpha_bar = QuadExt(kHalf, -kHalf, d2); // (1 - s)/2
    rep.rbar = s;
    if (alt_branch) {
        std::swap(rep.alpha, rep.alpha_bar);
        rep.rbar = -s;
    }
    rep.r = rep.rbar;
    rep.resonances = {QuadExt::from_rational(-1), QuadExt::from_rational(0),
                      QuadExt::from_rational(6), rep.rbar};
}

RegimeReport classify_case_i(RegimeReport rep) {
    const Rational& lam = rep.lambda;
    if (lam == Rational(-1, 2)) {
        // d1 = 2: r = 5, rbar = 0; the zero resonance collides with the
        // arbitrary singularity location and forces logarithmic terms.
        fill_case_i(rep);
        rep.regime = RegimeCase::case_i_log_anomaly;
        rep.viable = false;
        rep.status = "rbar = 0: expansion requires logarithmic terms";
        return rep;
    }
    if (lam == Rational(-24, 23)) {
        fill_case_i(rep);
        rep.regime = RegimeCase::case_i_repeated;
        rep.viable = false;
        rep.status = "repeated resonance r = rbar = 5/2";
        return rep;
    }
    fill_case_i(rep);
    const Rational& d1 = rep.discriminant;
    if (sgn(d1) < 0) {
        rep.regime = RegimeCase::case_i_complex;
        rep.viable = true;
        return rep;
    }
    rep.regime = is_perfect_square(d1) ? RegimeCase::case_i_rational
                                       : RegimeCase::case_i_irrational;
    // rbar = (5 - sqrt(d1))/2 > 0 iff d1 < 25.
    rep.viable = d1 < 25;
    if (!rep.viable)
        rep.status = "negative resonance rbar <= 0: no pole-type family";
    if (rep.viable && rep.lambda == -1 && rep.A != rep.B) {
        // r = 3, rbar = 2 pass the resonance conditions, but the A != B
        // perturbation is known to inject logarithms at higher order.
        rep.viable = false;
        rep.status = "lam = -1 with A != B: logarithmic obstruction";
    }
    return rep;
}

RegimeReport classify_case_ii(RegimeReport rep, bool alt_branch) {
    const Rational& lam = rep.lambda;
    if (lam <= Rational(-1, 2))
        throw out_of_scope("case ii balance requires lam > -1/2 (x^2 must stay "
                           "subdominant in the y-equation)");
    fill_case_ii(rep, alt_branch);
    const Rational& d2 = rep.discriminant;
    if (sgn(d2) < 0) {
        rep.regime = RegimeCase::case_ii_imaginary;
        rep.viable = false;
        rep.status = "rbar pure imaginary: oscillatory branch, out of scope";
        return rep;
    }
    if (d2 == 0) {
        rep.regime = RegimeCase::case_ii_repeated_zero;
        rep.viable = false;
        rep.status = "repeated resonance rbar = 0 at lam = 1/48";
        return rep;
    }
    if (alt_branch) {
        rep.regime = RegimeCase::case_ii_negative;
        rep.viable = false;
        rep.status = "resonance -s < 0: constants enter below leading order";
        return rep;
    }
    rep.regime = RegimeCase::case_ii_positive;
    rep.viable = true;
    if (rep.lambda == Rational(-1, 16) && rep.B != 16 * rep.A) {
        rep.viable = false;
        rep.status = "lam = -1/16 with B != 16A: logarithmic obstruction";
    }
    return rep;
}

} // namespace

const char* to_label(RegimeCase c) {
    switch (c) {
        case RegimeCase::case_i_complex: return "CaseI-Complex";
        case RegimeCase::case_i_rational: return "CaseI-RationalDistinct";
        case RegimeCase::case_i_irrational: return "CaseI-IrrationalDistinct";
        case RegimeCase::case_i_repeated: return "CaseI-Repeated";
        case RegimeCase::case_i_log_anomaly: return "CaseI-LogAnomaly";
        case RegimeCase::case_ii_positive: return "CaseII-PositiveRbar";
        case RegimeCase::case_ii_negative: return "CaseII-NegativeResonance";
        case RegimeCase::case_ii_repeated_zero: return "CaseII-RepeatedZero";
        case RegimeCase::case_ii_imaginary: return "CaseII-ImaginaryRbar";
        case RegimeCase::integrable: return "Integrable";
    }
    return "?";
}

RegimeReport classify(const Rational& lambda, const Rational& A,
                      const Rational& B, CaseRequest request) {
    if (lambda == 0)
        throw invalid_input("lambda = 0 decouples the system; no singular balance");

    RegimeReport rep;
    rep.lambda = lambda;
    rep.A = A;
    rep.B = B;

    // Known integrable parameter sets have the Painleve property; movable
    // singularities are poles but the series carries no information beyond
    // the closed-form solutions, so they are reported and excluded.
    const bool integrable = (lambda == -1 && A == B) ||
                            lambda == Rational(-1, 6) ||
                            (lambda == Rational(-1, 16) && B == 16 * A);
    if (integrable && request == CaseRequest::automatic) {
        rep.regime = RegimeCase::integrable;
        rep.viable = false;
        rep.status = "integrable parameter set; closed-form solutions exist";
        rep.label = to_label(rep.regime);
        return rep;
    }

    switch (request) {
        case CaseRequest::case_i:
            rep = classify_case_i(std::move(rep));
            break;
        case CaseRequest::case_ii:
            rep = classify_case_ii(std::move(rep), false);
            break;
        case CaseRequest::case_ii_alt:
            rep = classify_case_ii(std::move(rep), true);
            break;
        case CaseRequest::automatic: {
            // Exact boundaries first, then the lone window where case ii is
            // the primary balance, then case i everywhere else.
            if (lambda == Rational(-1, 2) || lambda == Rational(-24, 23)) {
                rep = classify_case_i(std::move(rep));
            } else if (lambda == Rational(1, 48)) {
                rep = classify_case_ii(std::move(rep), false);
            } else if (Rational(-1, 2) < lambda && lambda < 0) {
                rep = classify_case_ii(std::move(rep), false);
            } else {
                rep = classify_case_i(std::move(rep));
            }
            break;
        }
    }
    rep.label = to_label(rep.regime);
    rep.n = substitution_index(rep);
    if (rep.viable && rep.n == 0) {
        if (!rep.status.empty()) rep.status += "; ";
        rep.status += "substitution index exceeds 2^20: resummation impractical";
    }
    return rep;
}

int substitution_index(const RegimeReport& report) {
    if (!report.viable) return 0;
    if (report.regime == RegimeCase::case_i_complex) return 1;
    // Smallest n with rbar > 1/n.  rbar = (5 - sqrt(d1))/2 in case i and
    // sqrt(d2) in case ii; both comparisons reduce to exact rational tests.
    const Rational& d = report.discriminant;
    for (int n = 1; n <= 1 << 20; ++n) {
        bool ok;
        if (report.regime == RegimeCase::case_ii_positive) {
            // sqrt(d2) > 1/n  <=>  d2 * n^2 > 1
            ok = d * n * n > 1;
        } else {
            // (5 - sqrt(d1))/2 > 1/n  <=>  5n - 2 > n sqrt(d1); both sides
            // positive here, so square exactly.
            Rational lhs = 5 * n - 2;
            ok = lhs > 0 && lhs * lhs > d * n * n;
        }
        if (ok) return n;
    }
    // rbar is positive but tiny (lambda pressed against a boundary); the
    // series family exists, resummation in w = tau^(1/n) does not.
    return 0;
}

} // namespace hhpsi

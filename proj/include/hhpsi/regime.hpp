#pragma once

#include <string>
#include <vector>

#include "hhpsi/quadratic.hpp"
#include "hhpsi/rational.hpp"

namespace hhpsi {

/// Leading-order balance families for movable singularities of the cubic
/// two-degree-of-freedom system
///     x'' + A x + 2 lam x y = 0
///     y'' + B y + lam x^2 - y^2 = 0.
///
/// Case i:  x ~ a0 tau^-2, y ~ -3/lam tau^-2; resonances {-1, 6, r, rbar}
///          with r, rbar = 5/2 +- sqrt(d1)/2, d1 = -(23 lam + 24)/lam.
/// Case ii: y ~ 6 tau^-2, x ~ a0 tau^alphabar; resonances {-1, 0, 6, rbar}
///          with rbar = s = sqrt(1 - 48 lam), alphabar = (1 - s)/2.
enum class RegimeCase {
    case_i_complex,        // d1 < 0: conjugate resonance pair
    case_i_rational,       // d1 a positive rational square: distinct rational
    case_i_irrational,     // d1 > 0 non-square: distinct irrational
    case_i_repeated,       // lam = -24/23: r = rbar = 5/2
    case_i_log_anomaly,    // lam = -1/2: rbar = 0, logarithmic branch
    case_ii_positive,      // rbar = s in (0,5): viable second balance
    case_ii_negative,      // mirrored branch, resonance -s < 0
    case_ii_repeated_zero, // lam = 1/48: rbar = 0 repeated
    case_ii_imaginary,     // lam > 1/48: rbar pure imaginary
    integrable,            // a known integrable parameter set
};

/// Which leading balance to classify.  `automatic` resolves priority as
/// exact boundary values first (integrable sets, -1/2, -24/23, 1/48), then
/// case ii on (-1/2, 0), then case i elsewhere.
enum class CaseRequest { automatic, case_i, case_ii, case_ii_alt };

struct RegimeReport {
    RegimeCase regime{};
    std::string label;  // canonical name, e.g. "CaseI-Complex"
    bool viable = false; // full series/resummation machinery applicable
    std::string status;  // human-readable notes (log obstructions etc.)

    Rational lambda, A, B;
    Rational discriminant; // d1 (case i) or d2 = 1 - 48 lam (case ii)
    QuadExt alpha;         // leading x-exponent (case ii: unused root)
    QuadExt alpha_bar;     // exponent of the expansion branch
    QuadExt r, rbar;       // non-trivial resonances (case ii: rbar only)
    std::vector<QuadExt> resonances; // full list, fixed order
    int n = 0;             // substitution index (0 if not applicable)
};

/// Classify exactly; lambda, A, B are exact rationals.  Throws invalid_input
/// for lambda = 0 and out_of_scope for structurally impossible requests
/// (e.g. a case-ii balance at lam <= -1/2, where x^2 would dominate y'').
RegimeReport classify(const Rational& lambda, const Rational& A,
                      const Rational& B,
                      CaseRequest request = CaseRequest::automatic);

/// Least n >= 1 with rbar > 1/n (exact comparison); 1 for the complex case.
/// Returns 0 for non-viable regimes.
int substitution_index(const RegimeReport& report);

const char* to_label(RegimeCase c);

} // namespace hhpsi

#include "hhpsi/rational.hpp"

#include <cctype>
#include <cstddef>

namespace hhpsi {

namespace {

[[noreturn]] void bad_char(std::string_view text, std::size_t offset, const char* what) {
    throw invalid_input("cannot parse '" + std::string(text) + "' as a rational: " +
                        what + " at byte " + std::to_string(offset));
}

// Parse a decimal literal (possibly with exponent) exactly.
Rational parse_decimal(std::string_view text) {
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    mpz_class mantissa = 0;
    long frac_digits = 0;
    bool any_digit = false;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_dot) ++frac_digits;
            any_digit = true;
        } else if (c == '.') {
            if (seen_dot) bad_char(text, i, "second decimal point");
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            bad_char(text, i, "unexpected character");
        }
    }
    if (!any_digit) bad_char(text, i, "missing digits");
    long exp10 = 0;
    if (i < text.size()) { // exponent part
        ++i; // consume 'e'
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            eneg = text[i] == '-';
            ++i;
        }
        if (i == text.size()) bad_char(text, i, "missing exponent digits");
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i])))
                bad_char(text, i, "unexpected character in exponent");
            exp10 = exp10 * 10 + (text[i] - '0');
            if (exp10 > 100000) bad_char(text, i, "exponent out of range");
        }
        if (eneg) exp10 = -exp10;
    }
    exp10 -= frac_digits;
    mpz_class num = neg ? mpz_class(-mantissa) : mantissa;
    mpz_class den = 1;
    if (exp10 >= 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exp10));
        num *= p;
    } else {
        mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(-exp10));
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

} // namespace

Rational parse_rational(std::string_view text) {
    if (text.empty()) throw invalid_input("cannot parse '': empty rational literal at byte 0");
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text);
    if (slash == 0 || slash + 1 == text.size())
        bad_char(text, slash, "misplaced '/'");
    auto check_int = [&](std::string_view part, std::size_t base) {
        std::size_t i = 0;
        if (i < part.size() && (part[i] == '+' || part[i] == '-')) ++i;
        if (i == part.size()) bad_char(text, base + i, "missing digits");
        for (; i < part.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(part[i])))
                bad_char(text, base + i, "unexpected character");
    };
    check_int(text.substr(0, slash), 0);
    check_int(text.substr(slash + 1), slash + 1);
    Rational q(std::string(text), 10);
    if (q.get_den() == 0)
        throw invalid_input("cannot parse '" + std::string(text) +
                            "' as a rational: zero denominator at byte " +
                            std::to_string(slash + 1));
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) {
    return q.get_str();
}

double to_double(const Rational& q) {
    return q.get_d();
}

bool is_perfect_square(const Rational& q) {
    if (sgn(q) < 0) return false;
    return mpz_perfect_square_p(q.get_num().get_mpz_t()) &&
           mpz_perfect_square_p(q.get_den().get_mpz_t());
}

Rational exact_sqrt(const Rational& q) {
    if (!is_perfect_square(q))
        throw error("exact_sqrt: argument is not a rational square");
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num().get_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den().get_mpz_t());
    Rational r(n, d);
    r.canonicalize();
    return r;
}

} // namespace hhpsi

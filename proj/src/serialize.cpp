#include "hhpsi/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace hhpsi {

namespace {

[[noreturn]] void bad_complex(std::string_view text, std::size_t offset, const char* what) {
    throw invalid_input("cannot parse '" + std::string(text) + "' as a complex literal: " +
                        what + " at byte " + std::to_string(offset));
}

// Parse a real literal occupying all of `part` (offset is its position in
// the full literal, for error messages).
long double parse_part(std::string_view text, std::string_view part, std::size_t offset) {
    if (part.empty()) bad_complex(text, offset, "missing number");
    std::string buf(part);
    char* end = nullptr;
    long double v = strtold(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size())
        bad_complex(text, offset + (end - buf.c_str()), "unexpected character");
    return v;
}

} // namespace

std::complex<long double> parse_complex(std::string_view text) {
    if (text.empty()) bad_complex(text, 0, "empty literal");

    // Find the sign separating real and imaginary parts: a '+'/'-' that is
    // neither leading nor part of an exponent.
    std::size_t split = std::string_view::npos;
    for (std::size_t i = 1; i < text.size(); ++i) {
        char c = text[i];
        if ((c == '+' || c == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
            split = i;
            break;
        }
    }

    auto parse_imag = [&](std::string_view part, std::size_t offset) -> long double {
        // `part` must end in 'i'; "i", "+i", "-i" mean unit magnitude.
        std::string_view body = part.substr(0, part.size() - 1);
        if (body.empty() || body == "+") return 1.0L;
        if (body == "-") return -1.0L;
        return parse_part(text, body, offset);
    };

    if (split == std::string_view::npos) {
        if (text.back() == 'i' || text.back() == 'I')
            return {0.0L, parse_imag(text, 0)};
        return {parse_part(text, text, 0), 0.0L};
    }
    std::string_view re_part = text.substr(0, split);
    std::string_view im_part = text.substr(split);
    if (im_part.back() != 'i' && im_part.back() != 'I')
        bad_complex(text, text.size() - 1, "expected trailing 'i' on imaginary part");
    return {parse_part(text, re_part, 0), parse_imag(im_part, split)};
}

std::string fmt_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_complex(std::complex<double> z) {
    if (z.imag() == 0.0) return fmt_real(z.real());
    std::string s = fmt_real(z.real());
    if (!(std::signbit(z.imag())) ) s += "+";
    return s + fmt_real(z.imag()) + "i";
}

std::string quad_to_literal(const QuadExt& q) {
    return fmt_complex(q.value<double>());
}

nlohmann::json to_json(const RegimeReport& report) {
    nlohmann::json j;
    j["case"] = report.label;
    j["lambda"] = to_string(report.lambda);
    j["A"] = to_string(report.A);
    j["B"] = to_string(report.B);
    j["alpha"] = quad_to_literal(report.alpha);
    j["alphaBar"] = quad_to_literal(report.alpha_bar);
    j["discriminant"] = to_string(report.discriminant);
    nlohmann::json res = nlohmann::json::array();
    for (const auto& k : report.resonances) res.push_back(quad_to_literal(k));
    j["resonances"] = res;
    j["resonancesExact"] = [&] {
        nlohmann::json e = nlohmann::json::array();
        for (const auto& k : report.resonances) e.push_back(k.str());
        return e;
    }();
    j["viable"] = report.viable;
    j["n"] = report.n;
    if (!report.status.empty()) j["status"] = report.status;
    return j;
}

} // namespace hhpsi

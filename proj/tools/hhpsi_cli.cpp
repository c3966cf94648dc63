// Command-line surface for the psi-series machinery: regime analysis,
// coefficient expansion, resummation, convergence certificates and
// series-vs-integrator cross-validation for the cubic Henon-Heiles system.
//
// Exit codes: 0 success, 1 invalid input, 2 out-of-scope regime,
// 3 verification failure.

#include <CLI11.hpp>

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hhpsi/serialize.hpp"
#include "hhpsi/validation.hpp"

namespace {

using namespace hhpsi;

struct Config {
    std::string lambda = "1";
    std::string A = "1";
    std::string B = "1";
    int sign = 1;
    std::string balance = "auto";
    int order = 20;
    std::string a010 = "0.1";
    std::string a001 = "0.1";
    std::string a600 = "0";
    std::string a000 = "1";
    std::string b600 = "0";
    double tol = 0; // 0 = per-command default
    std::string precision = "double";
    unsigned threads = 1;
    std::string out;
    int gamma_max = -1; // regrouping depth, default = order
    double tau0 = 0;    // validate: default = R/8
    double tau1 = 0;    // validate: default = R/4
};

CaseRequest parse_case(const std::string& s) {
    if (s == "auto" || s == "automatic") return CaseRequest::automatic;
    if (s == "i") return CaseRequest::case_i;
    if (s == "ii") return CaseRequest::case_ii;
    if (s == "ii-alt") return CaseRequest::case_ii_alt;
    throw invalid_input("unknown balance selector '" + s +
                        "' (expected auto, i, ii or ii-alt)");
}

// "a+bi" literal with exact-rational parts: "0.5", "-2/3i", "1e-2-0.25i".
template <class R>
std::complex<R> parse_complex(const std::string& text) {
    std::string_view sv(text);
    if (sv.empty()) throw invalid_input("empty complex literal");
    if (sv.back() != 'i' && sv.back() != 'I')
        return {to_real<R>(parse_rational(sv)), R(0)};
    sv.remove_suffix(1);
    // Split before the sign of the imaginary part; exponent signs do not
    // count, and a leading sign belongs to the real (or only) part.
    std::size_t split = std::string_view::npos;
    for (std::size_t pos = sv.size(); pos-- > 1;)
        if ((sv[pos] == '+' || sv[pos] == '-') && sv[pos - 1] != 'e' &&
            sv[pos - 1] != 'E') {
            split = pos;
            break;
        }
    const std::string_view re_part =
        split == std::string_view::npos ? std::string_view{}
                                        : sv.substr(0, split);
    std::string_view im_part =
        split == std::string_view::npos ? sv : sv.substr(split);
    R im;
    if (im_part.empty() || im_part == "+")
        im = 1;
    else if (im_part == "-")
        im = -1;
    else
        im = to_real<R>(parse_rational(im_part));
    const R re = re_part.empty() ? R(0) : to_real<R>(parse_rational(re_part));
    return {re, im};
}

RegimeReport classify_from(const Config& c) {
    return classify(parse_rational(c.lambda), parse_rational(c.A),
                    parse_rational(c.B), parse_case(c.balance));
}

template <class R>
ExpandOptions<R> options_from(const Config& c) {
    ExpandOptions<R> opt;
    opt.a010 = parse_complex<R>(c.a010);
    opt.a001 = parse_complex<R>(c.a001);
    opt.a600 = parse_complex<R>(c.a600);
    opt.a000 = parse_complex<R>(c.a000);
    opt.b600 = parse_complex<R>(c.b600);
    opt.sign = c.sign;
    opt.tol = c.tol > 0 ? c.tol : 1e-10;
    opt.threads = c.threads;
    return opt;
}

std::filesystem::path out_dir(const Config& c) {
    std::filesystem::path dir = c.out.empty() ? "." : c.out;
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p);
    if (!os) throw invalid_input("cannot write " + p.string());
    os << content;
}

int cmd_analyze(const Config& c) {
    const RegimeReport rep = classify_from(c);
    const std::string json = to_json(rep).dump(2) + "\n";
    std::cout << json;
    write_file(out_dir(c) / "regime.json", json);
    if (!rep.viable) {
        std::cerr << rep.label << ": " << rep.status << "\n";
        return 2;
    }
    return 0;
}

template <class R>
int cmd_expand(const Config& c) {
    const RegimeReport rep = classify_from(c);
    const Expansion<R> e = expand(rep, c.order, options_from<R>(c));

    std::cout << "case: " << rep.label << "\n";
    std::cout << "order: " << c.order << "\n";
    for (const Insertion& ins : e.insertions)
        std::cout << "compatibility residual at (" << ins.k << "," << ins.l
                  << "," << ins.m << "): " << fmt_real(ins.residual) << "  ["
                  << ins.kind << "]\n";
    if (rep.label.rfind("CaseII", 0) == 0 && c.order >= 4) {
        // The y-axis ladder is parameter-exact; its first two rungs make a
        // quick external check of a freshly produced table.
        std::cout << "b200 = " << fmt_real(double(std::real(e.table.b(2, 0, 0))))
                  << "\n";
        std::cout << "b400 = " << fmt_real(double(std::real(e.table.b(4, 0, 0))))
                  << "\n";
    }
    const auto path = out_dir(c) / "table.csv";
    std::ofstream os(path);
    if (!os) throw invalid_input("cannot write " + path.string());
    write_csv(os, e.table);
    std::cout << "table: " << path.string() << "\n";
    return 0;
}

template <class R>
int cmd_resum(const Config& c) {
    const RegimeReport rep = classify_from(c);
    const Expansion<R> e = expand(rep, c.order, options_from<R>(c));
    const int gamma = c.gamma_max >= 0 ? c.gamma_max : c.order;
    const ResummedSeries<R> s = resum(e, gamma);
    const std::string json = s.dump_json();
    std::cout << json;
    write_file(out_dir(c) / "resummed.json", json);
    return 0;
}

template <class R>
int cmd_certify(const Config& c) {
    const RegimeReport rep = classify_from(c);
    if (!rep.viable)
        throw out_of_scope("convergence not established for " + rep.label +
                           ": " + rep.status);
    const Expansion<R> e = expand(rep, c.order, options_from<R>(c));
    const int gamma = c.gamma_max >= 0 ? c.gamma_max : c.order;
    const ResummedSeries<R> s = resum(e, gamma);
    const Params<R> p{to_real<R>(rep.A), to_real<R>(rep.B),
                      to_real<R>(rep.lambda)};
    const BoundCertificate<R> cert =
        certify(s, p, gamma, default_z_grid<R>());
    const std::string json = cert.to_json();
    std::cout << json;
    write_file(out_dir(c) / "certificate.json", json);
    return cert.pass ? 0 : 3;
}

template <class R>
int cmd_validate(const Config& c) {
    const RegimeReport rep = classify_from(c);
    const Expansion<R> e = expand(rep, c.order, options_from<R>(c));

    // Default sampling range: fractions of the certified radius, so that
    // truncation error rather than divergence dominates.  When no
    // certificate is attainable, fall back to the root-test estimate.
    R radius = 0;
    try {
        const ResummedSeries<R> s = resum(e, c.order);
        const Params<R> p{to_real<R>(rep.A), to_real<R>(rep.B),
                          to_real<R>(rep.lambda)};
        radius = certify(s, p, c.order, default_z_grid<R>()).radius;
    } catch (const error&) {
        radius = 0;
    }
    R fallback = radius;
    if (!(fallback > 0)) {
        try {
            fallback = empirical_radius(e);
        } catch (const error&) {
            fallback = 0;
        }
    }
    const R tau0 = c.tau0 > 0 ? R(c.tau0) : fallback / 8;
    const R tau1 = c.tau1 > 0 ? R(c.tau1) : fallback / 4;
    if (!(tau0 > 0) || !(tau1 > 0))
        throw invalid_input(
            "no usable radius for default sampling; pass --tau0 and --tau1");

    std::vector<int> orders{c.order / 2, c.order};
    const R tol = c.tol > 0 ? R(c.tol) : R(1e-12L);
    const ValidationReport<R> repv =
        cross_validate(e, tau0, tau1, orders, tol, radius);

    const std::string json = repv.to_json();
    std::cout << json;
    const auto dir = out_dir(c);
    write_file(dir / "validation.json", json);
    const Params<R> p{to_real<R>(rep.A), to_real<R>(rep.B),
                      to_real<R>(rep.lambda)};
    {
        std::ofstream os(dir / "series.csv");
        write_curve_csv(os, p, repv.tau_samples, repv.series_states);
    }
    {
        std::ofstream os(dir / "integrator.csv");
        write_curve_csv(os, p, repv.tau_samples, repv.integrator_states);
    }
    return repv.pass ? 0 : 3;
}

template <class F>
int with_precision(const Config& c, F&& f) {
    if (c.precision == "extended") return f(static_cast<long double>(0));
    return f(static_cast<double>(0));
}

void add_model_flags(CLI::App* sub, Config& c) {
    sub->add_option("--lambda", c.lambda,
                    "coupling constant, exact fraction or decimal")
        ->capture_default_str();
    sub->add_option("--A", c.A, "x-oscillator coefficient")
        ->capture_default_str();
    sub->add_option("--B", c.B, "y-oscillator coefficient")
        ->capture_default_str();
    sub->add_option("--case", c.balance,
                    "leading balance: auto, i, ii or ii-alt")
        ->capture_default_str();
}

void add_series_flags(CLI::App* sub, Config& c) {
    sub->add_option("--sign", c.sign, "leading-amplitude branch (+1 or -1)")
        ->check(CLI::IsMember({-1, 1}))
        ->capture_default_str();
    sub->add_option("--order", c.order, "truncation order of the table")
        ->check(CLI::Range(0, 200))
        ->capture_default_str();
    sub->add_option("--a010", c.a010, "resonance amplitude, 'a+bi' literal")
        ->capture_default_str();
    sub->add_option("--a001", c.a001,
                    "conjugate resonance amplitude (first balance)")
        ->capture_default_str();
    sub->add_option("--a600", c.a600, "grade-6 free constant (first balance)")
        ->capture_default_str();
    sub->add_option("--a000", c.a000, "leading x amplitude (second balance)")
        ->capture_default_str();
    sub->add_option("--b600", c.b600, "grade-6 free constant (second balance)")
        ->capture_default_str();
    sub->add_option("--tol", c.tol,
                    "main tolerance (default: 1e-10 compatibility, 1e-12 "
                    "integrator)");
    sub->add_option("--precision", c.precision,
                    "floating-point width: double or extended")
        ->check(CLI::IsMember({"double", "extended"}))
        ->capture_default_str();
    sub->add_option("--threads", c.threads, "worker threads for the recursion")
        ->capture_default_str();
    sub->add_option("--out", c.out,
                    "output directory (env HHPSI_OUT_DIR, default .)")
        ->envname("HHPSI_OUT_DIR");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "psi-series machinery for the cubic Henon-Heiles system: movable\n"
        "singularities, coefficient recursions, resummation, convergence\n"
        "certificates and numerical cross-validation"};
    app.require_subcommand(1);

    Config cfg;
    CLI::App* analyze =
        app.add_subcommand("analyze", "classify the resonance regime");
    add_model_flags(analyze, cfg);
    analyze->add_option("--out", cfg.out,
                        "output directory (env HHPSI_OUT_DIR, default .)")
        ->envname("HHPSI_OUT_DIR");

    CLI::App* expand_cmd =
        app.add_subcommand("expand", "run the coefficient recursion");
    add_model_flags(expand_cmd, cfg);
    add_series_flags(expand_cmd, cfg);

    CLI::App* resum_cmd = app.add_subcommand(
        "resum", "regroup the table into exponential-sum grade blocks");
    add_model_flags(resum_cmd, cfg);
    add_series_flags(resum_cmd, cfg);
    resum_cmd->add_option("--gamma-max", cfg.gamma_max,
                          "highest regrouped grade (default: --order)");

    CLI::App* certify_cmd = app.add_subcommand(
        "certify", "fit and check a convergence-bound certificate");
    add_model_flags(certify_cmd, cfg);
    add_series_flags(certify_cmd, cfg);
    certify_cmd->add_option("--gamma-max", cfg.gamma_max,
                            "highest certified grade (default: --order)");

    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "cross-validate the series against the integrator");
    add_model_flags(validate_cmd, cfg);
    add_series_flags(validate_cmd, cfg);
    validate_cmd->add_option(
        "--tau0", cfg.tau0, "seed time offset (default: certified radius / 8)");
    validate_cmd->add_option(
        "--tau1", cfg.tau1,
        "comparison time offset (default: certified radius / 4)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(cfg);
        if (app.got_subcommand(expand_cmd))
            return with_precision(cfg, [&](auto z) {
                return cmd_expand<decltype(z)>(cfg);
            });
        if (app.got_subcommand(resum_cmd))
            return with_precision(cfg, [&](auto z) {
                return cmd_resum<decltype(z)>(cfg);
            });
        if (app.got_subcommand(certify_cmd))
            return with_precision(cfg, [&](auto z) {
                return cmd_certify<decltype(z)>(cfg);
            });
        if (app.got_subcommand(validate_cmd))
            return with_precision(cfg, [&](auto z) {
                return cmd_validate<decltype(z)>(cfg);
            });
        throw invalid_input("no command selected");
    } catch (const invalid_input& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const out_of_scope& e) {
        std::cerr << "out of scope: " << e.what() << "\n";
        return 2;
    } catch (const verification_failure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

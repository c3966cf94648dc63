#include <doctest.h>

#include <cmath>

#include "hhpsi/bounds.hpp"

using namespace hhpsi;
using C = std::complex<double>;

namespace {

Expansion<double> make(const char* lam, const char* A, const char* B,
                       int order, CaseRequest req = CaseRequest::automatic,
                       ExpandOptions<double> opt = {}) {
    auto rep = classify(parse_rational(lam), parse_rational(A),
                        parse_rational(B), req);
    return expand(rep, order, opt);
}

constexpr double kPi = 3.14159265358979323846;

} // namespace

TEST_CASE("convolution partial sums approach pi from below at sqrt rate") {
    CHECK(lemma_a2_partial_sum(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lemma_a2_partial_sum(2) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    double prev = lemma_a2_partial_sum(2);
    for (long g = 3; g <= 200; ++g) {
        const double cur = lemma_a2_partial_sum(g);
        CHECK(cur > prev);
        prev = cur;
    }
    for (long g : {100L, 10000L, 1000000L}) {
        const double s = lemma_a2_partial_sum(g);
        CHECK(std::abs(s - kPi) <= 5.0 / std::sqrt(double(g)));
        CHECK(s < kPi);
    }
    CHECK_THROWS_AS((void)lemma_a2_partial_sum(0), invalid_input);
}

TEST_CASE("two-variable growth constant: explicit formula cases") {
    // P1 = X + Y with M = p = 1 gives K = sqrt(2).
    std::vector<ExpoSum<double>> polys(1);
    polys[0].add(1, 0, C(1));
    polys[0].add(0, 1, C(1));
    CHECK(lemma_a3_constant<double>(polys, 1, 1) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    // Constant P1 = c: the degree-0 branch gives K = |c| sqrt(2) / p.
    std::vector<ExpoSum<double>> cpoly(1);
    cpoly[0].add(0, 0, C(0, -0.25)); // |c| = 1/4
    CHECK(lemma_a3_constant<double>(cpoly, 1, 2.0) ==
          doctest::Approx(0.25 * std::sqrt(2.0) / 2.0).epsilon(1e-12));

    // All-zero data has no constraint; the positive floor is returned.
    std::vector<ExpoSum<double>> zero(5);
    CHECK(lemma_a3_constant<double>(zero, 1, 1) == 1e-3);

    // Degree above the grade can never fit under (p + X + Y)^g.
    std::vector<ExpoSum<double>> bad(1);
    bad[0].add(2, 0, C(1));
    CHECK_THROWS_AS((void)lemma_a3_constant<double>(bad, 1, 1), invalid_input);
    CHECK_THROWS_AS((void)lemma_a3_constant<double>(polys, 0.0, 1),
                    invalid_input);
    CHECK_THROWS_AS((void)lemma_a3_constant<double>(polys, 1.5, 1),
                    invalid_input);
    CHECK_THROWS_AS((void)lemma_a3_constant<double>(polys, 1, 0.0),
                    invalid_input);
}

TEST_CASE("one-variable growth constant: bisection against known suprema") {
    // P1 = 2X, M = p = q = 1: the bound K(1+X) >= 2 sqrt(2) X is tight as
    // X -> infinity, so K = 2 sqrt(2).
    std::vector<std::vector<double>> polys{{0.0, 2.0}};
    const double k = lemma_a1_constant<double>(polys, 1, 1, 1);
    CHECK(k == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-6));

    // Returned K satisfies the defining predicate on a fresh grid.
    for (int i = 0; i <= 100; ++i) {
        const double x = std::pow(10.0, -3.0 + 6.0 * i / 100.0);
        CHECK(2.0 * x * std::sqrt(2.0) <= k * (1 + x) * (1 + 1e-9));
    }

    // Zero data: only the pK > 1 constraint binds.
    std::vector<std::vector<double>> zero{{}, {}};
    CHECK(lemma_a1_constant<double>(zero, 1, 1, 1) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(lemma_a1_constant<double>(zero, 1, 4.0, 1) ==
          doctest::Approx(0.25).epsilon(1e-6)); // floored at just above 1/p

    // q = 2: P1 = 1 demands K(1+X) >= 2 near X -> 0 (the grid floor at
    // 1e-4 relaxes that by one part in 1e4), P2 = X pins sqrt(3) at
    // infinity; the binding constraint is the first.
    std::vector<std::vector<double>> q2{{1.0}, {0.0, 1.0}};
    CHECK(lemma_a1_constant<double>(q2, 1, 1, 2) ==
          doctest::Approx(2.0).epsilon(1e-3));

    // Degree above g/q is infeasible.
    std::vector<std::vector<double>> bad{{0.0, 0.0, 1.0}};
    CHECK_THROWS_AS((void)lemma_a1_constant<double>(bad, 1, 1, 1), error);
    CHECK_THROWS_AS((void)lemma_a1_constant<double>(polys, 2.0, 1, 1),
                    invalid_input);
}

TEST_CASE("forcing constant matches the closed form") {
    Params<double> p{1, 1, 1};
    CHECK(forcing_constant(p) == doctest::Approx(1 + 2 * kPi).epsilon(1e-15));
    Params<double> p2{1, 2, -0.8};
    CHECK(forcing_constant(p2) ==
          doctest::Approx(2 + 1.8 * kPi).epsilon(1e-15));
    Params<double> p3{0, 0, 3};
    CHECK(forcing_constant(p3) == doctest::Approx(6 * kPi).epsilon(1e-15));
}

TEST_CASE("default grid is 64 negative log-spaced points") {
    auto zs = default_z_grid<double>();
    REQUIRE(zs.size() == 64);
    CHECK(zs.front() == doctest::Approx(-20.0));
    CHECK(zs.back() == doctest::Approx(-1e-3));
    for (std::size_t i = 1; i < zs.size(); ++i) CHECK(zs[i] > zs[i - 1]);
    for (double z : zs) CHECK(z < 0);
}

TEST_CASE("certificates pass and order the radius below the root test") {
    struct Row {
        const char *lam, *A, *B;
        CaseRequest req;
        int order;
        int base;
    };
    const Row rows[] = {
        {"1", "1", "1", CaseRequest::automatic, 24, 2},
        {"-4/5", "1", "1", CaseRequest::automatic, 24, 3},
        {"1/96", "1", "1", CaseRequest::case_ii, 20, 3},
    };
    for (const auto& row : rows) {
        CAPTURE(row.lam);
        auto e = make(row.lam, row.A, row.B, row.order, row.req);
        auto s = resum(e, row.order);
        Params<double> p{to_real<double>(e.regime.A),
                         to_real<double>(e.regime.B),
                         to_real<double>(e.regime.lambda)};
        auto cert = certify(s, p, row.order, default_z_grid<double>());
        CHECK(cert.pass);
        CHECK(cert.K > 0);
        CHECK(cert.radius > 0);
        CHECK(cert.N0 > 6 * s.n);
        // N0 is the least contraction order.
        const double me = cert.M_lambda * cert.E;
        CHECK(me * std::sqrt(double(cert.N0 + 1)) /
                  (double(cert.N0) / s.n - 6) <
              1);
        if (cert.N0 > 6 * s.n + 1)
            CHECK(me * std::sqrt(double(cert.N0)) /
                      (double(cert.N0 - 1) / s.n - 6) >=
                  1);
        if (row.base == 2)
            CHECK(cert.radius == doctest::Approx(1 / (2 * cert.K)));
        else
            CHECK(cert.radius ==
                  doctest::Approx(std::pow(3 * cert.K, -double(s.n))));
        CHECK(cert.radius <= empirical_radius(e));
        CHECK(cert.M_lambda >= 1.0);

        // Independent restatement of the certified shape: per-grade root
        // growth of the rigorous supremum stays below the budget base.
        const int c = row.base;
        for (int g = 1; g <= row.order; ++g) {
            const double sup = hhpsi::detail::block_norm_sup(s, g);
            if (sup > 0)
                CHECK(std::pow(sup * std::sqrt(double(g + 1)), 1.0 / g) <=
                      c * cert.K * (1 + 1e-12));
        }

        // Serialization carries the contract fields.
        const std::string json = cert.to_json();
        CHECK(json == cert.to_json());
        for (const char* key : {"\"K\"", "\"E\"", "\"M_lambda\"", "\"N0\"",
                                "\"radius\"", "\"case\"",
                                "\"checkedGammaMax\"", "\"gridSize\"",
                                "\"pass\": true"})
            CHECK(json.find(key) != std::string::npos);
    }
}

TEST_CASE("an undersized constant is rejected with a witness") {
    auto e = make("1", "1", "1", 12);
    auto s = resum(e, 12);
    Params<double> p{1, 1, 1};
    auto cert = certify(s, p, 12, default_z_grid<double>());
    CHECK_THROWS_WITH_AS(
        check_bound(s, cert.K / 64, 12, cert.z_grid),
        doctest::Contains("bound violated at grade"), verification_failure);
    // The fitted constant passes an independent re-check.
    CHECK_NOTHROW(check_bound(s, cert.K, 12, cert.z_grid));
}

TEST_CASE("certify validates its inputs") {
    auto e = make("1", "1", "1", 8);
    auto s = resum(e, 8);
    Params<double> p{1, 1, 1};
    CHECK_THROWS_AS((void)certify(s, p, 9, default_z_grid<double>()),
                    invalid_input);
    CHECK_THROWS_AS((void)certify(s, p, 0, default_z_grid<double>()),
                    invalid_input);
    Params<double> wrong{2, 1, 1};
    CHECK_THROWS_AS((void)certify(s, wrong, 8, default_z_grid<double>()),
                    invalid_input);
    std::vector<double> grid{-1.0, 0.5};
    CHECK_THROWS_AS((void)certify(s, p, 8, grid), invalid_input);
}

TEST_CASE("root-test radius recovers a synthetic geometric growth") {
    // Coefficients a_k00 = 2^k on the conjugate-pair regime (sigma = 1):
    // the radius estimate must come out at 1/2.
    auto e = make("1", "1", "1", 20);
    e.table.for_each([&](int k, int l, int m, C, C) {
        e.table.set(k, l, m, C{}, C{});
    });
    for (int k = 0; k <= 20; ++k)
        e.table.set(k, 0, 0, C(std::pow(2.0, k)), C{});
    CHECK(empirical_radius(e) == doctest::Approx(0.5).epsilon(1e-12));

    // A zero table has no growth at all.
    auto z = make("1", "1", "1", 8);
    z.table.for_each(
        [&](int k, int l, int m, C, C) { z.table.set(k, l, m, C{}, C{}); });
    CHECK(std::isinf(empirical_radius(z)));
}

#include <doctest.h>

#include <random>

#include "hhpsi/model.hpp"

using namespace hhpsi;

TEST_CASE("energy is a first integral of the vector field") {
    // dE/dt = grad(E) . f  must vanish identically; check at random states.
    Params<double> p{1.25, -0.75, 0.6};
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uni(-2, 2);
    for (int i = 0; i < 100; ++i) {
        State<double> s;
        s << uni(rng), uni(rng), uni(rng), uni(rng);
        auto f = vector_field(p, s);
        // grad E = (A x + 2 lam x y, u, B y + lam x^2 - y^2, v)
        double gx = p.A * s[0] + 2 * p.lambda * s[0] * s[2];
        double gu = s[1];
        double gy = p.B * s[2] + p.lambda * s[0] * s[0] - s[2] * s[2];
        double gv = s[3];
        double dE = gx * f[0] + gu * f[1] + gy * f[2] + gv * f[3];
        double scale = std::abs(gx * f[0]) + std::abs(gu * f[1]) +
                       std::abs(gy * f[2]) + std::abs(gv * f[3]);
        CHECK(std::abs(dE) <= 1e-14 * std::max(scale, 1.0));
    }
}

TEST_CASE("vector field matches the second-order equations") {
    Params<double> p{2.0, 3.0, -0.5};
    State<double> s;
    s << 0.7, -0.2, 1.1, 0.4;
    auto f = vector_field(p, s);
    CHECK(f[0] == -0.2);
    CHECK(f[1] == doctest::Approx(-p.A * 0.7 - 2 * p.lambda * 0.7 * 1.1));
    CHECK(f[2] == 0.4);
    CHECK(f[3] == doctest::Approx(-p.B * 1.1 - p.lambda * 0.49 + 1.21));
}

TEST_CASE("energy term scale bounds the energy") {
    Params<double> p{1, 1, 1};
    State<double> s;
    s << 10.0, -3.0, 7.0, 0.5;
    CHECK(std::abs(energy(p, s)) <= 6 * energy_term_scale(p, s));
}

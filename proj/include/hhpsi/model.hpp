#pragma once

#include <Eigen/Dense>

#include <complex>

namespace hhpsi {

/// Parameters of the cubic two-degree-of-freedom Hamiltonian system
///     H = (u^2 + v^2 + A x^2 + B y^2)/2 + lam x^2 y - y^3/3,
/// whose equations of motion are
///     x'' + A x + 2 lam x y = 0,
///     y'' + B y + lam x^2 - y^2 = 0.
template <class R>
struct Params {
    R A = 1;
    R B = 1;
    R lambda = 1;
};

/// Phase state (x, u, y, v) with u = x', v = y'.
template <class R>
using State = Eigen::Matrix<R, 4, 1>;

template <class R>
using CState = Eigen::Matrix<std::complex<R>, 4, 1>;

/// First-order vector field of the equations of motion.
template <class R, class S>
Eigen::Matrix<S, 4, 1> vector_field(const Params<R>& p, const Eigen::Matrix<S, 4, 1>& s) {
    const S& x = s[0];
    const S& u = s[1];
    const S& y = s[2];
    const S& v = s[3];
    Eigen::Matrix<S, 4, 1> ds;
    ds[0] = u;
    ds[1] = -p.A * x - R(2) * p.lambda * x * y;
    ds[2] = v;
    ds[3] = -p.B * y - p.lambda * x * x + y * y;
    return ds;
}

/// Conserved energy.  Exactly constant along the flow:
/// dE/dt = u(x'' + Ax + 2 lam xy) + v(y'' + By + lam x^2 - y^2) = 0.
template <class R, class S>
S energy(const Params<R>& p, const Eigen::Matrix<S, 4, 1>& s) {
    const S& x = s[0];
    const S& u = s[1];
    const S& y = s[2];
    const S& v = s[3];
    return (u * u + v * v + p.A * x * x + p.B * y * y) / R(2) +
           p.lambda * x * x * y - y * y * y / R(3);
}

/// Largest magnitude among the individual terms entering the energy; the
/// scale at which cancellation happens near a singularity, useful for
/// interpreting conservation errors there.
template <class R>
R energy_term_scale(const Params<R>& p, const Eigen::Matrix<R, 4, 1>& s) {
    using std::abs;
    R m = abs(s[1] * s[1]) / R(2);
    m = std::max(m, abs(s[3] * s[3]) / R(2));
    m = std::max(m, abs(p.A * s[0] * s[0]) / R(2));
    m = std::max(m, abs(p.B * s[2] * s[2]) / R(2));
    m = std::max(m, abs(p.lambda * s[0] * s[0] * s[2]));
    m = std::max(m, abs(s[2] * s[2] * s[2]) / R(3));
    return m;
}

} // namespace hhpsi

#!/usr/bin/env python3
"""Independent oracle for the tau-axis coefficients of the pole-type series.

Substitutes a truncated series ansatz directly into the equations of motion

    x'' + A x + 2 lam x y = 0
    y'' + B y + lam x^2 - y^2 = 0

and solves order by order with sympy, with no reference to the production
recursion code.  The printed values are frozen into tests/test_series.cpp.

Branch conventions match the library defaults:
  * leading balance "case i":  x ~ a0 tau^-2, y ~ b0 tau^-2 with
    a0 = sign*(3/lam)*sqrt(2 + 1/lam), b0 = -3/lam
  * leading balance "case ii": y ~ 6 tau^-2, x ~ a0 tau^alpha with
    alpha = (1 - s)/2, s = sqrt(1 - 48 lam), a0 = 1

Only axis indices k <= 5 are produced so that the resonance at k = 6 (case i)
and the free constants never enter; everything printed is forced.
"""

import sympy as sp


def axis_case_i(lam, A, B, sign=+1, kmax=5):
    tau = sp.symbols("tau", positive=True)
    a0 = sign * sp.Rational(3, 1) / lam * sp.sqrt(2 + 1 / lam)
    b0 = -sp.Rational(3, 1) / lam
    ak = [a0] + [sp.Symbol(f"a{k}") for k in range(1, kmax + 1)]
    bk = [b0] + [sp.Symbol(f"b{k}") for k in range(1, kmax + 1)]
    x = sum(ak[k] * tau ** (k - 2) for k in range(kmax + 1))
    y = sum(bk[k] * tau ** (k - 2) for k in range(kmax + 1))
    ex = sp.expand(sp.diff(x, tau, 2) + A * x + 2 * lam * x * y)
    ey = sp.expand(sp.diff(y, tau, 2) + B * y + lam * x ** 2 - y ** 2)
    sol = {}
    for k in range(1, kmax + 1):
        eqs = [sp.expand(ex.coeff(tau, k - 4).subs(sol)),
               sp.expand(ey.coeff(tau, k - 4).subs(sol))]
        s = sp.solve(eqs, [ak[k], bk[k]], dict=True)
        assert len(s) == 1, (k, s)
        sol.update(s[0])
    return {str(sym): sp.nsimplify(val) for sym, val in sol.items()}


def axis_case_ii(lam, A, B, kmax=5):
    # On the axis (no resonance directions) the two exponent ladders
    # decouple: x^2 only feeds exponents 2*alpha + k (a different ladder),
    # so the integer ladder for y closes under y'' + B y - y^2 = 0 alone,
    # and the alpha ladder for x then follows from x'' + A x + 2 lam x y = 0.
    tau = sp.symbols("tau", positive=True)
    s = sp.sqrt(1 - 48 * lam)
    alpha = sp.nsimplify((1 - s) / 2)
    b0 = sp.Integer(6)
    bk = [b0] + [sp.Symbol(f"b{k}") for k in range(1, kmax + 1)]
    y = sum(bk[k] * tau ** (k - 2) for k in range(kmax + 1))
    ey = sp.expand(sp.diff(y, tau, 2) + B * y - y ** 2)
    sol = {}
    for k in range(1, kmax + 1):
        eq = sp.expand(ey.coeff(tau, k - 4).subs(sol))
        got = sp.solve([eq], [bk[k]], dict=True)
        assert len(got) == 1, (k, got)
        sol.update(got[0])
    a0 = sp.Integer(1)
    ak = [a0] + [sp.Symbol(f"a{k}") for k in range(1, kmax + 1)]
    xe = sum(ak[k] * tau ** k for k in range(kmax + 1))  # x = tau^alpha * xe
    # tau^-alpha * (x'' + A x + 2 lam x y), collected on integer powers
    ex = sp.expand(sp.diff(xe, tau, 2) + 2 * alpha / tau * sp.diff(xe, tau)
                   + alpha * (alpha - 1) / tau ** 2 * xe + A * xe
                   + 2 * lam * xe * y.subs(sol))
    for k in range(1, kmax + 1):
        eq = sp.expand(sp.nsimplify(ex.coeff(tau, k - 2)).subs(sol))
        got = sp.solve([eq], [ak[k]], dict=True)
        assert len(got) == 1, (k, got)
        sol.update(got[0])
    return {str(sym): sp.simplify(val) for sym, val in sol.items()}


def fmt(tag, vals):
    print(f"// {tag}")
    for name in sorted(vals):
        v = sp.N(vals[name], 20)
        print(f"//   {name} = {v}")


if __name__ == "__main__":
    fmt("case i, lam=1, A=1, B=1, sign=+",
        axis_case_i(sp.Integer(1), sp.Integer(1), sp.Integer(1)))
    fmt("case i, lam=-4/5, A=1, B=2, sign=+",
        axis_case_i(sp.Rational(-4, 5), sp.Integer(1), sp.Integer(2)))
    fmt("case i, lam=-2, A=1, B=1, sign=+",
        axis_case_i(sp.Integer(-2), sp.Integer(1), sp.Integer(1)))
    fmt("case ii, lam=1/96, A=1, B=1",
        axis_case_ii(sp.Rational(1, 96), sp.Integer(1), sp.Integer(1)))
    fmt("case ii, lam=-1/4, A=1, B=1",
        axis_case_ii(sp.Rational(-1, 4), sp.Integer(1), sp.Integer(1)))

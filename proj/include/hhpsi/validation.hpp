#pragma once

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hhpsi/bounds.hpp"
#include "hhpsi/series_forms.hpp"

namespace hhpsi {

enum class IntegrationStatus { ok, finite_time_singularity };

/// Sampled numerical trajectory.  `t`/`states` hold the requested sample
/// times that were actually reached; `t_end` is how far the integration
/// got (== the last requested time when status is ok).
template <class R>
struct Trajectory {
    std::vector<R> t;
    std::vector<State<R>> states;
    R t_end = 0;
    long steps = 0;
    IntegrationStatus status = IntegrationStatus::ok;
};

/// Integrate the equations of motion with an adaptive Dormand-Prince 5(4)
/// pair and dense output, sampling at `sample_ts` (default: the two span
/// endpoints).  `tol` controls the per-step local error relative to the
/// larger of the initial-state scale and the running state, so small-
/// amplitude trajectories keep small-amplitude accuracy.
///
/// Solutions of this system blow up in finite time at movable
/// singularities; when the step size collapses (or the state leaves the
/// finite range) the integration stops early with status
/// finite_time_singularity and the samples already reached.
template <class R>
Trajectory<R> integrate_ode(const State<R>& s0, const Params<R>& p, R t0,
                            R t1, R tol, std::vector<R> sample_ts = {}) {
    using Arr = std::array<R, 4>;
    namespace ode = boost::numeric::odeint;

    for (int i = 0; i < 4; ++i)
        if (!std::isfinite(s0[i]))
            throw invalid_input("integrate_ode: initial state must be finite");
    if (!(tol > 0)) throw invalid_input("integrate_ode: tol > 0 required");
    if (!(t1 >= t0)) throw invalid_input("integrate_ode: t1 >= t0 required");
    if (sample_ts.empty()) sample_ts = {t0, t1};
    for (std::size_t i = 0; i < sample_ts.size(); ++i)
        if (sample_ts[i] < t0 || sample_ts[i] > t1 ||
            (i > 0 && sample_ts[i] < sample_ts[i - 1]))
            throw invalid_input(
                "integrate_ode: sample times must ascend within [t0, t1]");

    Trajectory<R> out;
    out.t = std::move(sample_ts);
    out.t_end = t0;

    if (t1 == t0) {
        out.states.assign(out.t.size(), s0);
        return out;
    }

    auto sys = [&p](const Arr& x, Arr& dxdt, R) {
        State<R> xs;
        for (int i = 0; i < 4; ++i) xs[i] = x[i];
        const State<R> d = vector_field(p, xs);
        for (int i = 0; i < 4; ++i) dxdt[i] = d[i];
    };

    R scale = s0.template lpNorm<Eigen::Infinity>();
    if (!(scale > 0)) scale = 1;
    // Spell out the value type: odeint defaults it to double even when the
    // state scalar is wider.
    auto stepper = ode::make_dense_output(tol * scale, tol,
                                          ode::runge_kutta_dopri5<Arr, R>());
    stepper.initialize(Arr{s0[0], s0[1], s0[2], s0[3]}, t0, (t1 - t0) / 100);

    std::size_t si = 0;
    while (si < out.t.size() && out.t[si] <= t0) {
        out.states.push_back(s0);
        ++si;
    }

    while (stepper.current_time() < t1) {
        try {
            stepper.do_step(sys);
        } catch (const ode::odeint_error&) {
            out.status = IntegrationStatus::finite_time_singularity;
            break;
        }
        ++out.steps;
        out.t_end = std::min(stepper.current_time(), t1);

        bool finite = true;
        for (R c : stepper.current_state())
            if (!std::isfinite(c)) finite = false;
        if (!finite) {
            out.status = IntegrationStatus::finite_time_singularity;
            break;
        }
        while (si < out.t.size() && out.t[si] <= out.t_end) {
            Arr xi;
            stepper.calc_state(out.t[si], xi);
            State<R> s;
            for (int i = 0; i < 4; ++i) s[i] = xi[i];
            out.states.push_back(s);
            ++si;
        }
        // A step size at rounding scale means the solution is running into
        // its movable singularity; no further progress is possible.
        const R dt_floor = std::numeric_limits<R>::epsilon() * 16 *
                           std::max(R(1), std::abs(stepper.current_time()));
        if (stepper.current_time() < t1 &&
            stepper.current_time_step() < dt_floor) {
            out.status = IntegrationStatus::finite_time_singularity;
            break;
        }
        if (out.steps > 10000000L)
            throw error("integrate_ode: step limit exceeded");
    }
    out.t.resize(si);
    return out;
}

/// Evaluate a truncated series solution at tau > 0: direct summation of
/// the triple-index table, derivatives taken term by term.
template <class R>
CState<R> evaluate_series(const Expansion<R>& e, R tau) {
    return evaluate_triple(e, tau);
}

/// Same contract for the regrouped representation of the series.
template <class R>
CState<R> evaluate_series(const ResummedSeries<R>& s, R tau) {
    return s.evaluate(tau);
}

/// Cast a complex phase state to real, requiring the imaginary parts to be
/// rounding noise (below `rel` of the state scale).  Conjugate-symmetric
/// arbitrary constants produce real series; anything else cannot seed a
/// real trajectory.
template <class R>
State<R> real_state(const CState<R>& cs, R rel = R(1e-10L)) {
    R scale = 0;
    for (int i = 0; i < 4; ++i) scale = std::max(scale, std::abs(cs[i]));
    if (!(scale > 0)) scale = 1;
    for (int i = 0; i < 4; ++i)
        if (std::abs(std::imag(cs[i])) > rel * scale) {
            std::ostringstream os;
            os << "state is not conjugate-symmetric: |Im| = "
               << fmt_real(double(std::abs(std::imag(cs[i]))))
               << " at component " << i << " exceeds "
               << fmt_real(double(rel)) << " of scale "
               << fmt_real(double(scale));
            throw verification_failure(os.str());
        }
    State<R> s;
    for (int i = 0; i < 4; ++i) s[i] = std::real(cs[i]);
    return s;
}

/// Copy of an expansion truncated to a lower total order.
template <class R>
Expansion<R> truncated(const Expansion<R>& e, int order) {
    if (order < 0 || order > e.table.order())
        throw invalid_input("truncated: order outside the table range");
    Expansion<R> out{e.regime, e.options, CoefficientTable<R>(order), {}};
    e.table.for_each([&](int k, int l, int m, std::complex<R> a,
                         std::complex<R> b) {
        if (k + l + m <= order) out.table.set(k, l, m, a, b);
    });
    for (const Insertion& ins : e.insertions)
        if (ins.k + ins.l + ins.m <= order) out.insertions.push_back(ins);
    return out;
}

/// Worst energy variation along a sampled curve, relative to the largest
/// of 1, |E_0| and the magnitudes of the individual terms entering the
/// energy.  Near the singularity the energy is an O(1) difference of huge
/// terms, so the term scale is the resolution at which conservation can
/// be meaningfully checked at all.
template <class R>
R relative_energy_drift(const Params<R>& p,
                        const std::vector<State<R>>& states) {
    if (states.empty()) return 0;
    const R e0 = energy(p, states.front());
    R denom = std::max(R(1), std::abs(e0));
    R drift = 0;
    for (const State<R>& s : states) {
        drift = std::max(drift, std::abs(energy(p, s) - e0));
        denom = std::max(denom, energy_term_scale(p, s));
    }
    return drift / denom;
}

/// Outcome of seeding the integrator from the series at tau0, integrating
/// to tau1, and comparing against the series there, across truncation
/// orders.  Deviations must shrink as the order grows (that is the
/// convergence claim being exercised); the sampled curves let the two
/// solutions be compared pointwise.
template <class R>
struct ValidationReport {
    std::string table_id;
    std::string case_label;
    std::vector<int> orders;
    std::vector<R> deviations; // per order: |series - integrator| at tau1,
                               // relative to the state scale
    R tau0 = 0, tau1 = 0, tol = 0;
    std::vector<R> tau_samples; // highest-order curves
    std::vector<State<R>> series_states;
    std::vector<State<R>> integrator_states;
    R series_energy_drift = 0;
    R integrator_energy_drift = 0;
    R radius_estimate = 0; // root-test estimate from the table, 0 = n/a
    R radius_used = 0;     // caller-supplied (certified) radius, 0 = none
    std::string status = "ok";
    bool pass = false;

    std::string to_json() const {
        std::ostringstream os;
        os << "{\n";
        os << "  \"table\": \"" << table_id << "\",\n";
        os << "  \"case\": \"" << case_label << "\",\n";
        os << "  \"tau0\": " << fmt_real(double(tau0)) << ",\n";
        os << "  \"tau1\": " << fmt_real(double(tau1)) << ",\n";
        os << "  \"tolerance\": " << fmt_real(double(tol)) << ",\n";
        os << "  \"orders\": [";
        for (std::size_t i = 0; i < orders.size(); ++i)
            os << (i ? ", " : "") << orders[i];
        os << "],\n";
        os << "  \"deviations\": [";
        for (std::size_t i = 0; i < deviations.size(); ++i)
            os << (i ? ", " : "") << fmt_real(double(deviations[i]));
        os << "],\n";
        os << "  \"seriesEnergyDrift\": " << fmt_real(double(series_energy_drift))
           << ",\n";
        os << "  \"integratorEnergyDrift\": "
           << fmt_real(double(integrator_energy_drift)) << ",\n";
        os << "  \"empiricalRadius\": " << fmt_real(double(radius_estimate))
           << ",\n";
        os << "  \"radiusUsed\": " << fmt_real(double(radius_used)) << ",\n";
        os << "  \"status\": \"" << status << "\",\n";
        os << "  \"pass\": " << (pass ? "true" : "false") << ",\n";
        os << "  \"samples\": [";
        for (std::size_t i = 0; i < tau_samples.size(); ++i) {
            os << (i ? ",\n    " : "\n    ");
            os << "{\"tau\": " << fmt_real(double(tau_samples[i]))
               << ", \"series\": [";
            for (int c = 0; c < 4; ++c)
                os << (c ? ", " : "") << fmt_real(double(series_states[i][c]));
            os << "], \"integrator\": [";
            for (int c = 0; c < 4; ++c)
                os << (c ? ", " : "")
                   << fmt_real(double(integrator_states[i][c]));
            os << "]}";
        }
        os << (tau_samples.empty() ? "]\n" : "\n  ]\n");
        os << "}\n";
        return os.str();
    }
};

/// Series-seeded cross-validation.  For each truncation order: evaluate
/// the series at tau0, integrate the equations of motion to tau1, compare
/// with the series at tau1.  The series always seeds the integrator and
/// never the reverse - the map from arbitrary Cauchy data back to the
/// series constants is unknown.  `radius` (when positive, typically a
/// certified bound) only drives the out-of-range warning; with none
/// supplied the root-test estimate is used for that.
template <class R>
ValidationReport<R> cross_validate(const Expansion<R>& e, R tau0, R tau1,
                                   std::vector<int> orders, R tol = R(1e-12L),
                                   R radius = 0) {
    if (!(tau0 > 0) || !(tau1 >= tau0))
        throw invalid_input("cross_validate: need 0 < tau0 <= tau1");
    if (orders.empty())
        throw invalid_input("cross_validate: at least one truncation order");
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    if (orders.front() < 0 || orders.back() > e.table.order())
        throw invalid_input("cross_validate: order outside the table range");
    if (!(tol > 0)) throw invalid_input("cross_validate: tol > 0 required");

    const Params<R> p{to_real<R>(e.regime.A), to_real<R>(e.regime.B),
                      to_real<R>(e.regime.lambda)};

    ValidationReport<R> rep;
    rep.case_label = e.regime.label;
    {
        std::ostringstream id;
        id << "lambda=" << fmt_real(double(p.lambda))
           << " A=" << fmt_real(double(p.A)) << " B=" << fmt_real(double(p.B))
           << " order=" << e.table.order() << " case=" << e.regime.label;
        rep.table_id = id.str();
    }
    rep.orders = orders;
    rep.tau0 = tau0;
    rep.tau1 = tau1;
    rep.tol = tol;
    rep.radius_used = radius;
    try {
        rep.radius_estimate = empirical_radius(e);
    } catch (const invalid_input&) {
        rep.radius_estimate = 0; // table too short for the root test
    }

    const R warn_radius = radius > 0 ? radius : rep.radius_estimate;
    if (warn_radius > 0 && tau1 > warn_radius) {
        std::ostringstream os;
        os << "warning: tau1 " << fmt_real(double(tau1))
           << " exceeds the convergence radius " << fmt_real(double(warn_radius));
        rep.status = os.str();
    }

    bool singular = false;
    for (int N : orders) {
        const Expansion<R> eN = truncated(e, N);
        const State<R> s0 = real_state(evaluate_series(eN, tau0));
        const State<R> s1 = real_state(evaluate_series(eN, tau1));
        R dev = 0;
        if (tau1 > tau0) {
            const Trajectory<R> traj = integrate_ode(s0, p, tau0, tau1, tol);
            if (traj.status != IntegrationStatus::ok) {
                rep.status = "finite-time singularity during integration";
                rep.deviations.push_back(
                    std::numeric_limits<R>::infinity());
                singular = true;
                break;
            }
            const State<R> end = traj.states.back();
            const R scale =
                std::max(s1.template lpNorm<Eigen::Infinity>(), R(1e-30L));
            dev = (s1 - end).template lpNorm<Eigen::Infinity>() / scale;
        }
        rep.deviations.push_back(dev);
    }

    // Deviations must shrink with the order, up to the integrator noise
    // floor: once both runs sit on the integrator's own error there is
    // nothing left for more series terms to improve.
    bool decreasing = !singular;
    const R floor = 1000 * tol;
    for (std::size_t i = 1; i < rep.deviations.size(); ++i)
        if (rep.deviations[i] > rep.deviations[i - 1] &&
            rep.deviations[i] > floor) {
            decreasing = false;
            std::ostringstream os;
            os << "convergence failure: deviation grew from "
               << fmt_real(double(rep.deviations[i - 1])) << " (order "
               << orders[i - 1] << ") to " << fmt_real(double(rep.deviations[i]))
               << " (order " << orders[i] << ")";
            rep.status = os.str();
        }
    rep.pass = decreasing;

    // Sampled curves for the highest order that integrated cleanly.
    if (!singular) {
        const int samples = tau1 > tau0 ? 17 : 1;
        for (int i = 0; i < samples; ++i)
            rep.tau_samples.push_back(
                tau0 + (tau1 - tau0) * R(i) / R(std::max(samples - 1, 1)));
        const Expansion<R> eN = truncated(e, orders.back());
        for (R t : rep.tau_samples)
            rep.series_states.push_back(real_state(evaluate_series(eN, t)));
        if (tau1 > tau0) {
            const Trajectory<R> traj = integrate_ode(
                rep.series_states.front(), p, tau0, tau1, tol, rep.tau_samples);
            if (traj.status != IntegrationStatus::ok ||
                traj.states.size() != rep.tau_samples.size()) {
                rep.status = "finite-time singularity during integration";
                rep.pass = false;
                rep.tau_samples.resize(traj.states.size());
                rep.series_states.resize(traj.states.size());
            }
            rep.integrator_states = traj.states;
        } else {
            rep.integrator_states = rep.series_states;
        }
        rep.series_energy_drift = relative_energy_drift(p, rep.series_states);
        rep.integrator_energy_drift =
            relative_energy_drift(p, rep.integrator_states);
    }
    return rep;
}

/// Sample-curve CSV: t, x, u, y, v, E per row, fixed column order.
template <class R>
void write_curve_csv(std::ostream& os, const Params<R>& p,
                     const std::vector<R>& ts,
                     const std::vector<State<R>>& states) {
    if (ts.size() != states.size())
        throw invalid_input("write_curve_csv: size mismatch");
    os << "t,x,u,y,v,E\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        os << fmt_real(double(ts[i]));
        for (int c = 0; c < 4; ++c) os << ',' << fmt_real(double(states[i][c]));
        os << ',' << fmt_real(double(energy(p, states[i]))) << '\n';
    }
}

} // namespace hhpsi

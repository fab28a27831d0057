// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <vector>

#include "wavefront/errors.hpp"

namespace wavefront::ode {

namespace odeint = boost::numeric::odeint;

template <size_t N>
using State = std::array<double, N>;

inline void check_finite(const double* s, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (!std::isfinite(s[i])) fail(ErrorCode::IntegratorDivergence, "non-finite state in ODE integration");
}

// Adaptive Fehlberg 7(8) integration of y' = f(t, y) from t0 to t1.
template <size_t N, class F>
void integrate(F&& f, State<N>& y, double t0, double t1, double abs_tol = 1e-12, double rel_tol = 1e-12) {
    if (t0 == t1) return;
    using stepper_t = odeint::runge_kutta_fehlberg78<State<N>>;
    auto stepper = odeint::make_controlled<stepper_t>(abs_tol, rel_tol);
    auto sys = [&](const State<N>& s, State<N>& ds, double t) { f(t, s, ds); };
    double dt0 = (t1 > t0 ? 1 : -1) * std::min(1e-3, std::abs(t1 - t0));
    try {
        odeint::integrate_adaptive(stepper, sys, y, t0, t1, dt0);
    } catch (const std::overflow_error& e) {
        fail(ErrorCode::IntegratorDivergence, std::string("step size control failed: ") + e.what());
    }
    check_finite(y.data(), N);
}

// As integrate(), with an observer called after every accepted step.
template <size_t N, class F, class Obs>
void integrate_observed(F&& f, State<N>& y, double t0, double t1, double abs_tol, double rel_tol, Obs&& obs) {
    using stepper_t = odeint::runge_kutta_fehlberg78<State<N>>;
    auto stepper = odeint::make_controlled<stepper_t>(abs_tol, rel_tol);
    auto sys = [&](const State<N>& s, State<N>& ds, double t) { f(t, s, ds); };
    double dt0 = (t1 > t0 ? 1 : -1) * std::min(1e-3, std::abs(t1 - t0));
    try {
        odeint::integrate_adaptive(stepper, sys, y, t0, t1, dt0, [&](const State<N>& s, double t) { obs(s, t); });
    } catch (const std::overflow_error& e) {
        fail(ErrorCode::IntegratorDivergence, std::string("step size control failed: ") + e.what());
    }
    check_finite(y.data(), N);
}

}  // namespace wavefront::ode

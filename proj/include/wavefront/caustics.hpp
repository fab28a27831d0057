// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "wavefront/phase.hpp"

namespace wavefront {

struct MaslovAccumulator {
    std::vector<double> t;
    std::vector<double> branch_arg;  // unwrapped arg det^2 phi_xeta on the flow
    double winding = 0;              // -(total change)/(2 pi), before rounding
    int index = 0;
};

struct LoopCheck {
    double position_tol = 1e-8;  // chart distance between x*(T) and y
    double focus_tol = 1e-6;     // |x*_eta(T)| * h(y, eta)
};

// Maslov index of the loop (y, eta, T). Throws NotALoop unless x*(T) = y and x*_eta(T) = 0.
MaslovAccumulator maslov_index(const MetricModel& m, const Vec2& y, const Vec2& eta, double T, double eps, int n_steps = 400,
                               const LoopCheck& check = {});

struct PQForms {
    Mat2 q_mat;  // q^{a mu} = d x*^a / d eta_mu
    Mat2 p_mat;  // p^{a mu} = g^{a c}(x*) [d xi*_c/d eta_mu - Gamma^r_{c b} xi*_r d x*^b/d eta_mu]
    Mat2 Q;      // position form, indices lowered with g(y)
    Mat2 P;      // momentum form, indices lowered with g(y)
};
PQForms pq_forms(const MetricModel& m, const FlowState& s, const Vec2& y, const Vec2& eta);

}  // namespace wavefront

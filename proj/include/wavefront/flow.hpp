// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "wavefront/geometry.hpp"

namespace wavefront {

struct FlowState {
    double t = 0;
    Vec2 x_star = Vec2::Zero();
    Vec2 xi_star = Vec2::Zero();
    Mat2 dx_deta = Mat2::Zero();   // (d x*^a / d eta_b)
    Mat2 dxi_deta = Mat2::Zero();  // (d xi*_a / d eta_b)
    int chart = 0;                 // chart of x* (the sphere has two)
};

double hamiltonian(const MetricModel& m, const Vec2& x, const Vec2& xi);

struct HamiltonianDerivatives {
    double h;
    Vec2 h_x, h_xi;
    Mat2 h_xx, h_xxi, h_xixi;  // h_xxi(a, b) = d^2 h / dx^a dxi_b
};
HamiltonianDerivatives hamiltonian_derivatives(const MetricModel& m, const Vec2& x, const Vec2& xi);

struct FlowOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
};

// Numerical integration of Hamilton's equations jointly with the variational system.
std::vector<FlowState> integrate_flow(const MetricModel& m, const Vec2& y, const Vec2& eta, const std::vector<double>& t_grid,
                                      const FlowOptions& opt = {});
FlowState flow_at(const MetricModel& m, const Vec2& y, const Vec2& eta, double t, const FlowOptions& opt = {});

// Closed-form flow for the built-in models (sphere, hyperbolic plane, flat torus).
FlowState flow_closed_form(const MetricModel& m, const Vec2& y, const Vec2& eta, double t);

bool has_closed_form(const MetricModel& m);
// closed form for the built-ins, numerical integration otherwise
FlowState flow_sample(const MetricModel& m, const Vec2& y, const Vec2& eta, double t);
std::vector<FlowState> flow_samples(const MetricModel& m, const Vec2& y, const Vec2& eta, const std::vector<double>& grid);

// Express a flow state in the other chart (sphere only).
FlowState to_other_chart(const MetricModel& m, const FlowState& s);
// Chart 0 representation if possible.
FlowState to_primary_chart(const MetricModel& m, const FlowState& s);

struct LoopHit {
    double T;
    bool is_conjugate;
};
std::vector<LoopHit> loop_detect(const MetricModel& m, const Vec2& y, const Vec2& eta, double T_max, double tol = 1e-8);
// zeros of det dx*/deta on (0, T_max]
std::vector<double> conjugate_times(const MetricModel& m, const Vec2& y, const Vec2& eta, double T_max);

}  // namespace wavefront

// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "wavefront/caustics.hpp"

#include <cmath>

namespace wavefront {

MaslovAccumulator maslov_index(const MetricModel& m, const Vec2& y, const Vec2& eta, double T, double eps, int n_steps, const LoopCheck& check) {
    if (!(eps > 0)) fail(ErrorCode::BranchDegenerate, "the Maslov index needs epsilon > 0");
    if (n_steps < 4) fail(ErrorCode::InvalidArgument, "too few steps");
    FlowState end = flow_sample(m, y, eta, T);
    try {
        end = to_primary_chart(m, end);
    } catch (const Error&) {
        fail(ErrorCode::NotALoop, "the trajectory ends at the excluded pole, away from y");
    }
    const double h = hamiltonian(m, y, eta);
    double gap = m.min_image(end.x_star - y).norm();
    double focus = end.dx_deta.norm() * h;
    if (!(gap < check.position_tol) || !(focus < check.focus_tol))
        fail(ErrorCode::NotALoop, "(y, eta, T) is not a loop with x*_eta(T) = 0");
    std::vector<double> grid(n_steps);
    for (int k = 0; k < n_steps; ++k) grid[k] = T * (k + 1) / n_steps;
    auto w = weight_along(m, y, eta, eps, grid);
    MaslovAccumulator acc;
    acc.t.push_back(0);
    acc.branch_arg.push_back(0);
    for (const auto& e : w) {
        acc.t.push_back(e.t);
        acc.branch_arg.push_back(e.branch_arg);
    }
    acc.winding = -acc.branch_arg.back() / (2 * M_PI);
    acc.index = static_cast<int>(std::lround(acc.winding));
    if (std::abs(acc.winding - acc.index) > 1e-6) fail(ErrorCode::Internal, "non-integer winding on a loop");
    return acc;
}

PQForms pq_forms(const MetricModel& m, const FlowState& s, const Vec2& y, const Vec2& eta) {
    (void)eta;
    Christoffel G = christoffel_at(m, s.x_star);
    MetricValue gx = metric_at(m, s.x_star), gy = metric_at(m, y);
    Mat2 bracket;
    for (int c = 0; c < 2; ++c)
        for (int mu = 0; mu < 2; ++mu) {
            double conn = 0;
            for (int r = 0; r < 2; ++r)
                for (int b = 0; b < 2; ++b) conn += G[r](c, b) * s.xi_star[r] * s.dx_deta(b, mu);
            bracket(c, mu) = s.dxi_deta(c, mu) - conn;
        }
    PQForms f;
    f.q_mat = s.dx_deta;
    f.p_mat = gx.g_inv * bracket;
    Mat2 Qup = f.q_mat.transpose() * gx.g * f.q_mat;
    Mat2 Pup = f.p_mat.transpose() * gx.g * f.p_mat;
    f.Q = gy.g * Qup * gy.g;
    f.P = gy.g * Pup * gy.g;
    return f;
}

}  // namespace wavefront

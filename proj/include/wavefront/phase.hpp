// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "wavefront/flow.hpp"
#include "wavefront/jets.hpp"

namespace wavefront {

struct PhaseEval {
    cplx value = 0;
    cplx d_t = 0;
    CVec2 d_x = CVec2::Zero();
    CVec2 d_eta = CVec2::Zero();
    CMat2 d_x_d_eta = CMat2::Zero();  // (d^2 phi / dx^a deta_b)
    double epsilon = 0;
    int chart = 0;                 // chart of x
    bool has_derivatives = true;   // false for conformal models away from the flow
};

// Levi-Civita phase at (t, x; y, eta). x is given in chart `chart` (-1: chart of x*).
// Built-in models use closed forms through jets; conformal models evaluate the value by
// shooting, and derivatives only on the flow itself.
PhaseEval phase_eval(const MetricModel& m, double t, const Vec2& x, const Vec2& y, const Vec2& eta, double eps, int chart = -1);

// d^2 phi/dx deta at x = x*, from the flow and the connection alone.
CMat2 phi_x_eta_on_flow(const MetricModel& m, const FlowState& s, const Vec2& y, const Vec2& eta, double eps);

// (rho(y)/rho(x*)) det phi_xeta on the flow, oriented consistently across charts.
cplx phase_scalar_part(const MetricModel& m, const FlowState& s, const Vec2& y, const Vec2& eta, double eps);

struct WeightEval {
    double t = 0;
    cplx value = 0;         // w at x = x*
    double branch_arg = 0;  // continuous argument of det^2 phi_xeta
    cplx det2 = 0;          // det^2 phi_xeta in the chart of x*
};

// Branch-tracked weight along a trajectory. The argument is followed from t = 0 through
// every listed state. Throws BranchDegenerate where det phi_xeta vanishes.
std::vector<WeightEval> weight_eval(const MetricModel& m, const std::vector<FlowState>& trajectory, const Vec2& y, const Vec2& eta,
                                    double eps);
std::vector<WeightEval> weight_along(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, const std::vector<double>& t_grid);

// Smooth transition from 0 (s <= 0) to 1 (s >= 1).
double smooth_step(double s);

struct CutoffOptions {
    double inner = 0.5;  // spatial factor is 1 below inner * r_inj
    double outer = 0.8;  // and 0 above outer * r_inj
};
double cutoff_chi(const MetricModel& m, double t, const Vec2& x, const Vec2& y, const Vec2& eta, const CutoffOptions& opt = {}, int chart = 0);

// Jets of the phase and of ln w about an on-flow point (t, x*(t), eta), restricted to
// fixed t. Variables are (x^1, x^2, eta_1, eta_2); t-derivatives up to second order
// are kept as separate jets.
struct PhaseJetOptions {
    int order = 6;    // total order in (x, eta); enough for S_{-2}
    int eta_cap = 3;  // maximal degree in eta
};

class PhaseJets {
public:
    PhaseJets(const MetricModel& m, double t, const Vec2& y, const Vec2& eta, double eps, const PhaseJetOptions& opt = {});

    const jets::Layout& layout() const { return *L_; }
    const jets::CJet& phi(int k = 0) const { return phi_[k]; }     // d^k phi / dt^k
    const jets::CJet& log_w(int k = 0) const { return lw_[k]; }  // d^k ln w / dt^k
    const jets::CJet& g_inv(int a, int b) const { return ginv_[a + b]; }
    const jets::CJet& rho() const { return rho_; }

    // L_a = (phi_xeta)^{-1}(a, b) d/dx^b
    const jets::CJet& phi_x_eta_inv(int a, int b) const { return Ainv_[2 * a + b]; }
    jets::CJet L(int a, const jets::CJet& f) const;
    jets::CJet dx(const jets::CJet& f, int a) const { return f.d(a); }
    jets::CJet deta(const jets::CJet& f, int a) const { return f.d(2 + a); }
    jets::CJet laplacian(const jets::CJet& f) const;
    jets::CJet grad_dot(const jets::CJet& f, const jets::CJet& g) const;  // g^{ab} f_a g_b

    const FlowState& flow() const { return fs_; }
    double h() const { return h_; }
    double epsilon() const { return eps_; }
    const MetricModel& model() const { return *m_; }

private:
    const MetricModel* m_;
    const jets::Layout* L_;
    FlowState fs_;
    double h_, eps_;
    jets::CJet phi_[3], lw_[3], ginv_[3], rho_, rho_inv_, Ainv_[4];
};

}  // namespace wavefront

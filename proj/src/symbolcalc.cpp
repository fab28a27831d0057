// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "wavefront/symbolcalc.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>

namespace wavefront {

using jets::CJet;

namespace {
const cplx I(0, 1);

double factorial(int n) {
    double r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

// L_1^a L_2^b f for all a + b <= depth (the L's commute)
class LWords {
public:
    LWords(const PhaseJets& P, const CJet& f, int depth) : depth_(depth), words_((depth + 1) * (depth + 1)) {
        at(0, 0) = f;
        for (int n = 1; n <= depth; ++n)
            for (int a = 0; a <= n; ++a) {
                int b = n - a;
                at(a, b) = a > 0 ? P.L(0, at(a - 1, b)) : P.L(1, at(a, b - 1));
            }
    }
    const CJet& operator()(int a, int b) const { return words_[a * (depth_ + 1) + b]; }

private:
    CJet& at(int a, int b) { return words_[a * (depth_ + 1) + b]; }
    int depth_;
    std::vector<CJet> words_;
};

}  // namespace

BComponents b_components(const PhaseJets& P) {
    const CJet& phi = P.phi(0);
    const CJet& phit = P.phi(1);
    const CJet& lw = P.log_w(0);
    const CJet& lwt = P.log_w(1);
    BComponents B;
    B.b2 = P.grad_dot(phi, phi) - phit * phit;
    B.b1 = (P.phi(2) - P.laplacian(phi) + lwt * phit * 2.0 - P.grad_dot(lw, phi) * 2.0) * I;
    B.b0 = P.log_w(2) + lwt * lwt - P.laplacian(lw) - P.grad_dot(lw, lw);
    return B;
}

CJet L_apply(const PhaseJets& P, const CJet& f, int a1, int a2) {
    CJet r = f;
    for (int k = 0; k < a1; ++k) r = P.L(0, r);
    for (int k = 0; k < a2; ++k) r = P.L(1, r);
    return r;
}

CJet T_op(const PhaseJets& P, int k, const CJet& f) {
    if (k < 1) fail(ErrorCode::InvalidArgument, "T_k needs k >= 1");
    const int top = 2 * k - 1;
    LWords W(P, f, top + 1);
    const CJet& phi = P.phi(0);
    CJet mphi[2] = {-phi.d(2), -phi.d(3)};
    std::vector<CJet> pw[2];
    for (int v = 0; v < 2; ++v) {
        pw[v].push_back(CJet(P.layout(), 1.0));
        for (int n = 1; n <= top; ++n) pw[v].push_back(pw[v].back() * mphi[v]);
    }
    CJet out(P.layout());
    for (int beta = 0; beta < 2; ++beta) {
        const int e1 = beta == 0, e2 = beta == 1;
        CJet G = W(e1, e2);
        for (int n = 1; n <= top; ++n)
            for (int a1 = 0; a1 <= n; ++a1) {
                int a2 = n - a1;
                double c = 1.0 / (factorial(a1) * factorial(a2) * (n + 1));
                G += pw[0][a1] * pw[1][a2] * W(a1 + e1, a2 + e2) * c;
            }
        out += G.d(2 + beta) + P.log_w(0).d(2 + beta) * G;
    }
    return out * I;
}

CJet B_minus1(const PhaseJets& P, const CJet& f) {
    LWords W(P, f, 2);
    const CJet& phi = P.phi(0);
    const CJet& lw = P.log_w(0);
    CJet out(P.layout());
    for (int a = 0; a < 2; ++a) {
        const CJet& La = W(a == 0, a == 1);
        out += (La.d(2 + a) + lw.d(2 + a) * La) * I;
    }
    // -(i/2) phi_{eta_a eta_b} L_a L_b
    CJet p11 = phi.d(2).d(2), p12 = phi.d(2).d(3), p22 = phi.d(3).d(3);
    out -= (p11 * W(2, 0) + p12 * W(1, 1) * 2.0 + p22 * W(0, 2)) * (0.5 * I);
    return out;
}

cplx S_op(const PhaseJets& P, int k, const CJet& a, SForm form) {
    if (k < 0 || k > 2) fail(ErrorCode::UnsupportedOrder, "amplitude-to-symbol operators are implemented for k = 0, 1, 2");
    if (k == 0) return a.value();
    if (P.layout().order() < 2 * k + 2) fail(ErrorCode::JetOrderInsufficient, "phase jets too short for this order");
    if (form == SForm::kReduced) return k == 1 ? B_minus1(P, a).value() : B_minus1(P, T_op(P, 2, a)).value();
    CJet g = a;
    for (int j = 0; j < k; ++j) g = T_op(P, k, g);
    return g.value();
}

cplx S_op(const PhaseJets& P, int k, const AmplitudeField& a, SForm form) { return S_op(P, k, a.jet(P), form); }

CJet F_op(const PhaseJets& P, int k, const CJet& f) {
    if (k == 0) return f;
    LWords W(P, f, k);
    const CJet& phi = P.phi(0);
    CJet out(P.layout());
    for (int a1 = 0; a1 <= k; ++a1) {
        int a2 = k - a1;
        CJet term = W(a1, a2) * (1.0 / (factorial(a1) * factorial(a2)));
        for (int j = 0; j < a1; ++j) term = term * phi.d(2);
        for (int j = 0; j < a2; ++j) term = term * phi.d(3);
        out += term;
    }
    return out;
}

SymbolTerms symbol_terms(const MetricModel& m, double t, const Vec2& y, const Vec2& eta, double eps, const PhaseJetOptions& opt) {
    PhaseJets P(m, t, y, eta, eps, opt);
    BComponents B = b_components(P);
    return {S_op(P, 2, B.b2), S_op(P, 1, B.b1), B.b0.value()};
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Panel {
    double a, b;
    cplx value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

// Globally adaptive Gauss-Kronrod: bisect the worst panel until the summed error estimate
// meets tol or the panel budget is spent (the integrand has a round-off floor).
template <class F>
cplx adapt(const F& f, double a, double b, double tol, int max_panels, double& err_total) {
    auto make = [&](double lo, double hi) {
        Panel p{lo, hi, 0, 0};
        p.value = GK::integrate(f, lo, hi, 0, 0.0, &p.err);
        return p;
    };
    std::priority_queue<Panel> q;
    q.push(make(a, b));
    err_total = q.top().err;
    while (err_total > tol && static_cast<int>(q.size()) < max_panels) {
        Panel p = q.top();
        q.pop();
        double c = 0.5 * (p.a + p.b);
        Panel l = make(p.a, c), r = make(c, p.b);
        err_total += l.err + r.err - p.err;
        q.push(l);
        q.push(r);
    }
    cplx sum = 0;
    err_total = 0;
    while (!q.empty()) {
        sum += q.top().value;
        err_total += q.top().err;
        q.pop();
    }
    return sum;
}

cplx integrate_panel(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, double a, double b, const SubprincipalOptions& opt) {
    if (a == b) return 0;
    auto f = [&](double tau) { return symbol_terms(m, tau, y, eta, eps, opt.jets).sum() + opt.b0_shift; };
    double err = 0;
    const double tol = opt.quad_tol * std::abs(b - a);
    cplx r = adapt(f, a, b, tol, 64, err);
    if (!(err <= 1e3 * tol)) fail(ErrorCode::QuadratureFailure, "adaptive quadrature did not reach the requested tolerance");
    return r;
}

}  // namespace

std::vector<cplx> subprincipal_on_grid(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, const std::vector<double>& t_grid,
                                       const SubprincipalOptions& opt) {
    const double h = hamiltonian(m, y, eta);
    std::vector<cplx> out;
    out.reserve(t_grid.size());
    cplx acc = 0;
    double prev = 0;
    for (double t : t_grid) {
        acc += integrate_panel(m, y, eta, eps, prev, t, opt);
        prev = t;
        out.push_back(-I / (2 * h) * acc);
    }
    return out;
}

cplx subprincipal_symbol(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, double t, const SubprincipalOptions& opt) {
    return subprincipal_on_grid(m, y, eta, eps, {t}, opt)[0];
}

cplx small_time_coefficient(const MetricModel& m, const Vec2& y, const Vec2& eta) {
    SubprincipalOptions opt;
    opt.quad_tol = 1e-12;
    const double t0 = 0.04;
    std::vector<double> grid{t0 / 4, t0 / 2, t0};
    auto a = subprincipal_on_grid(m, y, eta, 0.0, grid, opt);
    cplx c[3];
    for (int k = 0; k < 3; ++k) c[k] = a[k] / grid[k];
    // c(t) = c0 + c1 t + c2 t^2 + ...
    cplx r_small = 2.0 * c[0] - c[1], r_big = 2.0 * c[1] - c[2];
    return (4.0 * r_small - r_big) / 3.0;
}

FteResidual fte_residual(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, double t, const PhaseJetOptions& opt) {
    PhaseJets P(m, t, y, eta, eps, opt);
    BComponents B = b_components(P);
    const FlowState& s = P.flow();
    HamiltonianDerivatives hd = hamiltonian_derivatives(m, s.x_star, s.xi_star);
    const CJet& lw = P.log_w(0);
    cplx dlnw = P.log_w(1).value() + lw.d(0).value() * hd.h_xi[0] + lw.d(1).value() * hd.h_xi[1];
    cplx hess = 0;
    for (int al = 0; al < 2; ++al)
        for (int be = 0; be < 2; ++be)
            for (int ga = 0; ga < 2; ++ga) hess += s.dx_deta(ga, al) * P.phi_x_eta_inv(al, be).value() * B.b2.d(be).d(ga).value();
    FteResidual r;
    r.lhs = (P.phi(2) - P.laplacian(P.phi(0))).value();
    r.rhs = 2 * P.h() * dlnw + 0.5 * hess;
    r.residual = r.lhs - r.rhs;
    r.b1_frak = S_op(P, 1, B.b2) + B.b1.value();
    return r;
}

cplx SymbolSeries::component(int k, double t, const Vec2& y, const Vec2& eta, double eps) const {
    if (k == 0) return 1.0;
    if (k == 1) return subprincipal_symbol(*model, y, eta, eps, t, options);
    fail(ErrorCode::UnsupportedOrder, "symbol components below a_{-1} are not computed");
}

}  // namespace wavefront

// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "wavefront/phase.hpp"

#include <cmath>

#include "closed_form.hpp"
#include "phase_internal.hpp"

namespace wavefront {

using jets::CJet;
using jets::Layout;

namespace {

const cplx I(0, 1);

// Power series about sigma = 0 for the squared distance and for the ratio
// dist/sin(dist) (sphere) or dist/sinh(dist) (hyperbolic), sigma the chordal distance squared.
double central_binomial(int n) {
    double c = 1;
    for (int k = 1; k <= n; ++k) c = c * (n + k) / k;
    return c;
}

std::vector<cplx> dist2_series(double curvature, int n_max) {
    std::vector<cplx> a(n_max + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        double v = 2.0 / (static_cast<double>(n) * n * central_binomial(n));
        a[n] = curvature > 0 || n % 2 == 1 ? v : -v;
    }
    return a;
}

std::vector<cplx> ratio_series(double curvature, int n_max) {
    std::vector<cplx> a(n_max + 1, 0.0);
    for (int n = 0; n <= n_max; ++n) {
        double v = 1.0 / ((2.0 * n + 1) * central_binomial(n));
        a[n] = curvature > 0 || n % 2 == 0 ? v : -v;
    }
    return a;
}

// Taylor coefficients at s0 of the function with series a about 0
std::vector<cplx> recentre(const std::vector<cplx>& a, double s0, int order) {
    std::vector<cplx> c(order + 1, 0.0);
    for (int k = 0; k <= order; ++k) {
        double binom = 1;  // C(n, k)
        double pw = 1;     // s0^(n-k)
        for (int n = k; n < static_cast<int>(a.size()); ++n) {
            if (n > k) {
                binom = binom * n / (n - k);
                pw *= s0;
            }
            c[k] += a[n] * binom * pw;
        }
    }
    return c;
}

// squared distance and dist/sin(dist) as jets of the chordal sigma
void distance_functions(double curvature, const CJet& sigma, CJet& d2, CJet& ratio) {
    const double s0 = sigma.value().real();
    const int order = sigma.layout().order();
    if (s0 < 0.5) {
        const int n_max = 60 + 4 * order;
        d2 = jets::compose(sigma, recentre(dist2_series(curvature, n_max), s0, order));
        ratio = jets::compose(sigma, recentre(ratio_series(curvature, n_max), s0, order));
        return;
    }
    CJet r = jets::sqrt(sigma) * 0.5;
    CJet d = curvature > 0 ? jets::asin(r) * 2.0 : jets::asinh(r) * 2.0;
    d2 = d * d;
    ratio = d * jets::inv(curvature > 0 ? jets::sin(d) : jets::sinh(d));
}

}  // namespace

namespace detail {

PhiJet build_phi(const MetricModel& m, const Layout& L, double t, const Vec2& x0, int chart, const Vec2& y, const Vec2& eta, double eps) {
    CJet tj = CJet::variable(L, 0, t);
    CJet xj[2] = {CJet::variable(L, 1, x0[0]), CJet::variable(L, 2, x0[1])};
    CJet ej[2] = {CJet::variable(L, 3, eta[0]), CJet::variable(L, 4, eta[1])};
    closed::FlowJets F = closed::flow_jets(m, y, tj, ej);
    PhiJet out;
    out.h = F.h.value().real();
    if (m.kind() == ModelKind::FlatTorus2) {
        Vec2 xs(F.x[0].value().real(), F.x[1].value().real());
        Vec2 db = m.min_image(x0 - xs);
        out.dist = db.norm();
        CJet d[2];
        for (int a = 0; a < 2; ++a) d[a] = xj[a] - F.x[a] + (db[a] - (x0[a] - xs[a]));
        out.phi = F.xi[0] * d[0] + F.xi[1] * d[1] + F.h * (d[0] * d[0] + d[1] * d[1]) * (0.5 * I * eps);
        return out;
    }
    closed::J3 Q = closed::embed_jet(m, xj, chart);
    closed::J3 D;
    for (int i = 0; i < 3; ++i) D[i] = Q[i] - F.Y[i];
    CJet sigma = closed::ambient_dot_jet(m, D, D);
    const double curv = m.constant_curvature();
    double s0 = sigma.value().real();
    out.dist = curv > 0 ? 2 * std::asin(std::min(1.0, std::sqrt(std::max(0.0, s0)) / 2)) : 2 * std::asinh(std::sqrt(std::max(0.0, s0)) / 2);
    if (out.dist >= m.injectivity_radius() * (1 - 1e-12))
        fail(ErrorCode::OutsideGeodesicNeighbourhood, "point outside the geodesic neighbourhood of the flow");
    CJet d2, ratio;
    distance_functions(curv, sigma, d2, ratio);
    CJet pair = closed::ambient_dot_jet(m, F.Yd, Q);
    out.phi = F.h * (ratio * pair + d2 * (0.5 * I * eps));
    return out;
}

}  // namespace detail

using detail::build_phi;

PhaseEval phase_eval(const MetricModel& m, double t, const Vec2& x, const Vec2& y, const Vec2& eta, double eps, int chart) {
    if (eta.squaredNorm() == 0) fail(ErrorCode::ZeroCovector, "zero covector");
    FlowState fs = flow_sample(m, y, eta, t);
    if (chart < 0) chart = fs.chart;
    m.check_point(x);
    PhaseEval r;
    r.epsilon = eps;
    r.chart = chart;
    if (has_closed_form(m)) {
        const Layout& L = Layout::get(5, 2);
        CJet phi = build_phi(m, L, t, x, chart, y, eta, eps).phi;
        r.value = phi.value();
        r.d_t = phi.derivative_value({1, 0, 0, 0, 0});
        r.d_x = CVec2(phi.derivative_value({0, 1, 0, 0, 0}), phi.derivative_value({0, 0, 1, 0, 0}));
        r.d_eta = CVec2(phi.derivative_value({0, 0, 0, 1, 0}), phi.derivative_value({0, 0, 0, 0, 1}));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                int e[5] = {0, 0, 0, 0, 0};
                e[1 + a] += 1;
                e[3 + b] += 1;
                r.d_x_d_eta(a, b) = phi[L.index(e)];
            }
        return r;
    }
    // conformal models: shooting from x*
    const double h = hamiltonian(m, y, eta);
    Vec2 v = exp_inverse(m, fs.x_star, x);
    MetricValue mv = metric_at(m, fs.x_star);
    double len2 = v.dot(mv.g * v);
    if (std::sqrt(len2) >= m.injectivity_radius()) fail(ErrorCode::OutsideGeodesicNeighbourhood, "point outside the geodesic neighbourhood");
    r.value = cplx(fs.xi_star.dot(v), 0.5 * eps * h * len2);
    if (std::sqrt(len2) < 1e-14) {
        r.d_t = -h;
        r.d_x = fs.xi_star.cast<cplx>();
        r.d_eta = CVec2::Zero();
        r.d_x_d_eta = phi_x_eta_on_flow(m, fs, y, eta, eps);
    } else {
        r.has_derivatives = false;
    }
    return r;
}

CMat2 phi_x_eta_on_flow(const MetricModel& m, const FlowState& s, const Vec2& y, const Vec2& eta, double eps) {
    const double h = hamiltonian(m, y, eta);
    Christoffel G = christoffel_at(m, s.x_star);
    MetricValue mv = metric_at(m, s.x_star);
    CMat2 r;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double conn = 0, metric = 0;
            for (int mu = 0; mu < 2; ++mu)
                for (int nu = 0; nu < 2; ++nu) conn += G[mu](a, nu) * s.xi_star[mu] * s.dx_deta(nu, b);
            for (int nu = 0; nu < 2; ++nu) metric += mv.g(a, nu) * s.dx_deta(nu, b);
            r(a, b) = cplx(s.dxi_deta(a, b) - conn, -eps * h * metric);
        }
    return r;
}

cplx phase_scalar_part(const MetricModel& m, const FlowState& s, const Vec2& y, const Vec2& eta, double eps) {
    cplx det = phi_x_eta_on_flow(m, s, y, eta, eps).determinant();
    double ratio = metric_at(m, y).rho / metric_at(m, s.x_star).rho;
    // the second sphere chart reverses orientation
    return (s.chart == 1 ? -ratio : ratio) * det;
}

namespace {

struct Tracker {
    const MetricModel& m;
    const Vec2& y;
    const Vec2& eta;
    double eps;
    double arg = 0;  // accumulated argument of the scalar part

    static constexpr double kZero = 1e-12;

    cplx scalar_at(double t) const { return phase_scalar_part(m, flow_sample(m, y, eta, t), y, eta, eps); }

    void check(cplx s, double t) const {
        if (std::abs(s) < kZero)
            fail(ErrorCode::BranchDegenerate, "det phi_xeta vanishes on the flow at t = " + std::to_string(t) + "; use epsilon > 0");
    }

    void advance(double ta, cplx sa, double tb, cplx sb, int depth) {
        check(sb, tb);
        double d = std::arg(sb / sa);
        if (std::abs(d) < 0.5 * M_PI) {
            arg += d;
            return;
        }
        if (depth > 48 || std::abs(tb - ta) < 1e-14 * std::max(1.0, std::abs(ta)))
            fail(ErrorCode::BranchDegenerate, "det phi_xeta changes sign near t = " + std::to_string(0.5 * (ta + tb)) + "; use epsilon > 0");
        double tm = 0.5 * (ta + tb);
        cplx sm = scalar_at(tm);
        check(sm, tm);
        advance(ta, sa, tm, sm, depth + 1);
        advance(tm, sm, tb, sb, depth + 1);
    }
};

}  // namespace

std::vector<WeightEval> weight_eval(const MetricModel& m, const std::vector<FlowState>& trajectory, const Vec2& y, const Vec2& eta,
                                    double eps) {
    Tracker tr{m, y, eta, eps};
    const double rho_y = metric_at(m, y).rho;
    std::vector<WeightEval> out;
    out.reserve(trajectory.size());
    double t_prev = 0;
    cplx s_prev = 1.0;
    for (const auto& fs : trajectory) {
        cplx s = phase_scalar_part(m, fs, y, eta, eps);
        tr.advance(t_prev, s_prev, fs.t, s, 0);
        t_prev = fs.t;
        s_prev = s;
        WeightEval w;
        w.t = fs.t;
        cplx det = phi_x_eta_on_flow(m, fs, y, eta, eps).determinant();
        w.det2 = det * det;
        w.branch_arg = 2 * tr.arg;
        const double rho_x = metric_at(m, fs.x_star).rho;
        w.value = std::polar(std::pow(std::abs(w.det2), 0.25) / std::sqrt(rho_x * rho_y), 0.25 * w.branch_arg);
        out.push_back(w);
    }
    return out;
}

std::vector<WeightEval> weight_along(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, const std::vector<double>& t_grid) {
    return weight_eval(m, flow_samples(m, y, eta, t_grid), y, eta, eps);
}

double smooth_step(double s) {
    if (s <= 0) return 0;
    if (s >= 1) return 1;
    double a = std::exp(-1 / s), b = std::exp(-1 / (1 - s));
    return a / (a + b);
}

double cutoff_chi(const MetricModel& m, double t, const Vec2& x, const Vec2& y, const Vec2& eta, const CutoffOptions& opt, int chart) {
    const double h = hamiltonian(m, y, eta);
    double radial = smooth_step((h - 0.5) / 0.5);
    if (radial == 0) return 0;
    const double r_inj = m.injectivity_radius();
    if (!std::isfinite(r_inj)) return radial;
    FlowState fs = flow_sample(m, y, eta, t);
    double d;
    if (m.has_embedding()) {
        Vec3 a = m.embed(x, chart), b = m.embed(fs.x_star, fs.chart);
        double c = std::clamp(a.dot(b), -1.0, 1.0);
        d = std::acos(c);
    } else if (m.kind() == ModelKind::FlatTorus2) {
        d = m.min_image(x - fs.x_star).norm();
    } else {
        try {
            d = geodesic_distance(m, fs.x_star, x);
        } catch (const Error&) {
            return 0;
        }
    }
    double s = (d / r_inj - opt.inner) / (opt.outer - opt.inner);
    return radial * (1 - smooth_step(s));
}

// ---- phase jets ----

PhaseJets::PhaseJets(const MetricModel& m, double t, const Vec2& y, const Vec2& eta, double eps, const PhaseJetOptions& opt)
    : m_(&m), eps_(eps) {
    if (!has_closed_form(m)) fail(ErrorCode::InvalidArgument, "symbol jets need a closed-form model");
    if (eta.squaredNorm() == 0) fail(ErrorCode::ZeroCovector, "zero covector");
    const int N = opt.order;
    // (t | x1 x2 | eta1 eta2) with t-degree <= 2
    const Layout& L5 = Layout::get(5, N + 2, {{0b00001u, 2}, {0b11110u, N}, {0b11000u, opt.eta_cap}});
    L_ = &Layout::get(4, N, {{0b1100u, opt.eta_cap}});
    fs_ = flow_closed_form(m, y, eta, t);
    h_ = hamiltonian(m, y, eta);
    detail::PhiJet P = build_phi(m, L5, t, fs_.x_star, fs_.chart, y, eta, eps);

    // ln w = -1/2 ln rho(x) - 1/2 ln rho(y) + 1/2 ln det phi_xeta
    CJet a00 = P.phi.d(1).d(3), a01 = P.phi.d(1).d(4), a10 = P.phi.d(2).d(3), a11 = P.phi.d(2).d(4);
    CJet det = a00 * a11 - a01 * a10;
    if (std::abs(det.value()) < 1e-13) fail(ErrorCode::SingularPhaseHessian, "phi_xeta is singular on the flow; use epsilon > 0");
    CJet x5[2] = {CJet::variable(L5, 1, fs_.x_star[0]), CJet::variable(L5, 2, fs_.x_star[1])};
    CJet lw5 = (jets::log(det) - jets::log(m.density(x5[0], x5[1]))) * 0.5 - 0.5 * std::log(metric_at(m, y).rho);

    auto slice = [&](const CJet& f, int k) {
        CJet r(*L_);
        double fact = k == 2 ? 2.0 : 1.0;
        for (int i = 0; i < L_->size(); ++i) {
            int e[5] = {k, L_->exponent(i, 0), L_->exponent(i, 1), L_->exponent(i, 2), L_->exponent(i, 3)};
            int j = L5.index(e);
            if (j >= 0) r[i] = f[j] * fact;
        }
        return r;
    };
    for (int k = 0; k < 3; ++k) {
        phi_[k] = slice(P.phi, k);
        lw_[k] = slice(lw5, k);
    }
    CJet x4[2] = {CJet::variable(*L_, 0, fs_.x_star[0]), CJet::variable(*L_, 1, fs_.x_star[1])};
    m.metric_inverse(x4[0], x4[1], ginv_[0], ginv_[1], ginv_[2]);
    rho_ = m.density(x4[0], x4[1]);
    rho_inv_ = jets::inv(rho_);

    const CJet& f = phi_[0];
    CJet A[4] = {f.d(0).d(2), f.d(0).d(3), f.d(1).d(2), f.d(1).d(3)};
    CJet dinv = jets::inv(A[0] * A[3] - A[1] * A[2]);
    Ainv_[0] = A[3] * dinv;
    Ainv_[1] = -(A[1] * dinv);
    Ainv_[2] = -(A[2] * dinv);
    Ainv_[3] = A[0] * dinv;
}

CJet PhaseJets::L(int a, const CJet& f) const { return Ainv_[2 * a] * f.d(0) + Ainv_[2 * a + 1] * f.d(1); }

CJet PhaseJets::laplacian(const CJet& f) const {
    CJet f0 = f.d(0), f1 = f.d(1);
    CJet v0 = rho_ * (ginv_[0] * f0 + ginv_[1] * f1);
    CJet v1 = rho_ * (ginv_[1] * f0 + ginv_[2] * f1);
    return rho_inv_ * (v0.d(0) + v1.d(1));
}

CJet PhaseJets::grad_dot(const CJet& f, const CJet& g) const {
    CJet f0 = f.d(0), f1 = f.d(1), g0 = g.d(0), g1 = g.d(1);
    return ginv_[0] * f0 * g0 + ginv_[1] * (f0 * g1 + f1 * g0) + ginv_[2] * f1 * g1;
}

}  // namespace wavefront

// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "wavefront/flow.hpp"

#include <algorithm>
#include <numeric>

#include "closed_form.hpp"
#include "ode.hpp"

namespace wavefront {

using jets::CJet;
using jets::Layout;

double hamiltonian(const MetricModel& m, const Vec2& x, const Vec2& xi) {
    if (xi.squaredNorm() == 0) fail(ErrorCode::ZeroCovector, "hamiltonian of the zero covector");
    MetricValue mv = metric_at(m, x);
    return std::sqrt(xi.dot(mv.g_inv * xi));
}

HamiltonianDerivatives hamiltonian_derivatives(const MetricModel& m, const Vec2& x, const Vec2& xi) {
    if (xi.squaredNorm() == 0) fail(ErrorCode::ZeroCovector, "hamiltonian of the zero covector");
    const Layout& L = Layout::get(4, 2);
    CJet u = CJet::variable(L, 0, x[0]), v = CJet::variable(L, 1, x[1]);
    CJet p = CJet::variable(L, 2, xi[0]), q = CJet::variable(L, 3, xi[1]);
    CJet h11, h12, h22;
    m.metric_inverse(u, v, h11, h12, h22);
    CJet h = jets::sqrt(h11 * p * p + h12 * p * q * 2.0 + h22 * q * q);
    auto second = [&](int i, int j) {
        int e[4] = {0, 0, 0, 0};
        e[i] += 1;
        e[j] += 1;
        double c = h[L.index(e)].real();
        return i == j ? 2 * c : c;
    };
    auto first = [&](int i) {
        int e[4] = {0, 0, 0, 0};
        e[i] = 1;
        return h[L.index(e)].real();
    };
    HamiltonianDerivatives d;
    d.h = h.value().real();
    d.h_x = Vec2(first(0), first(1));
    d.h_xi = Vec2(first(2), first(3));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            d.h_xx(a, b) = second(a, b);
            d.h_xxi(a, b) = second(a, 2 + b);
            d.h_xixi(a, b) = second(2 + a, 2 + b);
        }
    return d;
}

namespace {

using State12 = ode::State<12>;

FlowState unpack(const State12& s, double t, int chart) {
    FlowState f;
    f.t = t;
    f.x_star = Vec2(s[0], s[1]);
    f.xi_star = Vec2(s[2], s[3]);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            f.dx_deta(a, b) = s[4 + 2 * a + b];
            f.dxi_deta(a, b) = s[8 + 2 * a + b];
        }
    f.chart = chart;
    return f;
}

State12 pack(const FlowState& f) {
    State12 s{};
    s[0] = f.x_star[0];
    s[1] = f.x_star[1];
    s[2] = f.xi_star[0];
    s[3] = f.xi_star[1];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            s[4 + 2 * a + b] = f.dx_deta(a, b);
            s[8 + 2 * a + b] = f.dxi_deta(a, b);
        }
    return s;
}

void flow_rhs(const MetricModel& m, const State12& s, State12& ds) {
    Vec2 x(s[0], s[1]), xi(s[2], s[3]);
    if (!std::isfinite(x[0]) || !std::isfinite(x[1])) fail(ErrorCode::IntegratorDivergence, "flow left every chart");
    HamiltonianDerivatives d = hamiltonian_derivatives(m, x, xi);
    ds[0] = d.h_xi[0];
    ds[1] = d.h_xi[1];
    ds[2] = -d.h_x[0];
    ds[3] = -d.h_x[1];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double dx = 0, dxi = 0;
            for (int c = 0; c < 2; ++c) {
                double X = s[4 + 2 * c + b], XI = s[8 + 2 * c + b];
                dx += d.h_xxi(c, a) * X + d.h_xixi(a, c) * XI;
                dxi += -d.h_xx(a, c) * X - d.h_xxi(a, c) * XI;
            }
            ds[4 + 2 * a + b] = dx;
            ds[8 + 2 * a + b] = dxi;
        }
}

struct ChartSwitch {
    State12 state;
    double t;
};

// integrate from (t0, s, chart) to t1, switching chart whenever the sphere chart point
// grows past radius 3; the inverted point then has radius 4/3.
void advance(const MetricModel& m, State12& s, int& chart, double t0, double t1, const FlowOptions& opt) {
    double t = t0;
    const bool switching = m.chart_count() > 1;
    int guard = 0;
    while (t != t1) {
        if (++guard > 10000) fail(ErrorCode::IntegratorDivergence, "too many chart switches");
        auto rhs = [&](double, const State12& y, State12& dy) { flow_rhs(m, y, dy); };
        if (!switching) {
            ode::integrate<12>(rhs, s, t, t1, opt.abs_tol, opt.rel_tol);
            return;
        }
        try {
            State12 y = s;
            ode::integrate_observed<12>(rhs, y, t, t1, opt.abs_tol, opt.rel_tol, [&](const State12& st, double tt) {
                if (st[0] * st[0] + st[1] * st[1] > 9.0) throw ChartSwitch{st, tt};
            });
            s = y;
            t = t1;
        } catch (const ChartSwitch& sw) {
            FlowState f = to_other_chart(m, unpack(sw.state, sw.t, chart));
            s = pack(f);
            chart = f.chart;
            t = sw.t;
        }
    }
}

FlowState finish(const MetricModel& m, FlowState f) {
    if (m.kind() == ModelKind::FlatTorus2) f.x_star = m.reduce(f.x_star);
    if (m.chart_count() > 1 && f.x_star.squaredNorm() > 4.0) f = to_other_chart(m, f);
    return f;
}

}  // namespace

FlowState to_other_chart(const MetricModel& m, const FlowState& s) {
    if (m.chart_count() < 2) fail(ErrorCode::InvalidArgument, "model has a single chart");
    FlowState r = s;
    Vec2 xn = m.switch_chart(s.x_star);
    Mat2 Jfwd = m.switch_chart_jacobian(s.x_star);  // dx'/dx
    Mat2 Jback = m.switch_chart_jacobian(xn);       // dx/dx'
    auto H = m.switch_chart_hessian(xn);            // d^2 x / dx' dx'
    r.x_star = xn;
    r.xi_star = Jback.transpose() * s.xi_star;
    r.dx_deta = Jfwd * s.dx_deta;
    for (int b = 0; b < 2; ++b)
        for (int g = 0; g < 2; ++g) {
            double v = 0;
            for (int a = 0; a < 2; ++a) {
                v += s.dxi_deta(a, g) * Jback(a, b);
                for (int k = 0; k < 2; ++k) v += s.xi_star[a] * H[a](b, k) * r.dx_deta(k, g);
            }
            r.dxi_deta(b, g) = v;
        }
    r.chart = 1 - s.chart;
    return r;
}

FlowState to_primary_chart(const MetricModel& m, const FlowState& s) {
    if (s.chart == 0) return s;
    if (s.x_star.squaredNorm() == 0) fail(ErrorCode::PointOutsideChart, "flow point is the excluded pole of chart 0");
    FlowState r = to_other_chart(m, s);
    m.check_point(r.x_star);
    return r;
}

std::vector<FlowState> integrate_flow(const MetricModel& m, const Vec2& y, const Vec2& eta, const std::vector<double>& t_grid,
                                      const FlowOptions& opt) {
    if (eta.squaredNorm() == 0) fail(ErrorCode::ZeroCovector, "initial covector is zero");
    m.check_point(y);
    std::vector<FlowState> out(t_grid.size());
    FlowState init;
    init.x_star = y;
    init.xi_star = eta;
    init.dxi_deta = Mat2::Identity();
    std::vector<size_t> idx(t_grid.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return t_grid[a] < t_grid[b]; });
    for (double t : t_grid)
        if (!std::isfinite(t)) fail(ErrorCode::InvalidArgument, "non-finite time in grid");

    // forward branch
    {
        State12 s = pack(init);
        int chart = 0;
        double t = 0;
        for (size_t k : idx) {
            if (t_grid[k] < 0) continue;
            advance(m, s, chart, t, t_grid[k], opt);
            t = t_grid[k];
            out[k] = finish(m, unpack(s, t, chart));
        }
    }
    // backward branch
    {
        State12 s = pack(init);
        int chart = 0;
        double t = 0;
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
            size_t k = *it;
            if (t_grid[k] >= 0) continue;
            advance(m, s, chart, t, t_grid[k], opt);
            t = t_grid[k];
            out[k] = finish(m, unpack(s, t, chart));
        }
    }
    return out;
}

FlowState flow_at(const MetricModel& m, const Vec2& y, const Vec2& eta, double t, const FlowOptions& opt) {
    return integrate_flow(m, y, eta, {t}, opt)[0];
}

FlowState flow_closed_form(const MetricModel& m, const Vec2& y, const Vec2& eta, double t) {
    if (eta.squaredNorm() == 0) fail(ErrorCode::ZeroCovector, "initial covector is zero");
    m.check_point(y);
    const Layout& L = Layout::get(2, 1);
    CJet e[2] = {CJet::variable(L, 0, eta[0]), CJet::variable(L, 1, eta[1])};
    CJet tj(L, t);
    closed::FlowJets F = closed::flow_jets(m, y, tj, e);
    FlowState s;
    s.t = t;
    s.chart = F.chart;
    for (int a = 0; a < 2; ++a) {
        s.x_star[a] = F.x[a].value().real();
        s.xi_star[a] = F.xi[a].value().real();
        for (int b = 0; b < 2; ++b) {
            s.dx_deta(a, b) = F.x[a][1 + b].real();
            s.dxi_deta(a, b) = F.xi[a][1 + b].real();
        }
    }
    if (m.kind() == ModelKind::FlatTorus2) s.x_star = m.reduce(s.x_star);
    return s;
}

bool has_closed_form(const MetricModel& m) { return m.kind() != ModelKind::ConformalCustom; }

// closed forms where available; long hyperbolic runs are very stiff for the integrator
FlowState flow_sample(const MetricModel& m, const Vec2& y, const Vec2& eta, double t) {
    return has_closed_form(m) ? flow_closed_form(m, y, eta, t) : flow_at(m, y, eta, t);
}

std::vector<FlowState> flow_samples(const MetricModel& m, const Vec2& y, const Vec2& eta, const std::vector<double>& grid) {
    if (!has_closed_form(m)) return integrate_flow(m, y, eta, grid);
    std::vector<FlowState> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back(flow_closed_form(m, y, eta, t));
    return out;
}

namespace {
double chart0_distance(const MetricModel& m, const FlowState& s, const Vec2& y) {
    Vec2 x = s.x_star;
    if (s.chart == 1) {
        if (x.squaredNorm() < 1e-30) return INFINITY;
        x = m.switch_chart(x);
    }
    return m.min_image(x - y).norm();
}

// signed transversal Jacobi field: det[velocity, dx*/deta applied to the rotated covector]
double jacobi_sign_function(const MetricModel& m, const FlowState& s, const Vec2& eta) {
    HamiltonianDerivatives d = hamiltonian_derivatives(m, s.x_star, s.xi_star);
    Vec2 w(-eta[1], eta[0]);
    Vec2 a = s.dx_deta * w;
    double det = d.h_xi[0] * a[1] - d.h_xi[1] * a[0];
    return s.chart == 1 ? -det : det;
}
}  // namespace

std::vector<LoopHit> loop_detect(const MetricModel& m, const Vec2& y, const Vec2& eta, double T_max, double tol) {
    std::vector<LoopHit> hits;
    if (!(T_max > 0)) return hits;
    const int n = std::max(200, static_cast<int>(std::ceil(T_max / 0.01)));
    std::vector<double> grid(n + 1);
    for (int k = 0; k <= n; ++k) grid[k] = T_max * k / n;
    auto states = flow_samples(m, y, eta, grid);
    std::vector<double> d(n + 1);
    for (int k = 0; k <= n; ++k) d[k] = chart0_distance(m, states[k], y);
    const double h = hamiltonian(m, y, eta);
    for (int k = 1; k <= n; ++k) {
        bool local_min = d[k] <= d[k - 1] && (k == n || d[k] <= d[k + 1]);
        if (!local_min || d[k] > 0.1) continue;
        // golden-section refinement of the chart distance
        double a = grid[k - 1], b = k == n ? grid[k] : grid[k + 1];
        const double gr = 0.5 * (std::sqrt(5.0) - 1);
        double c = b - gr * (b - a), e = a + gr * (b - a);
        auto dist_at = [&](double t) { return chart0_distance(m, flow_sample(m, y, eta, t), y); };
        double fc = dist_at(c), fe = dist_at(e);
        for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
            if (fc < fe) {
                b = e;
                e = c;
                fe = fc;
                c = b - gr * (b - a);
                fc = dist_at(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + gr * (b - a);
                fe = dist_at(e);
            }
        }
        double T = 0.5 * (a + b);
        FlowState s = flow_sample(m, y, eta, T);
        if (chart0_distance(m, s, y) >= tol) continue;
        if (!hits.empty() && std::abs(hits.back().T - T) < 1e-6) continue;
        bool conj = s.dx_deta.norm() * h < 1e-6;
        hits.push_back({T, conj});
    }
    return hits;
}

std::vector<double> conjugate_times(const MetricModel& m, const Vec2& y, const Vec2& eta, double T_max) {
    std::vector<double> out;
    const int n = std::max(200, static_cast<int>(std::ceil(T_max / 0.01)));
    std::vector<double> grid(n + 1);
    for (int k = 0; k <= n; ++k) grid[k] = T_max * k / n;
    auto states = flow_samples(m, y, eta, grid);
    std::vector<double> f(n + 1);
    for (int k = 0; k <= n; ++k) f[k] = jacobi_sign_function(m, states[k], eta);
    for (int k = 1; k < n; ++k) {
        if (f[k] == 0 || (f[k] > 0) != (f[k + 1] > 0)) {
            double a = grid[k], b = grid[k + 1];
            double fa = f[k];
            for (int it = 0; it < 60; ++it) {
                double c = 0.5 * (a + b);
                double fc = jacobi_sign_function(m, flow_sample(m, y, eta, c), eta);
                if ((fc > 0) == (fa > 0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
            }
            out.push_back(0.5 * (a + b));
        }
    }
    return out;
}

}  // namespace wavefront

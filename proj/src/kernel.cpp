// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "wavefront/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

namespace wavefront {

namespace {

constexpr double kTwoPi = 2 * M_PI;

struct RadialRule {
    std::vector<double> r, w;
};

// composite 20-point Gauss-Legendre on [a, b]
void append_panels(RadialRule& rule, double a, double b, int panels) {
    using G = boost::math::quadrature::gauss<double, 20>;
    const auto& x = G::abscissa();
    const auto& wt = G::weights();
    const double len = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * len, hl = 0.5 * len;
        for (size_t k = 0; k < x.size(); ++k) {
            const int signs = x[k] == 0 ? 1 : 2;
            for (int s = 0; s < signs; ++s) {
                const double xi = s == 0 ? x[k] : -x[k];
                rule.r.push_back(c + hl * xi);
                rule.w.push_back(hl * wt[k]);
            }
        }
    }
}

RadialRule radial_rule(double R, int nodes) {
    RadialRule rule;
    // the cut-off ramp h in [1/2, 1] gets its own panels
    append_panels(rule, 0.5, 1.0, 8);
    const int panels = std::max(1, (nodes + 19) / 20);
    append_panels(rule, 1.0, std::max(2.0, 6 * R), panels);
    return rule;
}

// symmetric square root of a 2x2 positive matrix
Mat2 sqrt_spd(const Mat2& G) {
    const double s = std::sqrt(G.determinant());
    return (G + s * Mat2::Identity()) / std::sqrt(G.trace() + 2 * s);
}

struct PathPoint {
    Vec2 x;
    int chart;
};

// A path from x*(t) to x along which the square root of the scalar part is continued.
class WeightPath {
public:
    WeightPath(const MetricModel& m, const FlowState& fs, const Vec2& x, int x_chart) : m_(m) {
        if (m.kind() == ModelKind::Sphere2) {
            A_ = m.embed(fs.x_star, fs.chart);
            B_ = m.embed(x, x_chart);
            const double c = std::clamp(A_.dot(B_), -1.0, 1.0);
            omega_ = std::acos(c);
            if (omega_ > M_PI - 1e-6) fail(ErrorCode::OutsideGeodesicNeighbourhood, "x is antipodal to x*");
        } else {
            a_ = fs.x_star;
            d_ = m.kind() == ModelKind::FlatTorus2 ? m.min_image(x - fs.x_star) : Vec2(x - fs.x_star);
        }
        end_ = x;
        end_chart_ = x_chart;
    }

    PathPoint at(double tau) const {
        if (tau >= 1) return {end_, end_chart_};
        if (m_.kind() != ModelKind::Sphere2) return {a_ + tau * d_, 0};
        Vec3 P;
        if (omega_ < 1e-12) {
            P = A_;
        } else {
            const double so = std::sin(omega_);
            P = (std::sin((1 - tau) * omega_) * A_ + std::sin(tau * omega_) * B_) / so;
        }
        Vec2 u = m_.unembed(P, 0);
        if (m_.prefers_other_chart(u)) return {m_.unembed(P, 1), 1};
        return {u, 0};
    }

private:
    const MetricModel& m_;
    Vec3 A_, B_;
    double omega_ = 0;
    Vec2 a_, d_, end_;
    int end_chart_ = 0;
};

struct Direction {
    const MetricModel& m;
    const KernelRequest& req;
    Vec2 omega;
    double rho_y;

    // the chart-invariant scalar part (rho(y)/rho(x)) det phi_xeta, with phi at x
    cplx scalar(const PathPoint& p, cplx* phase) const {
        PhaseEval pe = phase_eval(m, req.t, p.x, req.y, omega, req.eps, p.chart);
        if (!pe.has_derivatives) fail(ErrorCode::InvalidArgument, "phase derivatives off the flow are unavailable for this model");
        if (phase) *phase = pe.value;
        const double ratio = rho_y / metric_at(m, p.x).rho;
        return (p.chart == 1 ? -ratio : ratio) * pe.d_x_d_eta.determinant();
    }

    // nearest square root, bisecting whenever the scalar turns by a quarter or more
    void continue_root(const WeightPath& path, double ta, cplx sa, double tb, cplx sb, cplx& root, int depth) const {
        if (std::abs(sb) < 1e-12) fail(ErrorCode::BranchDegenerate, "det phi_xeta vanishes between x* and x");
        if (std::abs(std::arg(sb / sa)) < 0.5 * M_PI) {
            cplx q = std::sqrt(sb);
            root = std::abs(q - root) <= std::abs(q + root) ? q : -q;
            return;
        }
        if (depth > 40) fail(ErrorCode::BranchDegenerate, "weight branch cannot be continued to x");
        const double tm = 0.5 * (ta + tb);
        cplx sm = scalar(path.at(tm), nullptr);
        continue_root(path, ta, sa, tm, sm, root, depth + 1);
        continue_root(path, tm, sm, tb, sb, root, depth + 1);
    }

    // returns chi_spatial * rho(y) w(x) and phi(omega) at x
    bool evaluate(cplx& weight, cplx& phase) const {
        const double chi = cutoff_chi(m, req.t, req.x, req.y, 2 * omega, req.cutoff, req.x_chart);
        if (chi == 0) return false;
        FlowState fs = flow_sample(m, req.y, omega, req.t);
        std::vector<WeightEval> on_flow = weight_eval(m, {fs}, req.y, omega, req.eps);
        cplx root = on_flow[0].value * rho_y;  // sqrt of the scalar part on the flow
        WeightPath path(m, fs, req.x, req.x_chart);
        const int steps = 8;
        cplx s_prev = scalar(path.at(0), nullptr);
        double t_prev = 0;
        for (int k = 1; k <= steps; ++k) {
            const double tk = static_cast<double>(k) / steps;
            cplx sk = scalar(path.at(tk), k == steps ? &phase : nullptr);
            continue_root(path, t_prev, s_prev, tk, sk, root, 0);
            s_prev = sk;
            t_prev = tk;
        }
        weight = chi * root;
        return true;
    }
};

}  // namespace

cplx kernel_oscillatory(const MetricModel& m, const KernelRequest& req, KernelStats* stats) {
    if (!has_closed_form(m)) fail(ErrorCode::InvalidArgument, "the oscillatory kernel needs a built-in model");
    if (!(req.regulator >= 1)) fail(ErrorCode::InvalidArgument, "regulator must be at least 1");
    if (req.angular_nodes < 256 || req.radial_nodes < 400) fail(ErrorCode::InvalidArgument, "too few quadrature nodes (minimum 256 angular, 400 radial)");
    if (req.symbol_depth != 0 && req.symbol_depth != 1) fail(ErrorCode::UnsupportedOrder, "symbol_depth must be 0 or 1");
    if (!(req.eps > 0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    m.check_point(req.y);
    m.check_point(req.x);

    const MetricValue gy = metric_at(m, req.y);
    const Mat2 S = sqrt_spd(gy.g);
    const double sqrt_det = std::sqrt(gy.g.determinant());
    const RadialRule rule = radial_rule(req.regulator, req.radial_nodes);
    const int N = req.angular_nodes;

    auto omega_at = [&](int j) {
        const double th = kTwoPi * j / N;
        return Vec2(S * Vec2(std::cos(th), std::sin(th)));
    };

    // a_{-1} is homogeneous of degree -1, so only its value on the unit circle is needed
    std::vector<cplx> A1(N, 0.0);
    if (req.symbol_depth == 1 && req.use_isotropy) {
        std::fill(A1.begin(), A1.end(), subprincipal_symbol(m, req.y, omega_at(0), req.eps, req.t, req.symbol));
    }

    std::vector<cplx> partial(N, 0.0);
    std::vector<char> active(N, 0);
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int j = next++; j < N; j = next++) {
            try {
                Direction dir{m, req, omega_at(j), gy.rho};
                cplx weight, phase;
                if (!dir.evaluate(weight, phase)) continue;
                active[j] = 1;
                cplx a1 = A1[j];
                if (req.symbol_depth == 1 && !req.use_isotropy) a1 = subprincipal_symbol(m, req.y, dir.omega, req.eps, req.t, req.symbol);
                const cplx I(0, 1);
                cplx sum = 0;
                for (size_t k = 0; k < rule.r.size(); ++k) {
                    const double r = rule.r[k];
                    const double damp = smooth_step((r - 0.5) / 0.5) * std::exp(-std::pow(r / req.regulator, 2));
                    sum += rule.w[k] * r * damp * (1.0 + a1 / r) * std::exp(I * r * phase);
                }
                partial[j] = weight * sum;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next = N;
            }
        }
    };
    int nt = req.threads > 0 ? req.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nt = std::min(nt, N);
    std::vector<std::thread> pool;
    for (int k = 1; k < nt; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);

    int n_active = static_cast<int>(std::count(active.begin(), active.end(), 1));
    if (n_active == 0) fail(ErrorCode::NoStationaryDirection, "x is outside the cut-off support for every direction");
    if (stats) {
        stats->active_directions = n_active;
        stats->radial_evaluations = n_active * static_cast<int>(rule.r.size());
    }
    cplx total = 0;
    for (const auto& p : partial) total += p;
    // d eta = sqrt(det g(y)) r dr dtheta; w carries 1/rho(y)
    return total * (kTwoPi / N) * sqrt_det / gy.rho / (kTwoPi * kTwoPi);
}

double spectral_eigenvalue(int l, double shift) { return std::sqrt(l * (l + 1.0) + shift); }

namespace {
double tail_bound(int l, double shift, double R) { return std::exp(-std::pow(spectral_eigenvalue(l, shift) / R, 2)) * (2 * l + 1); }
}  // namespace

int spectral_l_max(double R, double shift) {
    if (!(R > 0)) fail(ErrorCode::InvalidArgument, "regulator must be positive");
    int l = static_cast<int>(R);
    while (tail_bound(l, shift, R) >= 1e-12) ++l;
    return l;
}

cplx kernel_spectral(const SpectralReference& ref, double t, const Vec2& x, const Vec2& y, double R) {
    if (!(R > 0)) fail(ErrorCode::InvalidArgument, "regulator must be positive");
    if (ref.shift != 0 && ref.shift != 0.25) fail(ErrorCode::InvalidArgument, "shift must be 0 or 1/4");
    const int L = ref.l_max > 0 ? ref.l_max : spectral_l_max(R, ref.shift);
    // the bound must hold at l_max and, since it decays beyond the peak, everywhere above it
    if (tail_bound(L, ref.shift, R) >= 1e-12 || spectral_eigenvalue(L, ref.shift) < R / std::sqrt(2.0))
        fail(ErrorCode::TruncationInsufficient, "l_max = " + std::to_string(L) + " leaves a truncation error above 1e-12");
    MetricModel s = MetricModel::sphere();
    const double c = std::clamp(s.embed(x, ref.chart_x).dot(s.embed(y, ref.chart_y)), -1.0, 1.0);
    double p_prev = 1, p = c;
    cplx sum = 0;
    for (int l = 0; l <= L; ++l) {
        double pl;
        if (l == 0) {
            pl = 1;
        } else if (l == 1) {
            pl = c;
        } else {
            pl = ((2 * l - 1) * c * p - (l - 1) * p_prev) / l;
            p_prev = p;
            p = pl;
        }
        const double lam = spectral_eigenvalue(l, ref.shift);
        sum += std::polar(std::exp(-std::pow(lam / R, 2)) * (2 * l + 1) / (4 * M_PI), -t * lam) * pl;
    }
    return sum;
}

}  // namespace wavefront

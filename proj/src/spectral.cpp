// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "wavefront/spectral.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <thread>

#include "wavefront/errors.hpp"

namespace wavefront {

double unit_sphere_area(int d) {
    if (d < 1) fail(ErrorCode::InvalidArgument, "dimension must be positive");
    return 2 * std::pow(M_PI, 0.5 * d) / boost::math::tgamma(0.5 * d);
}

WeylCoefficients weyl_coefficients(int d, double scalar_curv) {
    if (d < 2) fail(ErrorCode::InvalidArgument, "Weyl coefficients need d >= 2");
    WeylCoefficients w;
    w.d = d;
    w.scalar_curv = scalar_curv;
    w.c_dm1 = unit_sphere_area(d) / std::pow(2 * M_PI, d);
    w.c_dm2 = 0;
    w.c_dm3 = (d - 2) / 12.0 * scalar_curv * w.c_dm1;
    return w;
}

double gaussian_mollifier(double s, double sigma) {
    return std::exp(-0.5 * (s / sigma) * (s / sigma)) / (sigma * std::sqrt(2 * M_PI));
}

std::vector<double> mollified_counting_derivative(const SphereSpectrum& spec, const std::vector<double>& lambda, double sigma, int threads) {
    if (!(sigma > 0)) fail(ErrorCode::InvalidArgument, "mollifier width must be positive");
    if (lambda.empty()) return {};
    const double top = *std::max_element(lambda.begin(), lambda.end()) + 8 * sigma;
    int L = spec.l_max;
    if (L <= 0) L = static_cast<int>(std::ceil(top)) + 1;
    if (std::sqrt(L * (L + 1.0)) < top)
        fail(ErrorCode::SpectrumTruncated, "spectrum cut at l = " + std::to_string(L) + " is below max lambda + 8 sigma");
    std::vector<double> out(lambda.size());
    auto run = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            double s = 0;
            for (int l = 0; l <= L; ++l) s += (2 * l + 1) / (4 * M_PI) * gaussian_mollifier(lambda[i] - std::sqrt(l * (l + 1.0)), sigma);
            out[i] = s;
        }
    };
    size_t nt = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min(nt, lambda.size());
    std::vector<std::thread> pool;
    const size_t chunk = (lambda.size() + nt - 1) / nt;
    for (size_t k = 1; k < nt; ++k) pool.emplace_back(run, std::min(k * chunk, lambda.size()), std::min((k + 1) * chunk, lambda.size()));
    run(0, std::min(chunk, lambda.size()));
    for (auto& th : pool) th.join();
    return out;
}

LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::InvalidArgument, "line fit needs two or more matching samples");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) fail(ErrorCode::InvalidArgument, "line fit needs distinct abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

namespace {

// sum_{n in Z} e^{-a n^2}
double theta_sum(double a) {
    double s = 1;
    for (int n = 1;; ++n) {
        double term = 2 * std::exp(-a * n * n);
        s += term;
        if (term < 1e-18 * s) break;
    }
    return s;
}

double sphere_heat(double t) {
    double s = 0;
    for (int l = 0;; ++l) {
        double term = (2 * l + 1) / (4 * M_PI) * std::exp(-t * l * (l + 1.0));
        s += term;
        if (l > 1 / std::sqrt(t) && term < 1e-18 * s) break;
    }
    return s;
}

}  // namespace

std::vector<HeatTraceRow> heat_trace_check(const MetricModel& m, const std::vector<double>& t_grid) {
    double curv;
    switch (m.kind()) {
        case ModelKind::Sphere2: curv = 2; break;
        case ModelKind::Hyperbolic2: curv = -2; break;
        case ModelKind::FlatTorus2: curv = 0; break;
        default: fail(ErrorCode::InvalidArgument, "heat trace check is defined for the built-in models only");
    }
    std::vector<HeatTraceRow> rows;
    for (double t : t_grid) {
        if (!(t > 0 && t <= 0.5)) fail(ErrorCode::InvalidArgument, "heat trace check needs t in (0, 1/2]");
        HeatTraceRow r;
        r.t = t;
        const double lead = 1 / (4 * M_PI * t);
        r.expansion = lead * (1 + curv * t / 6);
        if (m.kind() == ModelKind::Sphere2) {
            r.has_exact = true;
            r.exact = sphere_heat(t);
        } else if (m.kind() == ModelKind::FlatTorus2) {
            // eigenvalues (2 pi n / L)^2, each mode of density 1 / area
            const Vec2& L = m.torus_lengths();
            r.has_exact = true;
            r.exact = theta_sum(t * std::pow(2 * M_PI / L[0], 2)) * theta_sum(t * std::pow(2 * M_PI / L[1], 2)) / (L[0] * L[1]);
        }
        if (r.has_exact) {
            r.relative = (r.exact - r.expansion) / r.expansion;
            r.bound_ratio = (r.exact - r.expansion) / (lead * t * t);
        }
        rows.push_back(r);
    }
    return rows;
}

GammaMoment gamma_moments(int d) {
    if (d < 3) fail(ErrorCode::InvalidArgument, "the second moment needs d >= 3");
    boost::math::quadrature::exp_sinh<double> q;
    GammaMoment g;
    g.d = d;
    auto moment = [&](int k) {
        // the integrand underflows long before the quadrature's largest abscissa
        return q.integrate([k](double z) { return z > 40 ? 0.0 : std::exp(-z * z) * std::pow(z, k); }, 0.0, INFINITY, 1e-13);
    };
    g.top = moment(d - 1);
    g.second = moment(d - 3);
    g.top_expected = boost::math::tgamma(0.5 * d) / 2;
    g.second_expected = boost::math::tgamma(0.5 * d) / (d - 2);
    return g;
}

}  // namespace wavefront

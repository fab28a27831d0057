// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "wavefront/geometry.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ode.hpp"

namespace wavefront {

using jets::CJet;
using jets::Layout;

MetricModel MetricModel::sphere(double r_max) {
    MetricModel m;
    m.kind_ = ModelKind::Sphere2;
    m.chart_radius_ = r_max;
    m.inj_radius_ = M_PI;
    return m;
}

MetricModel MetricModel::hyperbolic(double r_max) {
    MetricModel m;
    m.kind_ = ModelKind::Hyperbolic2;
    m.chart_radius_ = r_max;
    m.inj_radius_ = INFINITY;
    return m;
}

MetricModel MetricModel::flat_torus(double lx, double ly) {
    if (!(lx > 0 && ly > 0)) fail(ErrorCode::InvalidArgument, "torus side lengths must be positive");
    MetricModel m;
    m.kind_ = ModelKind::FlatTorus2;
    m.lengths_ = Vec2(lx, ly);
    m.chart_radius_ = INFINITY;
    m.inj_radius_ = 0.5 * std::min(lx, ly);
    return m;
}

namespace {
double gaussian_curvature_conformal(const MetricModel& m, const Vec2& x);
double estimate_conformal_injectivity(const MetricModel& m);
}  // namespace

MetricModel MetricModel::conformal(std::vector<PolyTerm> f, double chart_radius, double injectivity_radius) {
    if (!(chart_radius > 0)) fail(ErrorCode::InvalidArgument, "conformal chart radius must be positive");
    for (const auto& t : f)
        if (t.i < 0 || t.j < 0) fail(ErrorCode::InvalidArgument, "negative exponent in conformal polynomial");
    MetricModel m;
    m.kind_ = ModelKind::ConformalCustom;
    m.terms_ = std::move(f);
    m.chart_radius_ = chart_radius;
    m.inj_radius_ = injectivity_radius > 0 ? injectivity_radius : estimate_conformal_injectivity(m);
    return m;
}

std::string MetricModel::kind_name() const {
    switch (kind_) {
        case ModelKind::Sphere2: return "sphere2";
        case ModelKind::Hyperbolic2: return "hyperbolic2";
        case ModelKind::FlatTorus2: return "flat_torus2";
        case ModelKind::ConformalCustom: return "conformal";
    }
    return "unknown";
}

MetricModel MetricModel::from_json_text(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorCode::ModelLoad, std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        std::string kind = j.at("kind").get<std::string>();
        json p = j.value("params", json::object());
        if (kind == "sphere2") return sphere(p.value("r_max", 1e3));
        if (kind == "hyperbolic2") return hyperbolic(p.value("r_max", INFINITY));
        if (kind == "flat_torus2") {
            if (p.contains("lengths")) {
                auto L = p.at("lengths").get<std::vector<double>>();
                if (L.size() != 2) fail(ErrorCode::ModelLoad, "flat_torus2 needs two side lengths");
                return flat_torus(L[0], L[1]);
            }
            double s = p.value("side", 2 * M_PI);
            return flat_torus(s, s);
        }
        if (kind == "conformal") {
            std::vector<PolyTerm> terms;
            for (const auto& row : p.at("coefficients")) {
                if (!row.is_array() || row.size() != 3) fail(ErrorCode::ModelLoad, "conformal coefficient rows are [i, j, c]");
                terms.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<double>()});
            }
            return conformal(std::move(terms), p.value("chart_radius", 2.0), p.value("injectivity_radius", -1.0));
        }
        fail(ErrorCode::ModelLoad, "unknown model kind '" + kind + "'");
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(ErrorCode::ModelLoad, std::string("malformed model definition: ") + e.what());
    }
}

MetricModel MetricModel::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ModelLoad, "cannot open model file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string MetricModel::to_json_text() const {
    using nlohmann::json;
    json j;
    j["kind"] = kind_name();
    json p = json::object();
    switch (kind_) {
        case ModelKind::Sphere2: p["r_max"] = chart_radius_; break;
        case ModelKind::Hyperbolic2:
            if (std::isfinite(chart_radius_)) p["r_max"] = chart_radius_;
            break;
        case ModelKind::FlatTorus2: p["lengths"] = {lengths_[0], lengths_[1]}; break;
        case ModelKind::ConformalCustom: {
            json rows = json::array();
            for (const auto& t : terms_) rows.push_back({t.i, t.j, t.c});
            p["coefficients"] = rows;
            p["chart_radius"] = chart_radius_;
            if (std::isfinite(inj_radius_)) p["injectivity_radius"] = inj_radius_;
            break;
        }
    }
    j["params"] = p;
    return j.dump();
}

double MetricModel::constant_curvature() const {
    switch (kind_) {
        case ModelKind::Sphere2: return 1;
        case ModelKind::Hyperbolic2: return -1;
        case ModelKind::FlatTorus2: return 0;
        case ModelKind::ConformalCustom: return NAN;
    }
    return NAN;
}

Vec2 MetricModel::switch_chart(const Vec2& x) const {
    double r2 = x.squaredNorm();
    if (r2 == 0) fail(ErrorCode::PointOutsideChart, "chart switch at the pole");
    return 4.0 * x / r2;
}

Mat2 MetricModel::switch_chart_jacobian(const Vec2& x) const {
    double r2 = x.squaredNorm();
    Mat2 J;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) J(i, j) = 4.0 * ((i == j ? r2 : 0.0) - 2 * x[i] * x[j]) / (r2 * r2);
    return J;
}

std::array<Mat2, 2> MetricModel::switch_chart_hessian(const Vec2& x) const {
    double r2 = x.squaredNorm(), r4 = r2 * r2, r6 = r4 * r2;
    std::array<Mat2, 2> H;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double dij = i == j, dik = i == k, djk = j == k;
                H[i](j, k) = -8 * dij * x[k] / r4 - 8 * (dik * x[j] + djk * x[i]) / r4 + 32 * x[i] * x[j] * x[k] / r6;
            }
    return H;
}

bool MetricModel::prefers_other_chart(const Vec2& x) const { return kind_ == ModelKind::Sphere2 && x.squaredNorm() > 4.0; }

Vec3 MetricModel::embed(const Vec2& x, int chart) const {
    if (kind_ == ModelKind::Sphere2) {
        double K2 = 0.25 * x.squaredNorm(), D = 1 + K2;
        double z = (K2 - 1) / D;
        return Vec3(x[0] / D, x[1] / D, chart == 0 ? z : -z);
    }
    if (kind_ == ModelKind::Hyperbolic2) return Vec3(x[0], x[1], std::sqrt(1 + x.squaredNorm()));
    fail(ErrorCode::InvalidArgument, "model has no closed-form embedding");
}

Mat32 MetricModel::embed_jacobian(const Vec2& x, int chart) const {
    Mat32 J;
    if (kind_ == ModelKind::Sphere2) {
        double u = x[0], v = x[1];
        double D = 1 + 0.25 * (u * u + v * v), D2 = D * D;
        double sgn = chart == 0 ? 1 : -1;
        J << 1 / D - u * u / (2 * D2), -u * v / (2 * D2), -u * v / (2 * D2), 1 / D - v * v / (2 * D2), sgn * u / D2,
            sgn * v / D2;
        return J;
    }
    if (kind_ == ModelKind::Hyperbolic2) {
        double s = std::sqrt(1 + x.squaredNorm());
        J << 1, 0, 0, 1, x[0] / s, x[1] / s;
        return J;
    }
    fail(ErrorCode::InvalidArgument, "model has no closed-form embedding");
}

Vec2 MetricModel::unembed(const Vec3& X, int chart) const {
    if (kind_ == ModelKind::Sphere2) {
        double den = chart == 0 ? 1 - X[2] : 1 + X[2];
        if (den <= 0) fail(ErrorCode::PointOutsideChart, "point at the excluded pole of the stereographic chart");
        Vec2 x(2 * X[0] / den, 2 * X[1] / den);
        if (!(x.norm() <= chart_radius_)) fail(ErrorCode::PointOutsideChart, "point beyond the chart radius limit");
        return x;
    }
    if (kind_ == ModelKind::Hyperbolic2) return Vec2(X[0], X[1]);
    fail(ErrorCode::InvalidArgument, "model has no closed-form embedding");
}

double MetricModel::ambient_dot(const Vec3& a, const Vec3& b) const {
    if (kind_ == ModelKind::Hyperbolic2) return a[0] * b[0] + a[1] * b[1] - a[2] * b[2];
    return a.dot(b);
}

void MetricModel::check_point(const Vec2& x) const {
    if (!std::isfinite(x[0]) || !std::isfinite(x[1])) fail(ErrorCode::PointOutsideChart, "non-finite chart point");
    if (kind_ == ModelKind::FlatTorus2) return;
    if (x.norm() > chart_radius_) fail(ErrorCode::PointOutsideChart, "chart point beyond the admissible radius");
}

Vec2 MetricModel::reduce(const Vec2& x) const {
    if (kind_ != ModelKind::FlatTorus2) return x;
    Vec2 r;
    for (int i = 0; i < 2; ++i) {
        r[i] = std::fmod(x[i], lengths_[i]);
        if (r[i] < 0) r[i] += lengths_[i];
    }
    return r;
}

Vec2 MetricModel::min_image(const Vec2& d) const {
    if (kind_ != ModelKind::FlatTorus2) return d;
    Vec2 r;
    for (int i = 0; i < 2; ++i) r[i] = d[i] - lengths_[i] * std::round(d[i] / lengths_[i]);
    return r;
}

MetricValue metric_at(const MetricModel& m, const Vec2& x) {
    m.check_point(x);
    double g11 = 0, g12 = 0, g22 = 0, h11 = 0, h12 = 0, h22 = 0;
    m.metric(x[0], x[1], g11, g12, g22);
    m.metric_inverse(x[0], x[1], h11, h12, h22);
    MetricValue r;
    r.g << g11, g12, g12, g22;
    r.g_inv << h11, h12, h12, h22;
    r.rho = m.density(x[0], x[1]);
    return r;
}

namespace {

Christoffel conformal_christoffel(const Vec2& df) {
    Christoffel G;
    for (int mu = 0; mu < 2; ++mu)
        for (int a = 0; a < 2; ++a)
            for (int n = 0; n < 2; ++n)
                G[mu](a, n) = (mu == a ? df[n] : 0.0) + (mu == n ? df[a] : 0.0) - (a == n ? df[mu] : 0.0);
    return G;
}

Vec2 poly_gradient(const std::vector<PolyTerm>& terms, const Vec2& x) {
    Vec2 g = Vec2::Zero();
    for (const auto& t : terms) {
        if (t.i > 0) g[0] += t.c * t.i * std::pow(x[0], t.i - 1) * std::pow(x[1], t.j);
        if (t.j > 0) g[1] += t.c * t.j * std::pow(x[0], t.i) * std::pow(x[1], t.j - 1);
    }
    return g;
}

double poly_laplacian(const std::vector<PolyTerm>& terms, const Vec2& x) {
    double s = 0;
    for (const auto& t : terms) {
        if (t.i > 1) s += t.c * t.i * (t.i - 1) * std::pow(x[0], t.i - 2) * std::pow(x[1], t.j);
        if (t.j > 1) s += t.c * t.j * (t.j - 1) * std::pow(x[0], t.i) * std::pow(x[1], t.j - 2);
    }
    return s;
}

double poly_value(const std::vector<PolyTerm>& terms, const Vec2& x) {
    double s = 0;
    for (const auto& t : terms) s += t.c * std::pow(x[0], t.i) * std::pow(x[1], t.j);
    return s;
}

// Metric jets around x: g, g^{-1} symmetric components as order-`order` jets in (u, v).
struct MetricJets {
    CJet g[2][2];
    CJet h[2][2];
};

MetricJets metric_jets(const MetricModel& m, const Vec2& x, int order) {
    const Layout& L = Layout::get(2, order);
    CJet u = CJet::variable(L, 0, x[0]), v = CJet::variable(L, 1, x[1]);
    MetricJets r;
    CJet a, b, c;
    m.metric(u, v, a, b, c);
    r.g[0][0] = a;
    r.g[0][1] = b;
    r.g[1][0] = b;
    r.g[1][1] = c;
    m.metric_inverse(u, v, a, b, c);
    r.h[0][0] = a;
    r.h[0][1] = b;
    r.h[1][0] = b;
    r.h[1][1] = c;
    return r;
}

// Gamma^mu_{alpha nu} as jets, one order below the metric jets
std::array<std::array<std::array<CJet, 2>, 2>, 2> christoffel_jets(const MetricJets& M) {
    std::array<std::array<std::array<CJet, 2>, 2>, 2> G;
    CJet dg[2][2][2];  // dg[k][i][j] = d_k g_ij
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) dg[k][i][j] = M.g[i][j].d(k);
    for (int mu = 0; mu < 2; ++mu)
        for (int a = 0; a < 2; ++a)
            for (int n = 0; n < 2; ++n) {
                CJet s = M.g[0][0] * 0.0;
                for (int k = 0; k < 2; ++k) s += M.h[mu][k] * (dg[a][k][n] + dg[n][k][a] - dg[k][a][n]);
                G[mu][a][n] = s * 0.5;
            }
    return G;
}

double gaussian_curvature_conformal(const MetricModel& m, const Vec2& x) {
    const auto& terms = m.conformal_terms();
    return -std::exp(-2 * poly_value(terms, x)) * poly_laplacian(terms, x);
}

}  // namespace

Christoffel christoffel_at(const MetricModel& m, const Vec2& x) {
    m.check_point(x);
    switch (m.kind()) {
        case ModelKind::Sphere2: {
            double D = 1 + 0.25 * x.squaredNorm();
            return conformal_christoffel(-0.5 * x / D);
        }
        case ModelKind::Hyperbolic2: {
            Christoffel G;
            double s2 = 1 + x.squaredNorm();
            for (int mu = 0; mu < 2; ++mu)
                for (int a = 0; a < 2; ++a)
                    for (int n = 0; n < 2; ++n) G[mu](a, n) = -x[mu] * ((a == n ? 1.0 : 0.0) - x[a] * x[n] / s2);
            return G;
        }
        case ModelKind::FlatTorus2: {
            Christoffel G;
            G[0].setZero();
            G[1].setZero();
            return G;
        }
        case ModelKind::ConformalCustom: return conformal_christoffel(poly_gradient(m.conformal_terms(), x));
    }
    fail(ErrorCode::Internal, "unknown model");
}

Christoffel christoffel_from_jets(const MetricModel& m, const Vec2& x) {
    m.check_point(x);
    auto G = christoffel_jets(metric_jets(m, x, 1));
    Christoffel r;
    for (int mu = 0; mu < 2; ++mu)
        for (int a = 0; a < 2; ++a)
            for (int n = 0; n < 2; ++n) r[mu](a, n) = G[mu][a][n].value().real();
    return r;
}

Curvature curvature_from_jets(const MetricModel& m, const Vec2& x) {
    m.check_point(x);
    MetricJets M = metric_jets(m, x, 2);
    auto G = christoffel_jets(M);
    auto Gv = [&](int r, int a, int b) { return G[r][a][b].value().real(); };
    auto dG = [&](int k, int r, int a, int b) { return G[r][a][b].d(k).value().real(); };
    Curvature c;
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
            for (int mu = 0; mu < 2; ++mu)
                for (int n = 0; n < 2; ++n) {
                    double val = dG(mu, r, n, s) - dG(n, r, mu, s);
                    for (int l = 0; l < 2; ++l) val += Gv(r, mu, l) * Gv(l, n, s) - Gv(r, n, l) * Gv(l, mu, s);
                    c.riemann[((r * 2 + s) * 2 + mu) * 2 + n] = val;
                }
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < 2; ++n) {
            double v = 0;
            for (int r = 0; r < 2; ++r) v += c.riemann[((r * 2 + s) * 2 + r) * 2 + n];
            c.ricci(s, n) = v;
        }
    c.scalar = 0;
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < 2; ++n) c.scalar += M.h[s][n].value().real() * c.ricci(s, n);
    return c;
}

Curvature curvature_at(const MetricModel& m, const Vec2& x) {
    if (m.kind() == ModelKind::ConformalCustom) return curvature_from_jets(m, x);
    MetricValue mv = metric_at(m, x);
    double K = m.constant_curvature();
    Curvature c;
    for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
            for (int mu = 0; mu < 2; ++mu)
                for (int n = 0; n < 2; ++n)
                    c.riemann[((r * 2 + s) * 2 + mu) * 2 + n] =
                        K * ((r == mu ? mv.g(s, n) : 0.0) - (r == n ? mv.g(s, mu) : 0.0));
    c.ricci = K * mv.g;
    c.scalar = 2 * K;
    return c;
}

// ---- geodesics ----

namespace {

struct ShotGeodesic {
    Vec2 x;
    Vec2 v;
    Vec2 covector;
};

// Integrates the geodesic equation of a conformal metric over s in [0, 1], optionally
// transporting a covector.
ShotGeodesic shoot_conformal(const MetricModel& m, const Vec2& p, const Vec2& v, const Vec2& xi) {
    ode::State<6> s{p[0], p[1], v[0], v[1], xi[0], xi[1]};
    const auto& terms = m.conformal_terms();
    double R = m.chart_radius();
    auto rhs = [&](double, const ode::State<6>& y, ode::State<6>& dy) {
        Vec2 x(y[0], y[1]), xd(y[2], y[3]), c(y[4], y[5]);
        if (!(x.norm() <= 4 * R)) fail(ErrorCode::OutsideInjectivityRadius, "geodesic left the chart during shooting");
        Christoffel G = conformal_christoffel(poly_gradient(terms, x));
        for (int mu = 0; mu < 2; ++mu) {
            dy[mu] = xd[mu];
            dy[2 + mu] = -xd.dot(G[mu] * xd);
        }
        for (int a = 0; a < 2; ++a) {
            double t = 0;
            for (int mu = 0; mu < 2; ++mu) t += c[mu] * G[mu].row(a).dot(xd);
            dy[4 + a] = t;
        }
    };
    ode::integrate<6>(rhs, s, 0.0, 1.0, 1e-13, 1e-13);
    return {Vec2(s[0], s[1]), Vec2(s[2], s[3]), Vec2(s[4], s[5])};
}

Vec2 conformal_exp_inverse(const MetricModel& m, const Vec2& p, const Vec2& q) {
    Vec2 v = q - p;
    if (v.norm() == 0) return v;
    const double scale = 1 + q.norm();
    for (int it = 0; it < 60; ++it) {
        Vec2 F = shoot_conformal(m, p, v, Vec2::Zero()).x - q;
        if (F.norm() < 1e-14 * scale) break;
        Mat2 J;
        double hstep = 1e-7 * std::max(1.0, v.norm());
        for (int k = 0; k < 2; ++k) {
            Vec2 dv = Vec2::Zero();
            dv[k] = hstep;
            Vec2 Fp = shoot_conformal(m, p, v + dv, Vec2::Zero()).x;
            Vec2 Fm = shoot_conformal(m, p, v - dv, Vec2::Zero()).x;
            J.col(k) = (Fp - Fm) / (2 * hstep);
        }
        if (std::abs(J.determinant()) < 1e-14) fail(ErrorCode::OutsideInjectivityRadius, "shooting hit a conjugate point");
        Vec2 step = J.lu().solve(F);
        // backtracking on the residual
        double lam = 1;
        Vec2 trial;
        for (int b = 0; b < 20; ++b) {
            trial = v - lam * step;
            try {
                if ((shoot_conformal(m, p, trial, Vec2::Zero()).x - q).norm() < F.norm()) break;
            } catch (const Error&) {
            }
            lam *= 0.5;
        }
        v = trial;
        if (it == 59) fail(ErrorCode::OutsideInjectivityRadius, "geodesic shooting did not converge");
    }
    double len = std::exp(poly_value(m.conformal_terms(), p)) * v.norm();
    if (len >= m.injectivity_radius())
        fail(ErrorCode::OutsideInjectivityRadius, "target lies outside the estimated injectivity ball");
    return v;
}

double estimate_conformal_injectivity(const MetricModel& m) {
    // First conjugate distance along sampled unit-speed geodesics: j'' + K j = 0.
    double best = INFINITY;
    const double R = m.chart_radius();
    const auto& terms = m.conformal_terms();
    std::vector<Vec2> bases{Vec2(0, 0), Vec2(0.5 * R, 0), Vec2(-0.5 * R, 0), Vec2(0, 0.5 * R), Vec2(0, -0.5 * R)};
    for (const auto& b : bases) {
        for (int k = 0; k < 12; ++k) {
            double a = 2 * M_PI * k / 12;
            double e = std::exp(-poly_value(terms, b));
            ode::State<6> s{b[0], b[1], e * std::cos(a), e * std::sin(a), 0.0, 1.0};
            double conj = INFINITY;
            double last_j = 0;
            struct Stop {};
            auto rhs = [&](double, const ode::State<6>& y, ode::State<6>& dy) {
                Vec2 x(y[0], y[1]), xd(y[2], y[3]);
                Christoffel G = conformal_christoffel(poly_gradient(terms, x));
                for (int mu = 0; mu < 2; ++mu) {
                    dy[mu] = xd[mu];
                    dy[2 + mu] = -xd.dot(G[mu] * xd);
                }
                dy[4] = y[5];
                dy[5] = -gaussian_curvature_conformal(m, x) * y[4];
            };
            try {
                ode::integrate_observed<6>(rhs, s, 0.0, 4 * R * std::exp(-poly_value(terms, b)) + 10.0, 1e-9, 1e-9,
                                           [&](const ode::State<6>& y, double t) {
                                               if (t > 0 && last_j > 0 && y[4] <= 0 && !std::isfinite(conj)) conj = t;
                                               last_j = y[4];
                                               if (Vec2(y[0], y[1]).norm() > R || std::isfinite(conj)) throw Stop{};
                                           });
            } catch (const Stop&) {
            } catch (const Error&) {
            }
            best = std::min(best, conj);
        }
    }
    return best;
}

}  // namespace

double geodesic_distance(const MetricModel& m, const Vec2& p, const Vec2& q) {
    m.check_point(p);
    m.check_point(q);
    switch (m.kind()) {
        case ModelKind::Sphere2: {
            Vec3 P = m.embed(p), Q = m.embed(q);
            return std::atan2(P.cross(Q).norm(), P.dot(Q));
        }
        case ModelKind::Hyperbolic2: {
            Vec3 P = m.embed(p), Q = m.embed(q), D = Q - P;
            double s = std::max(0.0, m.ambient_dot(D, D));
            return 2 * std::asinh(0.5 * std::sqrt(s));
        }
        case ModelKind::FlatTorus2: return m.min_image(q - p).norm();
        case ModelKind::ConformalCustom: {
            Vec2 v = conformal_exp_inverse(m, p, q);
            return std::exp(poly_value(m.conformal_terms(), p)) * v.norm();
        }
    }
    fail(ErrorCode::Internal, "unknown model");
}

Vec2 exp_map(const MetricModel& m, const Vec2& p, const Vec2& v) {
    m.check_point(p);
    switch (m.kind()) {
        case ModelKind::Sphere2:
        case ModelKind::Hyperbolic2: {
            Vec3 P = m.embed(p);
            Vec3 V = m.embed_jacobian(p) * v;
            double n = std::sqrt(std::max(0.0, m.ambient_dot(V, V)));
            if (n == 0) return p;
            Vec3 Q = m.kind() == ModelKind::Sphere2 ? Vec3(std::cos(n) * P + std::sin(n) / n * V)
                                                    : Vec3(std::cosh(n) * P + std::sinh(n) / n * V);
            return m.unembed(Q);
        }
        case ModelKind::FlatTorus2: return m.reduce(p + v);
        case ModelKind::ConformalCustom: {
            Vec2 q = shoot_conformal(m, p, v, Vec2::Zero()).x;
            m.check_point(q);
            return q;
        }
    }
    fail(ErrorCode::Internal, "unknown model");
}

namespace {
// ambient tangent vector at P pointing to Q with length dist(P, Q)
Vec3 ambient_log(const MetricModel& m, const Vec3& P, const Vec3& Q, double& dist) {
    if (m.kind() == ModelKind::Sphere2) {
        double c = P.dot(Q);
        Vec3 W = Q - c * P;
        dist = std::atan2(W.norm(), c);
        if (dist > M_PI - 1e-9) fail(ErrorCode::OutsideInjectivityRadius, "antipodal points have no unique geodesic");
        double f = dist < 1e-8 ? 1 + dist * dist / 6 : dist / std::sin(dist);
        return f * W;
    }
    double c = -m.ambient_dot(P, Q);
    Vec3 W = Q - c * P;
    Vec3 D = Q - P;
    dist = 2 * std::asinh(0.5 * std::sqrt(std::max(0.0, m.ambient_dot(D, D))));
    double f = dist < 1e-8 ? 1 - dist * dist / 6 : dist / std::sinh(dist);
    return f * W;
}

Vec2 ambient_to_chart_vector(const MetricModel& m, const Vec2& p, const Vec3& V) {
    Mat32 J = m.embed_jacobian(p);
    Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
    if (m.kind() == ModelKind::Hyperbolic2) A(2, 2) = -1;
    Mat2 g = J.transpose() * A * J;
    return g.ldlt().solve(J.transpose() * A * V);
}
}  // namespace

Vec2 exp_inverse(const MetricModel& m, const Vec2& p, const Vec2& q) {
    m.check_point(p);
    m.check_point(q);
    switch (m.kind()) {
        case ModelKind::Sphere2:
        case ModelKind::Hyperbolic2: {
            double d;
            Vec3 V = ambient_log(m, m.embed(p), m.embed(q), d);
            return ambient_to_chart_vector(m, p, V);
        }
        case ModelKind::FlatTorus2: {
            Vec2 d = m.min_image(q - p);
            const Vec2& L = m.torus_lengths();
            if (std::abs(d[0]) >= 0.5 * L[0] || std::abs(d[1]) >= 0.5 * L[1])
                fail(ErrorCode::OutsideInjectivityRadius, "torus points are at a cut point");
            return d;
        }
        case ModelKind::ConformalCustom: return conformal_exp_inverse(m, p, q);
    }
    fail(ErrorCode::Internal, "unknown model");
}

GeodesicSegment geodesic_segment(const MetricModel& m, const Vec2& p, const Vec2& q) {
    GeodesicSegment s;
    s.p = p;
    s.q = q;
    s.initial_velocity = exp_inverse(m, p, q);
    MetricValue mv = metric_at(m, p);
    s.length = std::sqrt(std::max(0.0, s.initial_velocity.dot(mv.g * s.initial_velocity)));
    return s;
}

Vec2 parallel_transport(const MetricModel& m, const Vec2& xi, const Vec2& p, const Vec2& q) {
    m.check_point(p);
    m.check_point(q);
    switch (m.kind()) {
        case ModelKind::Sphere2:
        case ModelKind::Hyperbolic2: {
            const bool sph = m.kind() == ModelKind::Sphere2;
            Vec3 P = m.embed(p), Q = m.embed(q);
            Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
            if (!sph) A(2, 2) = -1;
            Mat32 Jp = m.embed_jacobian(p), Jq = m.embed_jacobian(q);
            Mat2 gp = Jp.transpose() * A * Jp;
            Vec3 X = Jp * gp.ldlt().solve(xi);
            double d;
            Vec3 V = ambient_log(m, P, Q, d);
            Vec3 Xq = X;
            if (d > 0) {
                Vec3 T = V / d;
                double a = m.ambient_dot(X, T);
                Vec3 N = X - a * T;
                Vec3 Tq = sph ? Vec3(-std::sin(d) * P + std::cos(d) * T) : Vec3(std::sinh(d) * P + std::cosh(d) * T);
                Xq = a * Tq + N;
            }
            return Jq.transpose() * A * Xq;
        }
        case ModelKind::FlatTorus2: return xi;
        case ModelKind::ConformalCustom: {
            Vec2 v = conformal_exp_inverse(m, p, q);
            return shoot_conformal(m, p, v, xi).covector;
        }
    }
    fail(ErrorCode::Internal, "unknown model");
}

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::PointOutsideChart: return "PointOutsideChart";
        case ErrorCode::OutsideInjectivityRadius: return "OutsideInjectivityRadius";
        case ErrorCode::ZeroCovector: return "ZeroCovector";
        case ErrorCode::IntegratorDivergence: return "IntegratorDivergence";
        case ErrorCode::OutsideGeodesicNeighbourhood: return "OutsideGeodesicNeighbourhood";
        case ErrorCode::BranchDegenerate: return "BranchDegenerate";
        case ErrorCode::NotALoop: return "NotALoop";
        case ErrorCode::SingularPhaseHessian: return "SingularPhaseHessian";
        case ErrorCode::JetOrderInsufficient: return "JetOrderInsufficient";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
        case ErrorCode::NoStationaryDirection: return "NoStationaryDirection";
        case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
        case ErrorCode::SpectrumTruncated: return "SpectrumTruncated";
        case ErrorCode::NonAnalyticCall: return "NonAnalyticCall";
        case ErrorCode::OrderExceeded: return "OrderExceeded";
        case ErrorCode::ModelLoad: return "ModelLoad";
        case ErrorCode::ConfigParse: return "ConfigParse";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace wavefront

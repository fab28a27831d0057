// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "wavefront/errors.hpp"
#include "wavefront/jets.hpp"

namespace wavefront {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using CVec2 = Eigen::Vector2cd;
using CMat2 = Eigen::Matrix2cd;
using cplx = std::complex<double>;

// Gamma[mu](alpha, nu) = Gamma^mu_{alpha nu}
using Christoffel = std::array<Mat2, 2>;

enum class ModelKind { Sphere2, Hyperbolic2, FlatTorus2, ConformalCustom };

// f(u, v) = sum c u^i v^j, metric e^{2f} delta
struct PolyTerm {
    int i = 0;
    int j = 0;
    double c = 0;
};

namespace detail {
inline double lift_constant(const double&, double c) { return c; }
inline jets::CJet lift_constant(const jets::CJet& ref, double c) { return jets::CJet(ref.layout(), c); }
inline double exp_of(const double& x) { return std::exp(x); }
inline jets::CJet exp_of(const jets::CJet& x) { return jets::exp(x); }
inline double sqrt_of(const double& x) { return std::sqrt(x); }
inline jets::CJet sqrt_of(const jets::CJet& x) { return jets::sqrt(x); }
inline double inv_of(const double& x) { return 1.0 / x; }
inline jets::CJet inv_of(const jets::CJet& x) { return jets::inv(x); }
}  // namespace detail

class MetricModel {
public:
    static MetricModel sphere(double r_max = 1e3);
    static MetricModel hyperbolic(double r_max = INFINITY);
    static MetricModel flat_torus(double lx, double ly);
    static MetricModel conformal(std::vector<PolyTerm> f, double chart_radius, double injectivity_radius = -1);
    static MetricModel from_json_text(const std::string& text);
    static MetricModel from_file(const std::string& path);
    std::string to_json_text() const;

    ModelKind kind() const { return kind_; }
    std::string kind_name() const;
    int dim() const { return 2; }
    double injectivity_radius() const { return inj_radius_; }
    double chart_radius() const { return chart_radius_; }
    const Vec2& torus_lengths() const { return lengths_; }
    const std::vector<PolyTerm>& conformal_terms() const { return terms_; }

    // Constant-curvature built-ins have closed-form geometry through an embedding:
    // unit sphere in R^3, or the hyperboloid in Minkowski space (signature +,+,-).
    bool has_embedding() const { return kind_ == ModelKind::Sphere2 || kind_ == ModelKind::Hyperbolic2; }
    // +1 for the sphere, -1 for the hyperboloid, 0 for flat, NaN for custom
    double constant_curvature() const;

    // The stereographic sphere carries a second chart (inversion x -> 4x/|x|^2) used to
    // pass the north pole. The metric has the same expression in both charts.
    int chart_count() const { return kind_ == ModelKind::Sphere2 ? 2 : 1; }
    Vec2 switch_chart(const Vec2& x) const;            // involution between the two charts
    Mat2 switch_chart_jacobian(const Vec2& x) const;   // d(switch)/dx at x
    // second derivatives: H[k](i,j) = d^2 switch_k / dx_i dx_j
    std::array<Mat2, 2> switch_chart_hessian(const Vec2& x) const;
    // the chart in which a point is best represented (sphere: |x| <= 2 in either chart)
    bool prefers_other_chart(const Vec2& x) const;

    Vec3 embed(const Vec2& x, int chart = 0) const;
    Mat32 embed_jacobian(const Vec2& x, int chart = 0) const;
    Vec2 unembed(const Vec3& X, int chart = 0) const;
    double ambient_dot(const Vec3& a, const Vec3& b) const;

    void check_point(const Vec2& x) const;  // throws PointOutsideChart
    Vec2 reduce(const Vec2& x) const;        // torus: wrap into the fundamental cell
    Vec2 min_image(const Vec2& d) const;     // torus: shortest lattice representative

    // Metric coefficients with scalar or jet-valued chart coordinates.
    template <class S>
    void metric(const S& u, const S& v, S& g11, S& g12, S& g22) const;
    template <class S>
    void metric_inverse(const S& u, const S& v, S& h11, S& h12, S& h22) const;
    template <class S>
    S density(const S& u, const S& v) const;
    template <class S>
    S conformal_exponent(const S& u, const S& v) const;

private:
    ModelKind kind_ = ModelKind::Sphere2;
    double chart_radius_ = 1e3;
    double inj_radius_ = M_PI;
    Vec2 lengths_ = Vec2(2 * M_PI, 2 * M_PI);
    std::vector<PolyTerm> terms_;
};

struct MetricValue {
    Mat2 g;
    Mat2 g_inv;
    double rho;
};

struct Curvature {
    // riemann[((r*2+s)*2+m)*2+n] = R^r_{s m n}
    std::array<double, 16> riemann{};
    Mat2 ricci;
    double scalar = 0;
};

struct GeodesicSegment {
    Vec2 p, q;
    Vec2 initial_velocity;
    double length = 0;
};

MetricValue metric_at(const MetricModel& m, const Vec2& x);
Christoffel christoffel_at(const MetricModel& m, const Vec2& x);
// Levi-Civita connection computed from a jet of the metric; independent of the closed forms.
Christoffel christoffel_from_jets(const MetricModel& m, const Vec2& x);
Curvature curvature_at(const MetricModel& m, const Vec2& x);
Curvature curvature_from_jets(const MetricModel& m, const Vec2& x);

double geodesic_distance(const MetricModel& m, const Vec2& p, const Vec2& q);
Vec2 exp_map(const MetricModel& m, const Vec2& p, const Vec2& v);
Vec2 exp_inverse(const MetricModel& m, const Vec2& p, const Vec2& q);
GeodesicSegment geodesic_segment(const MetricModel& m, const Vec2& p, const Vec2& q);
// covector xi at p transported along the shortest geodesic to q
Vec2 parallel_transport(const MetricModel& m, const Vec2& xi, const Vec2& p, const Vec2& q);

// ---- template definitions ----

template <class S>
S MetricModel::conformal_exponent(const S& u, const S& v) const {
    S f = detail::lift_constant(u, 0.0);
    for (const auto& t : terms_) {
        S m = detail::lift_constant(u, t.c);
        for (int k = 0; k < t.i; ++k) m = m * u;
        for (int k = 0; k < t.j; ++k) m = m * v;
        f = f + m;
    }
    return f;
}

template <class S>
void MetricModel::metric(const S& u, const S& v, S& g11, S& g12, S& g22) const {
    switch (kind_) {
        case ModelKind::Sphere2: {
            S D = (u * u + v * v) * 0.25 + 1.0;
            S lam = detail::inv_of(D * D);
            g11 = lam;
            g12 = detail::lift_constant(u, 0.0);
            g22 = lam;
            break;
        }
        case ModelKind::Hyperbolic2: {
            S s = detail::inv_of(u * u + v * v + 1.0);
            g11 = (v * v + 1.0) * s;
            g12 = -(u * v) * s;
            g22 = (u * u + 1.0) * s;
            break;
        }
        case ModelKind::FlatTorus2:
            g11 = detail::lift_constant(u, 1.0);
            g12 = detail::lift_constant(u, 0.0);
            g22 = detail::lift_constant(u, 1.0);
            break;
        case ModelKind::ConformalCustom: {
            S e = detail::exp_of(conformal_exponent(u, v) * 2.0);
            g11 = e;
            g12 = detail::lift_constant(u, 0.0);
            g22 = e;
            break;
        }
    }
}

template <class S>
void MetricModel::metric_inverse(const S& u, const S& v, S& h11, S& h12, S& h22) const {
    switch (kind_) {
        case ModelKind::Sphere2: {
            S D = (u * u + v * v) * 0.25 + 1.0;
            S lam = D * D;
            h11 = lam;
            h12 = detail::lift_constant(u, 0.0);
            h22 = lam;
            break;
        }
        case ModelKind::Hyperbolic2:
            h11 = u * u + 1.0;
            h12 = u * v;
            h22 = v * v + 1.0;
            break;
        case ModelKind::FlatTorus2:
            h11 = detail::lift_constant(u, 1.0);
            h12 = detail::lift_constant(u, 0.0);
            h22 = detail::lift_constant(u, 1.0);
            break;
        case ModelKind::ConformalCustom: {
            S e = detail::exp_of(conformal_exponent(u, v) * -2.0);
            h11 = e;
            h12 = detail::lift_constant(u, 0.0);
            h22 = e;
            break;
        }
    }
}

template <class S>
S MetricModel::density(const S& u, const S& v) const {
    switch (kind_) {
        case ModelKind::Sphere2: {
            S D = (u * u + v * v) * 0.25 + 1.0;
            return detail::inv_of(D * D);
        }
        case ModelKind::Hyperbolic2:
            return detail::inv_of(detail::sqrt_of(u * u + v * v + 1.0));
        case ModelKind::FlatTorus2:
            return detail::lift_constant(u, 1.0);
        case ModelKind::ConformalCustom:
            return detail::exp_of(conformal_exponent(u, v) * 2.0);
    }
    return detail::lift_constant(u, 1.0);
}

}  // namespace wavefront

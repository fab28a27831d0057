#include <doctest.h>

#include <random>

#include "wavefront/phase.hpp"

using namespace wavefront;

namespace {

const cplx I(0, 1);

double max_abs(const CMat2& a) { return a.cwiseAbs().maxCoeff(); }

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

CMat2 sphere_display(const Vec2& eta, double t, double eps) {
    // cos^2(t/2) [ I - c (eta_perp eta_perp^T)/|eta|^2 ] with c = 1 - cos t + i eps sin t
    cplx c = 1 - std::cos(t) + I * eps * std::sin(t);
    double n2 = eta.squaredNorm();
    CMat2 A;
    A << 1.0 - c * eta(1) * eta(1) / n2, c * eta(0) * eta(1) / n2, c * eta(0) * eta(1) / n2, 1.0 - c * eta(0) * eta(0) / n2;
    return std::pow(std::cos(t / 2), 2) * A;
}

// The imaginary parts carry the sign of -i eps h g dx*/deta, as on the sphere and the torus:
// every model starts as 1 - i eps t.
CMat2 hyperbolic_display(const Vec2& eta, double t, double eps) {
    double n2 = eta.squaredNorm();
    cplx ch = std::cosh(t) - I * eps * std::sinh(t);
    cplx off = -eta(0) * eta(1) * std::tanh(t) * (std::sinh(t) - I * eps * std::cosh(t));
    CMat2 A;
    A << eta(0) * eta(0) / std::cosh(t) + eta(1) * eta(1) * ch, off, off, eta(1) * eta(1) / std::cosh(t) + eta(0) * eta(0) * ch;
    return A / n2;
}

}  // namespace

TEST_CASE("phase vanishes on the flow with the right first derivatives") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    for (const auto& m : {MetricModel::sphere(), MetricModel::hyperbolic(), MetricModel::flat_torus(2 * M_PI, 3.0)})
        for (double eps : {0.0, 0.3, 1.0})
            for (int k = 0; k < 8; ++k) {
                Vec2 y(0.5 * U(rng), 0.5 * U(rng)), eta(U(rng), U(rng));
                double t = 0.1 + 2.5 * std::abs(U(rng));
                if (m.kind() == ModelKind::Sphere2 && eps == 0 && std::abs(std::fmod(t, M_PI) - M_PI / 2) < 0.2) t += 0.5;
                FlowState s = flow_sample(m, y, eta, t);
                PhaseEval p = phase_eval(m, t, s.x_star, y, eta, eps, s.chart);
                CHECK(std::abs(p.value) < 1e-12);
                CHECK((p.d_x - s.xi_star.cast<cplx>()).norm() < 1e-10 * (1 + s.xi_star.norm()));
                CHECK(p.d_eta.norm() < 1e-10 * (1 + s.dx_deta.norm()));
                // Hamiltonian preserved: phi_t = -h on the flow
                CHECK(std::abs(p.d_t + hamiltonian(m, y, eta)) < 1e-8);
                if (eps > 0) CHECK(std::abs(p.d_x_d_eta.determinant()) > 1e-6);
                // nearby points have Im phi >= 0
                for (int j = 0; j < 4; ++j) {
                    Vec2 x = s.x_star + 0.05 * Vec2(U(rng), U(rng));
                    PhaseEval q = phase_eval(m, t, x, y, eta, eps, s.chart);
                    CHECK(q.value.imag() >= -1e-14);
                }
            }
}

TEST_CASE("phase is homogeneous of degree one") {
    auto m = MetricModel::sphere();
    Vec2 y(0.2, -0.1), eta(0.7, 0.4);
    FlowState s = flow_sample(m, y, eta, 1.3);
    Vec2 x = s.x_star + Vec2(0.07, -0.04);
    for (double lam : {0.5, 3.0}) {
        cplx a = phase_eval(m, 1.3, x, y, lam * eta, 0.8, s.chart).value;
        cplx b = phase_eval(m, 1.3, x, y, eta, 0.8, s.chart).value;
        CHECK(std::abs(a - lam * b) < 1e-12);
    }
}

TEST_CASE("real and imaginary parts through exp inverse and distance") {
    auto m = MetricModel::hyperbolic();
    Vec2 y(0.1, 0.3), eta(-0.6, 1.1);
    double eps = 0.7, t = 0.9;
    FlowState s = flow_sample(m, y, eta, t);
    double h = hamiltonian(m, y, eta);
    for (Vec2 dx : {Vec2(0.1, 0.0), Vec2(-0.2, 0.15), Vec2(0.05, -0.3)}) {
        Vec2 x = s.x_star + dx;
        cplx p = phase_eval(m, t, x, y, eta, eps).value;
        Vec2 v = exp_inverse(m, s.x_star, x);
        double d = geodesic_distance(m, s.x_star, x);
        CHECK(p.real() == doctest::Approx(s.xi_star.dot(v)).epsilon(1e-9));
        CHECK(p.imag() == doctest::Approx(0.5 * eps * h * d * d).epsilon(1e-9));
    }
}

TEST_CASE("sphere phase in normal coordinates at time zero") {
    auto m = MetricModel::sphere();
    Vec2 eta(1.2, -0.5);
    const double eps = 1.0;
    // the stereographic chart agrees with normal coordinates at the origin up to third order
    double prev = 0;
    for (double r : {0.02, 0.01}) {
        Vec2 x = r * Vec2(0.6, 0.8);
        cplx p = phase_eval(m, 0.0, x, Vec2(0, 0), eta, eps, 0).value;
        cplx model = x.dot(eta) + 0.5 * I * eps * eta.norm() * x.squaredNorm();
        double err = std::abs(p - model);
        CHECK(err < 2 * r * r * r);
        if (prev > 0) CHECK(err < prev / 6);
        prev = err;
    }
}

TEST_CASE("flat torus phase is the explicit quadratic") {
    auto m = MetricModel::flat_torus(2 * M_PI, 4.0);
    Vec2 y(0.3, 1.0), eta(1.5, -0.7);
    double eps = 0.6, t = 2.2;
    FlowState s = flow_sample(m, y, eta, t);
    for (Vec2 dx : {Vec2(0.3, -0.2), Vec2(-1.0, 0.4), Vec2(0.0, 0.9)}) {
        Vec2 x = m.reduce(s.x_star + dx);
        Vec2 d = m.min_image(x - s.x_star);
        cplx expect = d.dot(eta) + 0.5 * I * eps * eta.norm() * d.squaredNorm();
        CHECK(std::abs(phase_eval(m, t, x, y, eta, eps).value - expect) < 1e-12);
    }
}

TEST_CASE("phase errors outside the geodesic neighbourhood") {
    auto m = MetricModel::sphere();
    Vec2 eta(1, 0);
    // antipode of x*(0) = 0 in chart 1 is the origin of that chart
    CHECK(code_of([&] { phase_eval(m, 0.0, Vec2(0, 0), Vec2(0, 0), eta, 1.0, 1); }) == ErrorCode::OutsideGeodesicNeighbourhood);
    CHECK(code_of([&] { phase_eval(m, 0.0, Vec2(0.1, 0), Vec2(0, 0), Vec2(0, 0), 1.0, 0); }) == ErrorCode::ZeroCovector);
}

TEST_CASE("phi_xeta on the flow against the closed displays") {
    Vec2 eta(0.8, -1.3);
    for (double eps : {0.0, 0.5, 1.0})
        for (double t : {0.0, 0.4, 1.1, 2.3, 2.9}) {
            auto sph = MetricModel::sphere();
            FlowState s = flow_sample(sph, Vec2(0, 0), eta, t);
            if (s.chart == 1) s = to_other_chart(sph, s);
            CHECK(max_abs(phi_x_eta_on_flow(sph, s, Vec2(0, 0), eta, eps) - sphere_display(eta, t, eps)) < 1e-12);
            auto hyp = MetricModel::hyperbolic();
            FlowState r = flow_sample(hyp, Vec2(0, 0), eta, t);
            CHECK(max_abs(phi_x_eta_on_flow(hyp, r, Vec2(0, 0), eta, eps) - hyperbolic_display(eta, t, eps)) < 1e-11 * std::cosh(t));
        }
    // t = 0 is the identity for every model
    auto cus = MetricModel::conformal({{2, 0, 0.1}, {0, 2, -0.05}}, 2.0);
    FlowState s0 = flow_sample(cus, Vec2(0.2, 0.1), eta, 0.0);
    CHECK(max_abs(phi_x_eta_on_flow(cus, s0, Vec2(0.2, 0.1), eta, 1.0) - CMat2::Identity()) < 1e-14);
}

TEST_CASE("phi_xeta formula agrees with the phase jet") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    for (const auto& m : {MetricModel::sphere(), MetricModel::hyperbolic()})
        for (int k = 0; k < 10; ++k) {
            Vec2 y(0.5 * U(rng), 0.5 * U(rng)), eta(U(rng), U(rng));
            double t = 0.1 + 3.0 * std::abs(U(rng)), eps = std::abs(U(rng));
            FlowState s = flow_sample(m, y, eta, t);
            PhaseEval p = phase_eval(m, t, s.x_star, y, eta, eps, s.chart);
            CMat2 F = phi_x_eta_on_flow(m, s, y, eta, eps);
            CHECK(max_abs(p.d_x_d_eta - F) < 1e-7 * (1 + max_abs(F)));
            PhaseJets J(m, t, y, eta, eps);
            const auto& phi = J.phi(0);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) CHECK(std::abs(phi.d(a).d(2 + b).value() - F(a, b)) < 1e-7 * (1 + max_abs(F)));
        }
}

TEST_CASE("scalar part of the weight") {
    std::vector<double> grid;
    for (int k = 1; k <= 80; ++k) grid.push_back(k * 0.08);
    Vec2 eta(0.3, 0.9);
    for (double eps : {0.0, 0.5, 1.0}) {
        auto sph = MetricModel::sphere();
        for (double t : grid) {
            if (eps == 0 && std::abs(std::remainder(t - M_PI / 2, M_PI)) < 0.05) continue;
            FlowState s = flow_sample(sph, Vec2(0, 0), eta, t);
            cplx v = phase_scalar_part(sph, s, Vec2(0, 0), eta, eps);
            CHECK(std::abs(v - (std::cos(t) - I * eps * std::sin(t))) < 1e-8);
        }
        auto hyp = MetricModel::hyperbolic();
        for (double t : grid) {
            FlowState s = flow_sample(hyp, Vec2(0, 0), eta, t);
            cplx v = phase_scalar_part(hyp, s, Vec2(0, 0), eta, eps);
            CHECK(std::abs(v - (std::cosh(t) - I * eps * std::sinh(t))) < 1e-8 * std::cosh(t));
        }
    }
}

TEST_CASE("weight along a trajectory") {
    auto m = MetricModel::sphere();
    Vec2 y(0.4, -0.3), eta(1.0, 0.6);
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(k * 4 * M_PI / 200);
    auto W = weight_along(m, y, eta, 1.0, grid);
    REQUIRE(W.size() == grid.size());
    CHECK(W[0].branch_arg == 0);
    // x = y at t = 0, so w = 1/rho(y) in the chart
    CHECK(std::abs(W[0].value - 1.0 / m.density(y(0), y(1))) < 1e-14);
    auto states = flow_samples(m, y, eta, grid);
    for (size_t k = 0; k < W.size(); ++k) {
        const auto& s = states[k];
        double rx = m.density(s.x_star(0), s.x_star(1)), ry = m.density(y(0), y(1));
        cplx w4 = std::pow(W[k].value, 4) * rx * rx * ry * ry;
        CHECK(std::abs(w4 - W[k].det2) < 1e-10 * std::abs(W[k].det2));
        if (k > 0) CHECK(std::abs(W[k].branch_arg - W[k - 1].branch_arg) < 0.5);
    }
    // arg(cos t - i sin t)^2 = -2t, continued
    CHECK(W.back().branch_arg == doctest::Approx(-8 * M_PI).epsilon(1e-9));
}

TEST_CASE("real phase degenerates at the first conjugate time on the sphere") {
    auto m = MetricModel::sphere();
    CHECK(code_of([&] { weight_along(m, Vec2(0, 0), Vec2(1, 0), 0.0, {0.5, 1.0, 2.0}); }) == ErrorCode::BranchDegenerate);
    CHECK(code_of([&] { weight_along(m, Vec2(0, 0), Vec2(1, 0), 0.0, {M_PI / 2}); }) == ErrorCode::BranchDegenerate);
    // before it nothing goes wrong
    auto W = weight_along(m, Vec2(0, 0), Vec2(1, 0), 0.0, {0.5, 1.0, 1.5});
    CHECK(std::abs(W.back().value.imag()) < 1e-14);
    // hyperbolic plane is fine with a real phase for all time
    auto H = weight_along(MetricModel::hyperbolic(), Vec2(0, 0), Vec2(0.5, 1), 0.0, {1.0, 3.0, 6.0});
    CHECK(std::abs(H.back().branch_arg) < 1e-12);
}

TEST_CASE("epsilon zero identities") {
    for (const auto& m : {MetricModel::sphere(), MetricModel::hyperbolic()})
        for (double t : {0.3, 1.2}) {
            PhaseJets J(m, t, Vec2(0.1, 0.2), Vec2(0.9, -0.4), 0.0);
            CHECK(std::abs(J.laplacian(J.phi(0)).value()) < 1e-7);
            CHECK(std::abs(J.phi(2).value()) < 1e-7);
        }
}

TEST_CASE("cut-off conditions") {
    auto m = MetricModel::sphere();
    Vec2 y(0.1, 0.1);
    Vec2 e = Vec2(0.6, 0.8);
    CHECK(cutoff_chi(m, 1.0, Vec2(0, 0), y, 0.4 * e) == 0.0);
    FlowState s = flow_sample(m, y, 2.0 * e, 1.0);
    CHECK(cutoff_chi(m, 1.0, s.x_star, y, 2.0 * e, {}, s.chart) == 1.0);
    for (double a : {0.1, 0.5, 1.0}) {
        Vec2 x = s.x_star + Vec2(a, -a);
        double c1 = cutoff_chi(m, 1.0, x, y, 1.2 * e, {}, s.chart);
        double c3 = cutoff_chi(m, 1.0, x, y, 3.6 * e, {}, s.chart);
        CHECK(c1 >= 0.0);
        CHECK(c1 <= 1.0);
        CHECK(c1 == doctest::Approx(c3).epsilon(1e-14));
    }
    // far from the flow point the spatial factor is off
    FlowState s0 = flow_sample(m, Vec2(0, 0), 2.0 * e, 0.3);
    for (double r : {0.5, 1.0, 2.0, 2.6}) {
        Vec2 x = 2 * std::tan(r / 2) * Vec2(-0.8, 0.6);  // distance r from the origin
        double d = geodesic_distance(m, s0.x_star, x);
        double c = cutoff_chi(m, 0.3, x, Vec2(0, 0), 2.0 * e);
        if (d <= 0.5 * M_PI) CHECK(c == 1.0);
        if (d >= 0.8 * M_PI) CHECK(c == 0.0);
        if (d > 0.5 * M_PI && d < 0.8 * M_PI) CHECK((c > 0.0 && c < 1.0));
    }
    CHECK(smooth_step(-0.1) == 0.0);
    CHECK(smooth_step(1.1) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
}

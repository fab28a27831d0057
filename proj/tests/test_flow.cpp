#include <doctest.h>

#include <random>

#include "wavefront/flow.hpp"

using namespace wavefront;

namespace {

MetricModel custom_model() { return MetricModel::conformal({{2, 0, 0.1}, {0, 2, -0.05}, {1, 1, 0.02}}, 2.0); }

FlowState same_chart(const MetricModel& m, const FlowState& s, int chart) { return s.chart == chart ? s : to_other_chart(m, s); }

double max_abs(const Mat2& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("hamiltonian") {
    auto sph = MetricModel::sphere();
    CHECK(hamiltonian(sph, Vec2(0, 0), Vec2(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(hamiltonian(MetricModel::flat_torus(1, 1), Vec2(0.2, 0.3), Vec2(-1, 2)) == doctest::Approx(std::sqrt(5.0)));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (const auto& m : {sph, MetricModel::hyperbolic(), custom_model()})
        for (int k = 0; k < 20; ++k) {
            Vec2 x(U(rng), U(rng)), xi(U(rng), U(rng));
            CHECK(hamiltonian(m, x, 2.5 * xi) == doctest::Approx(2.5 * hamiltonian(m, x, xi)).epsilon(1e-14));
            auto d = hamiltonian_derivatives(m, x, xi);
            CHECK(d.h == doctest::Approx(hamiltonian(m, x, xi)).epsilon(1e-14));
            // Euler relation for a degree-one function
            CHECK(d.h_xi.dot(xi) == doctest::Approx(d.h).epsilon(1e-13));
            CHECK(std::abs((d.h_xixi * xi).norm()) < 1e-12);
        }
    try {
        hamiltonian(sph, Vec2(0, 0), Vec2(0, 0));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroCovector);
    }
}

TEST_CASE("sphere flow from the chart origin") {
    auto m = MetricModel::sphere();
    Vec2 eta(0.8, -1.9);
    Vec2 e = eta.normalized();
    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(0.05 + k * (2 * M_PI - 0.1) / 60);
    auto states = integrate_flow(m, Vec2(0, 0), eta, grid);
    const double h0 = eta.norm();
    for (const auto& s : states) {
        double t = s.t;
        FlowState c = flow_closed_form(m, Vec2(0, 0), eta, t);
        FlowState c0 = same_chart(m, c, 0);
        // closed form in chart 0 where it is representable
        if (std::abs(t - M_PI) > 0.3) {
            CHECK((c0.x_star - 2 * std::tan(t / 2) * e).norm() < 1e-12 * (1 + c0.x_star.norm()));
            CHECK((c0.xi_star - std::pow(std::cos(t / 2), 2) * eta).norm() < 1e-12);
        }
        FlowState n = same_chart(m, s, c.chart);
        CHECK((n.x_star - c.x_star).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((n.xi_star - c.xi_star).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(std::abs(hamiltonian(m, s.x_star, s.xi_star) / h0 - 1) < 1e-10);
    }
}

TEST_CASE("hyperbolic flow from the chart origin") {
    auto m = MetricModel::hyperbolic();
    Vec2 eta(-1.2, 0.5);
    Vec2 e = eta.normalized();
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(k * 2 * M_PI / 40);
    auto states = integrate_flow(m, Vec2(0, 0), eta, grid);
    for (const auto& s : states) {
        double t = s.t;
        Vec2 x = std::sinh(t) * e, xi = eta / std::cosh(t);
        CHECK((s.x_star - x).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, x.norm()));
        CHECK((s.xi_star - xi).cwiseAbs().maxCoeff() < 1e-9);
        FlowState c = flow_closed_form(m, Vec2(0, 0), eta, t);
        CHECK((c.x_star - x).norm() < 1e-12 * std::max(1.0, x.norm()));
        CHECK(std::abs(hamiltonian(m, s.x_star, s.xi_star) / eta.norm() - 1) < 1e-10);
    }
}

TEST_CASE("closed-form agreement from off-origin base points") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> U(-1, 1);
    for (const auto& m : {MetricModel::sphere(), MetricModel::hyperbolic(), MetricModel::flat_torus(2 * M_PI, 4.0)}) {
        for (int rep = 0; rep < 4; ++rep) {
            Vec2 y(U(rng), U(rng)), eta(U(rng), U(rng));
            std::vector<double> grid{-2.0, -0.7, 0.4, 1.9, 3.3, 5.0};
            auto st = integrate_flow(m, y, eta, grid);
            for (const auto& s : st) {
                FlowState c = flow_closed_form(m, y, eta, s.t);
                FlowState n = m.chart_count() > 1 ? same_chart(m, s, c.chart) : s;
                double scale = std::max(1.0, c.x_star.norm());
                CHECK((n.x_star - c.x_star).cwiseAbs().maxCoeff() < 1e-9 * scale);
                CHECK((n.xi_star - c.xi_star).cwiseAbs().maxCoeff() < 1e-9 * scale * scale);
                CHECK(max_abs(n.dx_deta - c.dx_deta) < 1e-8 * scale * scale);
                CHECK(max_abs(n.dxi_deta - c.dxi_deta) < 1e-8 * scale * scale * scale);
            }
        }
    }
}

TEST_CASE("energy conservation over long times") {
    std::vector<double> grid;
    for (int k = -40; k <= 40; ++k) grid.push_back(k * 4 * M_PI / 40);
    for (const auto& m : {MetricModel::sphere(), MetricModel::hyperbolic(), MetricModel::flat_torus(3, 5)}) {
        Vec2 y(0.3, -0.2), eta(1.0, 0.4);
        double h0 = hamiltonian(m, y, eta);
        double worst = 0;
        for (const auto& s : integrate_flow(m, y, eta, grid)) worst = std::max(worst, std::abs(hamiltonian(m, s.x_star, s.xi_star) / h0 - 1));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("initial conditions, homogeneity and symplectic symmetry") {
    std::vector<MetricModel> models{MetricModel::sphere(), MetricModel::hyperbolic(), MetricModel::flat_torus(3, 5), custom_model()};
    for (const auto& m : models) {
        Vec2 y(0.2, 0.1), eta(0.7, -0.4);
        FlowState s0 = flow_at(m, y, eta, 0.0);
        CHECK((s0.x_star - y).norm() == 0.0);
        CHECK((s0.xi_star - eta).norm() == 0.0);
        CHECK(max_abs(s0.dx_deta) == 0.0);
        CHECK(max_abs(s0.dxi_deta - Mat2::Identity()) == 0.0);
        for (double t : {-0.8, 0.5, 1.3}) {
            FlowState a = flow_at(m, y, eta, t);
            for (double lam : {0.3, 4.0}) {
                FlowState b = flow_at(m, y, lam * eta, t);
                CHECK((a.x_star - b.x_star).norm() < 1e-9);
                CHECK((lam * a.xi_star - b.xi_star).norm() < 1e-9 * lam);
            }
            Mat2 W = a.dx_deta.transpose() * a.dxi_deta;
            CHECK(std::abs(W(0, 1) - W(1, 0)) < 1e-8);
            // x* has degree zero in eta
            CHECK((a.dx_deta * eta).norm() < 1e-9);
            CHECK((a.dxi_deta * eta - a.xi_star).norm() < 1e-9);
        }
    }
}

TEST_CASE("variational matrices against finite differences") {
    std::vector<MetricModel> models{MetricModel::sphere(), MetricModel::hyperbolic(), custom_model()};
    for (const auto& m : models) {
        Vec2 y(0.1, -0.3), eta(0.9, 0.6);
        for (double t : {0.6, 1.4}) {
            FlowState s = flow_at(m, y, eta, t);
            const double d = 1e-4;
            for (int b = 0; b < 2; ++b) {
                Vec2 e = Vec2::Zero();
                e[b] = d;
                FlowState p = same_chart(m, flow_at(m, y, eta + e, t), s.chart);
                FlowState q = same_chart(m, flow_at(m, y, eta - e, t), s.chart);
                Vec2 dx = (p.x_star - q.x_star) / (2 * d), dxi = (p.xi_star - q.xi_star) / (2 * d);
                CHECK((dx - s.dx_deta.col(b)).cwiseAbs().maxCoeff() < 1e-7);
                CHECK((dxi - s.dxi_deta.col(b)).cwiseAbs().maxCoeff() < 1e-7);
            }
        }
    }
}

TEST_CASE("sphere flow crosses the north pole through the second chart") {
    auto m = MetricModel::sphere();
    FlowState s = flow_at(m, Vec2(0, 0), Vec2(1, 0), M_PI);
    CHECK(s.chart == 1);
    CHECK(s.x_star.norm() < 1e-9);
    FlowState c = flow_closed_form(m, Vec2(0, 0), Vec2(1, 0), M_PI);
    CHECK(c.chart == 1);
    try {
        to_primary_chart(m, c);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PointOutsideChart);
    }
    FlowState back = flow_at(m, Vec2(0, 0), Vec2(1, 0), 2 * M_PI);
    CHECK(back.chart == 0);
    CHECK(back.x_star.norm() < 1e-9);
}

TEST_CASE("loops and conjugate points") {
    auto sph = MetricModel::sphere();
    auto hits = loop_detect(sph, Vec2(0.3, 0.1), Vec2(1, 0.5), 4 * M_PI + 0.5);
    REQUIRE(hits.size() == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK(hits[k].T == doctest::Approx(2 * M_PI * (k + 1)).epsilon(1e-8));
        CHECK(hits[k].is_conjugate);
    }
    auto ct = conjugate_times(sph, Vec2(0.3, 0.1), Vec2(1, 0.5), 3.5 * M_PI);
    REQUIRE(ct.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(ct[k] == doctest::Approx(M_PI * (k + 1)).epsilon(1e-9));

    // unit-speed covector: loop times measure length
    auto tor = MetricModel::flat_torus(2.0, 3.0);
    auto th = loop_detect(tor, Vec2(0.5, 0.5), Vec2(1, 0), 7.0);
    REQUIRE(th.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(th[k].T == doctest::Approx(2.0 * (k + 1)).epsilon(1e-9));
        CHECK(!th[k].is_conjugate);
    }
    auto tv = loop_detect(tor, Vec2(0.5, 0.5), Vec2(0, 2.5), 7.0);
    REQUIRE(tv.size() == 2);
    CHECK(tv[0].T == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(conjugate_times(tor, Vec2(0.5, 0.5), Vec2(1, 0), 7.0).empty());

    auto hyp = MetricModel::hyperbolic();
    CHECK(loop_detect(hyp, Vec2(0, 0), Vec2(1, 0), 50.0).empty());
    CHECK(conjugate_times(hyp, Vec2(0, 0), Vec2(1, 0), 10.0).empty());
}

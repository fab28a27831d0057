#include <doctest.h>

#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "wavefront.h"

TEST_CASE("model handles") {
    wf_model* m = nullptr;
    REQUIRE(wf_model_sphere(&m) == WF_OK);
    CHECK(std::string(wf_model_kind(m)) == "sphere2");
    size_t need = 0;
    CHECK(wf_model_to_json(m, nullptr, 0, &need) == WF_BUFFER_TOO_SMALL);
    std::string s(need, '\0');
    CHECK(wf_model_to_json(m, s.data(), s.size(), &need) == WF_OK);
    wf_model* back = nullptr;
    CHECK(wf_model_from_json(s.c_str(), &back) == WF_OK);
    CHECK(std::string(wf_model_kind(back)) == "sphere2");
    wf_model_free(back);
    wf_model_free(m);
    wf_model_free(nullptr);
}

TEST_CASE("errors carry a code and a message") {
    wf_model* m = nullptr;
    CHECK(wf_model_from_file("/nonexistent.json", &m) == WF_MODEL_LOAD);
    CHECK(m == nullptr);
    CHECK(std::string(wf_last_error()).find("ModelLoad") == 0);
    CHECK(std::string(wf_status_name(WF_MODEL_LOAD)) == "ModelLoad");
    CHECK(wf_model_from_json("{\"kind\": 3}", &m) == WF_MODEL_LOAD);
    CHECK(wf_model_flat_torus(-1, 1, &m) == WF_INVALID_ARGUMENT);
    double h;
    double x[2] = {0, 0}, xi[2] = {1, 0};
    CHECK(wf_hamiltonian(nullptr, x, xi, &h) == WF_INVALID_ARGUMENT);
    REQUIRE(wf_model_sphere(&m) == WF_OK);
    CHECK(wf_hamiltonian(m, x, xi, &h) == WF_OK);
    CHECK(std::string(wf_last_error()).empty());
    CHECK(h == doctest::Approx(1));
    double eta0[2] = {0, 0};
    wf_flow_state s;
    CHECK(wf_flow_sample(m, x, eta0, 1.0, &s) == WF_ZERO_COVECTOR);
    wf_model_free(m);
}

TEST_CASE("last error is per thread") {
    wf_model* m = nullptr;
    CHECK(wf_model_from_file("/nonexistent.json", &m) == WF_MODEL_LOAD);
    std::string other;
    std::thread([&] { other = wf_last_error(); }).join();
    CHECK(other.empty());
    CHECK(!std::string(wf_last_error()).empty());
}

TEST_CASE("flow, weight and Maslov through the C interface") {
    wf_model* m = nullptr;
    REQUIRE(wf_model_sphere(&m) == WF_OK);
    double y[2] = {0, 0}, eta[2] = {1, 0};
    wf_flow_state s;
    REQUIRE(wf_flow_sample(m, y, eta, M_PI / 2, &s) == WF_OK);
    CHECK(s.x_star[0] == doctest::Approx(2.0));  // the equator of the stereographic chart
    std::vector<double> grid{0, 0.5, 1.0};
    std::vector<wf_weight> w(3);
    REQUIRE(wf_weight_along(m, y, eta, 1.0, grid.data(), 3, w.data()) == WF_OK);
    CHECK(w[0].w_re == doctest::Approx(1));
    int index = 0;
    double winding = 0;
    size_t n = 0;
    REQUIRE(wf_maslov(m, y, eta, 2 * M_PI, 1.0, 100, &index, &winding, nullptr, nullptr, 0, &n) == WF_OK);
    CHECK(index == 2);
    CHECK(n > 0);
    CHECK(wf_maslov(m, y, eta, M_PI, 1.0, 100, &index, &winding, nullptr, nullptr, 0, &n) == WF_NOT_A_LOOP);
    double a[2];
    REQUIRE(wf_subprincipal(m, y, eta, 1.0, 0.0, 0.0, a) == WF_OK);
    CHECK(std::hypot(a[0], a[1]) < 1e-12);
    wf_model_free(m);
}

TEST_CASE("identity symbol, Weyl and kernels through the C interface") {
    char buf[8];
    size_t need = 0;
    CHECK(wf_identity_symbol_exact(2, 3, buf, sizeof buf, &need) == WF_OK);
    CHECK(std::string(buf) == "1/8");
    CHECK(wf_identity_symbol_exact(2, 11, buf, sizeof buf, &need) == WF_UNSUPPORTED_ORDER);
    CHECK(wf_identity_symbol_max_order(2) == 10);
    double c[3];
    REQUIRE(wf_weyl_coefficients(2, 2.0, c) == WF_OK);
    CHECK(c[0] == doctest::Approx(1 / (2 * M_PI)));
    double lam = 100, out = 0;
    REQUIRE(wf_mollified_counting_derivative(&lam, 1, 2.0, 0, 1, &out) == WF_OK);
    CHECK(out == doctest::Approx(100 * c[0]).epsilon(0.02));
    CHECK(wf_mollified_counting_derivative(&lam, 1, 2.0, 50, 1, &out) == WF_SPECTRUM_TRUNCATED);

    double x[2] = {0.3, 0}, y[2] = {0, 0}, u[2];
    CHECK(wf_kernel_spectral(5, 0, 0.5, x, y, 30, u) == WF_TRUNCATION_INSUFFICIENT);
    REQUIRE(wf_kernel_spectral(0, 0.25, 0.5, x, y, 10, u) == WF_OK);
    wf_model* t = nullptr;
    REQUIRE(wf_model_flat_torus(2 * M_PI, 2 * M_PI, &t) == WF_OK);
    wf_kernel_request req;
    wf_kernel_request_init(&req);
    CHECK(req.angular_nodes == 256);
    req.regulator = 5;
    REQUIRE(wf_kernel_oscillatory(t, &req, u) == WF_OK);
    CHECK(u[0] > 0);
    req.radial_nodes = 10;
    CHECK(wf_kernel_oscillatory(t, &req, u) == WF_INVALID_ARGUMENT);
    double times[2] = {0.05, 0.2}, ex[2], exp_[2], rel[2];
    REQUIRE(wf_heat_trace(t, times, 2, ex, exp_, rel) == WF_OK);
    CHECK(std::abs(rel[0]) < 1e-12);
    wf_model_free(t);
}

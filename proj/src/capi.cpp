// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <string>

#include "wavefront.h"
#include "wavefront/caustics.hpp"
#include "wavefront/kernel.hpp"
#include "wavefront/spectral.hpp"
#include "wavefront/symbolcalc.hpp"

struct wf_model {
    wavefront::MetricModel m;
};

namespace {

using namespace wavefront;

thread_local std::string last_error;

template <class F>
int guarded(F&& f) {
    last_error.clear();
    try {
        f();
        return WF_OK;
    } catch (const Error& e) {
        last_error = std::string(error_name(e.code())) + ": " + e.what();
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "Internal: out of memory";
        return WF_INTERNAL;
    } catch (const std::exception& e) {
        last_error = std::string("Internal: ") + e.what();
        return WF_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) fail(ErrorCode::InvalidArgument, what);
}

Vec2 vec(const double* p) { return Vec2(p[0], p[1]); }

void put(cplx z, double* out) {
    out[0] = z.real();
    out[1] = z.imag();
}

const MetricModel& model_of(const wf_model* m) {
    require(m != nullptr, "null model handle");
    return m->m;
}

int emit_text(const std::string& s, char* buf, size_t len, size_t* needed) {
    if (needed) *needed = s.size() + 1;
    if (!buf || len < s.size() + 1) {
        last_error = "BufferTooSmall: " + std::to_string(s.size() + 1) + " bytes needed";
        return WF_BUFFER_TOO_SMALL;
    }
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return WF_OK;
}

int make_model(wf_model** out, MetricModel (*factory)(const std::string&), const char* arg) {
    return guarded([&] {
        require(out != nullptr && arg != nullptr, "null argument");
        *out = new wf_model{factory(arg)};
    });
}

}  // namespace

extern "C" {

const char* wf_version(void) { return "1.0.0"; }

const char* wf_status_name(int status) {
    if (status == WF_BUFFER_TOO_SMALL) return "BufferTooSmall";
    return error_name(static_cast<ErrorCode>(status));
}

const char* wf_last_error(void) { return last_error.c_str(); }

int wf_model_sphere(wf_model** out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = new wf_model{MetricModel::sphere()};
    });
}

int wf_model_hyperbolic(wf_model** out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = new wf_model{MetricModel::hyperbolic()};
    });
}

int wf_model_flat_torus(double lx, double ly, wf_model** out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = new wf_model{MetricModel::flat_torus(lx, ly)};
    });
}

int wf_model_from_json(const char* text, wf_model** out) { return make_model(out, &MetricModel::from_json_text, text); }

int wf_model_from_file(const char* path, wf_model** out) { return make_model(out, &MetricModel::from_file, path); }

void wf_model_free(wf_model* model) { delete model; }

const char* wf_model_kind(const wf_model* model) {
    if (!model) return "";
    switch (model->m.kind()) {
        case ModelKind::Sphere2: return "sphere2";
        case ModelKind::Hyperbolic2: return "hyperbolic2";
        case ModelKind::FlatTorus2: return "flat_torus2";
        default: return "conformal";
    }
}

int wf_model_to_json(const wf_model* model, char* buf, size_t len, size_t* needed) {
    std::string s;
    int rc = guarded([&] { s = model_of(model).to_json_text(); });
    return rc == WF_OK ? emit_text(s, buf, len, needed) : rc;
}

int wf_hamiltonian(const wf_model* model, const double x[2], const double xi[2], double* h) {
    return guarded([&] {
        require(x && xi && h, "null argument");
        *h = hamiltonian(model_of(model), vec(x), vec(xi));
    });
}

int wf_flow_sample(const wf_model* model, const double y[2], const double eta[2], double t, wf_flow_state* out) {
    return guarded([&] {
        require(y && eta && out, "null argument");
        FlowState s = flow_sample(model_of(model), vec(y), vec(eta), t);
        out->t = s.t;
        for (int a = 0; a < 2; ++a) {
            out->x_star[a] = s.x_star[a];
            out->xi_star[a] = s.xi_star[a];
            for (int b = 0; b < 2; ++b) {
                out->dx_deta[2 * a + b] = s.dx_deta(a, b);
                out->dxi_deta[2 * a + b] = s.dxi_deta(a, b);
            }
        }
        out->chart = s.chart;
    });
}

int wf_weight_along(const wf_model* model, const double y[2], const double eta[2], double eps, const double* t_grid, size_t n,
                    wf_weight* out) {
    return guarded([&] {
        require(y && eta && (n == 0 || (t_grid && out)), "null argument");
        std::vector<double> grid(t_grid, t_grid + n);
        auto w = weight_along(model_of(model), vec(y), vec(eta), eps, grid);
        for (size_t k = 0; k < n; ++k) {
            out[k] = {w[k].t, w[k].value.real(), w[k].value.imag(), w[k].branch_arg, w[k].det2.real(), w[k].det2.imag()};
        }
    });
}

int wf_phase(const wf_model* model, double t, const double x[2], int chart, const double y[2], const double eta[2], double eps,
             double value[2]) {
    return guarded([&] {
        require(x && y && eta && value, "null argument");
        put(phase_eval(model_of(model), t, vec(x), vec(y), vec(eta), eps, chart).value, value);
    });
}

int wf_maslov(const wf_model* model, const double y[2], const double eta[2], double T, double eps, int n_steps, int* index,
              double* winding, double* t, double* arg, size_t cap, size_t* steps) {
    return guarded([&] {
        require(y && eta, "null argument");
        require(n_steps > 0, "n_steps must be positive");
        auto r = maslov_index(model_of(model), vec(y), vec(eta), T, eps, n_steps);
        if (index) *index = r.index;
        if (winding) *winding = r.winding;
        if (steps) *steps = r.t.size();
        for (size_t k = 0; k < r.t.size() && k < cap; ++k) {
            if (t) t[k] = r.t[k];
            if (arg) arg[k] = r.branch_arg[k];
        }
    });
}

int wf_subprincipal(const wf_model* model, const double y[2], const double eta[2], double eps, double t, double b0_shift,
                    double value[2]) {
    return guarded([&] {
        require(y && eta && value, "null argument");
        SubprincipalOptions opt;
        opt.b0_shift = b0_shift;
        put(subprincipal_symbol(model_of(model), vec(y), vec(eta), eps, t, opt), value);
    });
}

int wf_fte_residual(const wf_model* model, const double y[2], const double eta[2], double eps, double t, double value[2]) {
    return guarded([&] {
        require(y && eta && value, "null argument");
        put(fte_residual(model_of(model), vec(y), vec(eta), eps, t).residual, value);
    });
}

int wf_small_time_coefficient(const wf_model* model, const double y[2], const double eta[2], double value[2]) {
    return guarded([&] {
        require(y && eta && value, "null argument");
        put(small_time_coefficient(model_of(model), vec(y), vec(eta)), value);
    });
}

int wf_identity_symbol(int d, double eps, int k, double h, double value[2]) {
    return guarded([&] {
        require(value != nullptr, "null argument");
        put(identity_symbol(d, eps, k, h), value);
    });
}

int wf_identity_symbol_exact(int d, int k, char* buf, size_t len, size_t* needed) {
    std::string s;
    int rc = guarded([&] {
        if (k < 0) fail(ErrorCode::UnsupportedOrder, "negative order");
        s = identity_symbol_table(d, k).coefficients.at(k).exact;
    });
    return rc == WF_OK ? emit_text(s, buf, len, needed) : rc;
}

int wf_identity_symbol_max_order(int d) { return d < 1 ? -1 : identity_symbol_max_order(d); }

void wf_kernel_request_init(wf_kernel_request* req) {
    if (!req) return;
    KernelRequest d;
    *req = {};
    req->eps = d.eps;
    req->symbol_depth = d.symbol_depth;
    req->regulator = d.regulator;
    req->angular_nodes = d.angular_nodes;
    req->radial_nodes = d.radial_nodes;
    req->threads = d.threads;
}

int wf_kernel_oscillatory(const wf_model* model, const wf_kernel_request* req, double value[2]) {
    return guarded([&] {
        require(req && value, "null argument");
        KernelRequest k;
        k.t = req->t;
        k.x = vec(req->x);
        k.x_chart = req->x_chart;
        k.y = vec(req->y);
        k.eps = req->eps;
        k.symbol_depth = req->symbol_depth;
        k.regulator = req->regulator;
        k.angular_nodes = req->angular_nodes;
        k.radial_nodes = req->radial_nodes;
        k.threads = req->threads;
        put(kernel_oscillatory(model_of(model), k), value);
    });
}

int wf_kernel_spectral(int l_max, double shift, double t, const double x[2], const double y[2], double regulator, double value[2]) {
    return guarded([&] {
        require(x && y && value, "null argument");
        SpectralReference ref;
        ref.l_max = l_max;
        ref.shift = shift;
        put(kernel_spectral(ref, t, vec(x), vec(y), regulator), value);
    });
}

int wf_weyl_coefficients(int d, double scalar_curv, double out[3]) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        auto w = weyl_coefficients(d, scalar_curv);
        out[0] = w.c_dm1;
        out[1] = w.c_dm2;
        out[2] = w.c_dm3;
    });
}

int wf_mollified_counting_derivative(const double* lambda, size_t n, double sigma, int l_max, int threads, double* out) {
    return guarded([&] {
        require(n == 0 || (lambda && out), "null argument");
        SphereSpectrum s;
        s.l_max = l_max;
        auto v = mollified_counting_derivative(s, std::vector<double>(lambda, lambda + n), sigma, threads);
        std::copy(v.begin(), v.end(), out);
    });
}

int wf_heat_trace(const wf_model* model, const double* t, size_t n, double* exact, double* expansion, double* relative) {
    return guarded([&] {
        require(n == 0 || (t && exact && expansion && relative), "null argument");
        auto rows = heat_trace_check(model_of(model), std::vector<double>(t, t + n));
        for (size_t k = 0; k < n; ++k) {
            exact[k] = rows[k].has_exact ? rows[k].exact : NAN;
            expansion[k] = rows[k].expansion;
            relative[k] = rows[k].has_exact ? rows[k].relative : NAN;
        }
    });
}

}  // extern "C"

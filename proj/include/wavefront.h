// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVEFRONT_H
#define WAVEFRONT_H

#include <stddef.h>

#if defined(_WIN32)
#define WF_API __declspec(dllexport)
#elif defined(__GNUC__)
#define WF_API __attribute__((visibility("default")))
#else
#define WF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. 0 is success; the others name the failing condition. */
typedef enum wf_status {
    WF_OK = 0,
    WF_INVALID_ARGUMENT = 1,
    WF_POINT_OUTSIDE_CHART = 2,
    WF_OUTSIDE_INJECTIVITY_RADIUS = 3,
    WF_ZERO_COVECTOR = 4,
    WF_INTEGRATOR_DIVERGENCE = 5,
    WF_OUTSIDE_GEODESIC_NEIGHBOURHOOD = 6,
    WF_BRANCH_DEGENERATE = 7,
    WF_NOT_A_LOOP = 8,
    WF_SINGULAR_PHASE_HESSIAN = 9,
    WF_JET_ORDER_INSUFFICIENT = 10,
    WF_QUADRATURE_FAILURE = 11,
    WF_UNSUPPORTED_ORDER = 12,
    WF_NO_STATIONARY_DIRECTION = 13,
    WF_TRUNCATION_INSUFFICIENT = 14,
    WF_SPECTRUM_TRUNCATED = 15,
    WF_NON_ANALYTIC_CALL = 16,
    WF_ORDER_EXCEEDED = 17,
    WF_MODEL_LOAD = 18,
    WF_CONFIG_PARSE = 19,
    WF_BUFFER_TOO_SMALL = 20,
    WF_INTERNAL = 99
} wf_status;

/* Immutable metric model; safe to share between threads. */
typedef struct wf_model wf_model;

WF_API const char* wf_version(void);
WF_API const char* wf_status_name(int status);
/* Message of the last failure on the calling thread ("" if none). */
WF_API const char* wf_last_error(void);

WF_API int wf_model_sphere(wf_model** out);
WF_API int wf_model_hyperbolic(wf_model** out);
WF_API int wf_model_flat_torus(double lx, double ly, wf_model** out);
WF_API int wf_model_from_json(const char* text, wf_model** out);
WF_API int wf_model_from_file(const char* path, wf_model** out);
WF_API void wf_model_free(wf_model* model);
/* kind name: "sphere2", "hyperbolic2", "flat_torus2" or "conformal" */
WF_API const char* wf_model_kind(const wf_model* model);
/* NUL-terminated JSON; needed receives the required size including the terminator. */
WF_API int wf_model_to_json(const wf_model* model, char* buf, size_t len, size_t* needed);

typedef struct wf_flow_state {
    double t;
    double x_star[2];
    double xi_star[2];
    double dx_deta[4]; /* row-major, (d x*^a / d eta_b) */
    double dxi_deta[4];
    int chart;
} wf_flow_state;

WF_API int wf_hamiltonian(const wf_model* model, const double x[2], const double xi[2], double* h);
WF_API int wf_flow_sample(const wf_model* model, const double y[2], const double eta[2], double t, wf_flow_state* out);

typedef struct wf_weight {
    double t;
    double w_re, w_im;
    double branch_arg;
    double det2_re, det2_im;
} wf_weight;

/* Branch-tracked weight on the flow at the n times of t_grid (sorted, from 0). */
WF_API int wf_weight_along(const wf_model* model, const double y[2], const double eta[2], double eps, const double* t_grid, size_t n,
                           wf_weight* out);

/* Phase at (t, x; y, eta). chart = -1 means the chart of x*. */
WF_API int wf_phase(const wf_model* model, double t, const double x[2], int chart, const double y[2], const double eta[2], double eps,
                    double value[2]);

/* Maslov index of a loop. t and arg (capacity cap, may be NULL) receive the per-step unwrapped
   argument of det^2 phi_xeta; steps receives the number of samples. */
WF_API int wf_maslov(const wf_model* model, const double y[2], const double eta[2], double T, double eps, int n_steps, int* index,
                     double* winding, double* t, double* arg, size_t cap, size_t* steps);

/* a_{-1}(t; y, eta) for built-in models. b0_shift replaces b0 by b0 + shift. */
WF_API int wf_subprincipal(const wf_model* model, const double y[2], const double eta[2], double eps, double t, double b0_shift,
                           double value[2]);
/* residual of the first transport equation; value = lhs - rhs */
WF_API int wf_fte_residual(const wf_model* model, const double y[2], const double eta[2], double eps, double t, double value[2]);
WF_API int wf_small_time_coefficient(const wf_model* model, const double y[2], const double eta[2], double value[2]);

/* s_{-k} in dimension d for covector length h. */
WF_API int wf_identity_symbol(int d, double eps, int k, double h, double value[2]);
/* exact rational coefficient of (eps/h)^k, as text */
WF_API int wf_identity_symbol_exact(int d, int k, char* buf, size_t len, size_t* needed);
WF_API int wf_identity_symbol_max_order(int d);

typedef struct wf_kernel_request {
    double t;
    double x[2];
    int x_chart;
    double y[2];
    double eps;
    int symbol_depth;
    double regulator;
    int angular_nodes;
    int radial_nodes;
    int threads;
} wf_kernel_request;

/* fills the defaults: eps 1, symbol_depth 0, regulator 30, 256 x 400 nodes, all threads */
WF_API void wf_kernel_request_init(wf_kernel_request* req);
WF_API int wf_kernel_oscillatory(const wf_model* model, const wf_kernel_request* req, double value[2]);
/* unit sphere, chart 0 for both points; l_max = 0 picks the cut from the regulator */
WF_API int wf_kernel_spectral(int l_max, double shift, double t, const double x[2], const double y[2], double regulator,
                              double value[2]);

/* c_{d-1}, c_{d-2}, c_{d-3} */
WF_API int wf_weyl_coefficients(int d, double scalar_curv, double out[3]);
WF_API int wf_mollified_counting_derivative(const double* lambda, size_t n, double sigma, int l_max, int threads, double* out);
/* out: exact, expansion, relative residual per time; exact is NaN for the hyperbolic plane */
WF_API int wf_heat_trace(const wf_model* model, const double* t, size_t n, double* exact, double* expansion, double* relative);

#ifdef __cplusplus
}
#endif

#endif /* WAVEFRONT_H */

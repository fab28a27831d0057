// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wavefront/phase.hpp"
#include "wavefront/symbolcalc.hpp"

namespace wavefront {

struct KernelRequest {
    double t = 0;
    Vec2 x = Vec2::Zero();
    Vec2 y = Vec2::Zero();  // chart 0
    int x_chart = 0;
    double eps = 1;
    int symbol_depth = 0;     // 1: amplitude 1 + a_{-1}
    double regulator = 30;    // Gaussian damping exp(-(r/R)^2) in |eta|_g
    int angular_nodes = 256;  // trapezoid on the g-unit circle
    int radial_nodes = 400;   // composite Gauss-Legendre on [1/2, 4R]
    int threads = 0;          // 0: available parallelism
    bool use_isotropy = true;  // built-ins: a_{-1} does not depend on the direction
    CutoffOptions cutoff;
    SubprincipalOptions symbol;
};

struct KernelStats {
    int active_directions = 0;  // directions with a nonzero spatial cut-off
    int radial_evaluations = 0;
};

// (2 pi)^{-2} int e^{i r phi(omega)} a chi w e^{-(r/R)^2} d eta over eta = r omega, |omega|_g = 1.
cplx kernel_oscillatory(const MetricModel& m, const KernelRequest& req, KernelStats* stats = nullptr);

struct SpectralReference {
    int l_max = 0;       // 0: chosen from the regulator
    double shift = 0;    // 0 or 1/4; the latter gives lambda_l = l + 1/2
    int chart_x = 0;
    int chart_y = 0;
};

double spectral_eigenvalue(int l, double shift);
// smallest l_max meeting the truncation bound for this regulator
int spectral_l_max(double R, double shift);

// sum_l e^{-i t lambda_l} e^{-(lambda_l/R)^2} (2l+1)/(4 pi) P_l(cos Theta) on the unit sphere
cplx kernel_spectral(const SpectralReference& ref, double t, const Vec2& x, const Vec2& y, double R);

}  // namespace wavefront

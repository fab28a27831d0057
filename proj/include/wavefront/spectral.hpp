// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "wavefront/geometry.hpp"

namespace wavefront {

struct WeylCoefficients {
    int d = 2;
    double scalar_curv = 0;
    double c_dm1 = 0;  // c_{d-1}
    double c_dm2 = 0;  // c_{d-2}
    double c_dm3 = 0;  // c_{d-3}
};

// area of the unit sphere S^{d-1}
double unit_sphere_area(int d);
WeylCoefficients weyl_coefficients(int d, double scalar_curv);

// Gaussian mollifier of width sigma, unit mass
double gaussian_mollifier(double s, double sigma);

struct SphereSpectrum {
    int l_max = 0;  // 0: the smallest admissible cut for the requested grid
};

// (N' * mu)(lambda) = sum_l (2l+1)/(4 pi) mu(lambda - sqrt(l(l+1))) on the unit sphere.
// The local counting function does not depend on the point there.
std::vector<double> mollified_counting_derivative(const SphereSpectrum& spec, const std::vector<double>& lambda, double sigma,
                                                  int threads = 0);

struct LinearFit {
    double slope = 0, intercept = 0;
};
LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

struct HeatTraceRow {
    double t = 0;
    bool has_exact = false;  // false for the formula-only hyperbolic plane
    double exact = 0;        // Z(y, t) from the spectrum
    double expansion = 0;    // (4 pi t)^{-1} (1 + R t / 6)
    double relative = 0;     // (exact - expansion) / expansion
    double bound_ratio = 0;  // (exact - expansion) / ((4 pi t)^{-1} t^2)
};
// Sphere2, FlatTorus2 and Hyperbolic2 (formula only); t in (0, 1/2]
std::vector<HeatTraceRow> heat_trace_check(const MetricModel& m, const std::vector<double>& t_grid);

struct GammaMoment {
    int d = 3;
    double top = 0, top_expected = 0;        // int e^{-z^2} z^{d-1} dz and Gamma(d/2)/2
    double second = 0, second_expected = 0;  // int e^{-z^2} z^{d-3} dz and Gamma(d/2)/(d-2)
};
GammaMoment gamma_moments(int d);

}  // namespace wavefront

// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wavefront/geometry.hpp"

namespace wavefront::detail {

struct PhiJet {
    jets::CJet phi;
    double h = 0;
    double dist = 0;  // dist(x0, x*) at the base point
};

// phi as a jet in (t, x1, x2, eta1, eta2) about (t, x0, eta), x0 in chart `chart`.
// Built-in models only.
PhiJet build_phi(const MetricModel& m, const jets::Layout& L, double t, const Vec2& x0, int chart, const Vec2& y, const Vec2& eta,
                 double eps);

}  // namespace wavefront::detail

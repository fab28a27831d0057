// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "wavefront/geometry.hpp"

namespace wavefront::closed {

using jets::CJet;
using J3 = std::array<CJet, 3>;

J3 embed_jet(const MetricModel& m, const CJet x[2], int chart);
void unembed_jet(const MetricModel& m, const J3& X, int chart, CJet out[2]);
// out_a = sum_i (dX_i/dx^a) (A W)_i, A the ambient metric
void pull_back_jet(const MetricModel& m, const CJet x[2], int chart, const J3& W, CJet out[2]);
CJet ambient_dot_jet(const MetricModel& m, const J3& a, const J3& b);

struct FlowJets {
    CJet h;
    J3 Y, Yd;  // ambient position and unit velocity (constant-curvature models)
    CJet x[2];
    CJet xi[2];
    int chart = 0;
};

// Flow with t and eta given as jets of one layout; y fixed (chart 0). chart < 0 picks
// the chart from the base point.
FlowJets flow_jets(const MetricModel& m, const Vec2& y, const CJet& t, const CJet eta[2], int chart = -1);

}  // namespace wavefront::closed

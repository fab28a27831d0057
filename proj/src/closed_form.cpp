// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "closed_form.hpp"

namespace wavefront::closed {

J3 embed_jet(const MetricModel& m, const CJet x[2], int chart) {
    const CJet& u = x[0];
    const CJet& v = x[1];
    if (m.kind() == ModelKind::Sphere2) {
        CJet K2 = (u * u + v * v) * 0.25;
        CJet Dinv = jets::inv(K2 + 1.0);
        CJet z = (K2 - 1.0) * Dinv;
        return {u * Dinv, v * Dinv, chart == 0 ? z : -z};
    }
    if (m.kind() == ModelKind::Hyperbolic2) return {u, v, jets::sqrt(u * u + v * v + 1.0)};
    fail(ErrorCode::InvalidArgument, "model has no closed-form embedding");
}

void unembed_jet(const MetricModel& m, const J3& X, int chart, CJet out[2]) {
    if (m.kind() == ModelKind::Sphere2) {
        CJet den = chart == 0 ? 1.0 - X[2] : X[2] + 1.0;
        if (std::abs(den.value()) < 1e-300) fail(ErrorCode::PointOutsideChart, "point at the excluded pole");
        CJet s = jets::inv(den) * 2.0;
        out[0] = X[0] * s;
        out[1] = X[1] * s;
        return;
    }
    if (m.kind() == ModelKind::Hyperbolic2) {
        out[0] = X[0];
        out[1] = X[1];
        return;
    }
    fail(ErrorCode::InvalidArgument, "model has no closed-form embedding");
}

void pull_back_jet(const MetricModel& m, const CJet x[2], int chart, const J3& W, CJet out[2]) {
    const CJet& u = x[0];
    const CJet& v = x[1];
    if (m.kind() == ModelKind::Sphere2) {
        CJet Dinv = jets::inv((u * u + v * v) * 0.25 + 1.0);
        CJet D2inv = Dinv * Dinv;
        double sgn = chart == 0 ? 1.0 : -1.0;
        // columns of the embedding jacobian
        CJet uv = u * v * D2inv * 0.5;
        CJet a00 = Dinv - u * u * D2inv * 0.5;
        CJet a11 = Dinv - v * v * D2inv * 0.5;
        out[0] = a00 * W[0] - uv * W[1] + u * D2inv * W[2] * sgn;
        out[1] = -(uv * W[0]) + a11 * W[1] + v * D2inv * W[2] * sgn;
        return;
    }
    if (m.kind() == ModelKind::Hyperbolic2) {
        CJet sinv = jets::inv(jets::sqrt(u * u + v * v + 1.0));
        out[0] = W[0] - u * sinv * W[2];
        out[1] = W[1] - v * sinv * W[2];
        return;
    }
    fail(ErrorCode::InvalidArgument, "model has no closed-form embedding");
}

CJet ambient_dot_jet(const MetricModel& m, const J3& a, const J3& b) {
    if (m.kind() == ModelKind::Hyperbolic2) return a[0] * b[0] + a[1] * b[1] - a[2] * b[2];
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

FlowJets flow_jets(const MetricModel& m, const Vec2& y, const CJet& t, const CJet eta[2], int chart) {
    FlowJets F;
    MetricValue mv = metric_at(m, y);
    const Mat2& gi = mv.g_inv;
    CJet gie0 = eta[0] * gi(0, 0) + eta[1] * gi(0, 1);
    CJet gie1 = eta[0] * gi(1, 0) + eta[1] * gi(1, 1);
    F.h = jets::sqrt(eta[0] * gie0 + eta[1] * gie1);
    if (std::abs(F.h.value()) == 0) fail(ErrorCode::ZeroCovector, "zero covector");
    CJet hinv = jets::inv(F.h);

    if (m.kind() == ModelKind::FlatTorus2 || m.kind() == ModelKind::ConformalCustom) {
        if (m.kind() == ModelKind::ConformalCustom) fail(ErrorCode::InvalidArgument, "no closed-form flow for conformal models");
        F.x[0] = t * (eta[0] * hinv) + y[0];
        F.x[1] = t * (eta[1] * hinv) + y[1];
        F.xi[0] = eta[0];
        F.xi[1] = eta[1];
        F.chart = 0;
        return F;
    }

    Vec3 P = m.embed(y);
    Mat32 J = m.embed_jacobian(y);
    J3 V;
    for (int i = 0; i < 3; ++i) V[i] = (gie0 * J(i, 0) + gie1 * J(i, 1)) * hinv;
    CJet c, s;
    if (m.kind() == ModelKind::Sphere2) {
        c = jets::cos(t);
        s = jets::sin(t);
    } else {
        c = jets::cosh(t);
        s = jets::sinh(t);
    }
    const double sd = m.kind() == ModelKind::Sphere2 ? -1.0 : 1.0;
    for (int i = 0; i < 3; ++i) {
        F.Y[i] = c * P[i] + s * V[i];
        F.Yd[i] = s * (sd * P[i]) + c * V[i];
    }
    if (chart < 0) chart = (m.kind() == ModelKind::Sphere2 && F.Y[2].value().real() > 0) ? 1 : 0;
    F.chart = chart;
    unembed_jet(m, F.Y, chart, F.x);
    pull_back_jet(m, F.x, chart, F.Yd, F.xi);
    F.xi[0] = F.xi[0] * F.h;
    F.xi[1] = F.xi[1] * F.h;
    return F;
}

}  // namespace wavefront::closed

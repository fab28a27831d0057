// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wavefront/phase.hpp"

namespace wavefront {

// An amplitude a(t, x; y, eta) about x = x*, given as an (x, eta)-jet on the phase
// layout, together with its degree of homogeneity in eta.
struct AmplitudeField {
    std::function<jets::CJet(const PhaseJets&)> jet;
    int degree = 0;
};

struct BComponents {
    jets::CJet b2, b1, b0;
};
// b = exp(-i phi) [P (exp(i phi) w)] / w split by homogeneity (degrees 2, 1, 0).
BComponents b_components(const PhaseJets& P);

// L_a applied to a jet, and L_alpha for a multi-index (a1, a2).
jets::CJet L_apply(const PhaseJets& P, const jets::CJet& f, int a1, int a2);

// The operator inside the k-th power of the amplitude-to-symbol expansion:
// T_k f = i w^{-1} d/deta_b [ w (1 + sum_{1<=|al|<=2k-1} (-phi_eta)^al / (al! (|al|+1)) L_al) L_b f ].
jets::CJet T_op(const PhaseJets& P, int k, const jets::CJet& f);
// B_{-1} f = i w^{-1} d/deta_a (w L_a f) - (i/2) phi_{eta_a eta_b} L_a L_b f
jets::CJet B_minus1(const PhaseJets& P, const jets::CJet& f);

// S_{-k} a at x = x*. kTheorem uses S_0 T_k^k; kReduced uses S_0 B_{-1} and
// S_0 B_{-1} T_2 for k = 1, 2.
enum class SForm { kTheorem, kReduced };
cplx S_op(const PhaseJets& P, int k, const jets::CJet& a, SForm form = SForm::kReduced);
cplx S_op(const PhaseJets& P, int k, const AmplitudeField& a, SForm form = SForm::kReduced);

// F_k = sum_{|al|=k} (phi_eta)^al / al! L_al
jets::CJet F_op(const PhaseJets& P, int k, const jets::CJet& f);

struct SymbolTerms {
    cplx s2b2, s1b1, s0b0;
    cplx sum() const { return s2b2 + s1b1 + s0b0; }
};
SymbolTerms symbol_terms(const MetricModel& m, double t, const Vec2& y, const Vec2& eta, double eps, const PhaseJetOptions& opt = {});

struct SubprincipalOptions {
    double quad_tol = 1e-10;  // absolute error per unit time of the adaptive Gauss-Kronrod rule
    double b0_shift = 0;      // replaces b0 by b0 + shift
    PhaseJetOptions jets;
};
// a_{-1}(t; y, eta) = -(i/2h) int_0^t [S_{-2} b2 + S_{-1} b1 + S_0 b0] dtau
cplx subprincipal_symbol(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, double t, const SubprincipalOptions& opt = {});
// cumulative values on a sorted grid (panels between consecutive points)
std::vector<cplx> subprincipal_on_grid(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, const std::vector<double>& t_grid,
                                       const SubprincipalOptions& opt = {});

// linear-in-t coefficient of a_{-1} at eps = 0 by Richardson extrapolation of a_{-1}(t)/t
cplx small_time_coefficient(const MetricModel& m, const Vec2& y, const Vec2& eta);

struct FteResidual {
    cplx lhs, rhs;     // the two sides of the first transport equation
    cplx residual;     // lhs - rhs
    cplx b1_frak;      // S_{-1} b2 + S_0 b1, which vanishes as well
};
FteResidual fte_residual(const MetricModel& m, const Vec2& y, const Vec2& eta, double eps, double t, const PhaseJetOptions& opt = {});

// Homogeneous components of the propagator symbol: a_0 = 1 and a_{-1}.
struct SymbolSeries {
    const MetricModel* model = nullptr;
    SubprincipalOptions options;
    cplx component(int k, double t, const Vec2& y, const Vec2& eta, double eps) const;
};

// Identity operator in the Levi-Civita form at t = 0: s_{-k}(y, eta) = c_k (eps/h)^k,
// with c_k an exact rational from the normal-coordinate series procedure.
struct IdentityCoefficient {
    int k = 0;
    std::string exact;  // "p/q"
    double value = 0;
};
struct IdentitySymbolTable {
    int dimension = 2;
    std::vector<IdentityCoefficient> coefficients;  // k = 0 .. max order
    cplx operator()(int k, double eps, double h) const;
};
int identity_symbol_max_order(int d);  // 10 for d = 2, else 2
IdentitySymbolTable identity_symbol_table(int d, int max_order);
cplx identity_symbol(int d, double eps, int k, double h);

}  // namespace wavefront

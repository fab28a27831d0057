// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace wavefront::jets {

// Truncated multivariate Taylor expansions. A Layout fixes the number of variables,
// the total order and optional caps on the degree of groups of variables. Any set of
// monomials closed under division is a valid truncation, so products stay exact up to
// the retained monomials.
struct DegreeCap {
    uint32_t var_mask;  // bit v set if variable v belongs to the group
    int max_degree;
};

class Layout {
public:
    static const Layout& get(int nvars, int order, std::vector<DegreeCap> caps = {});

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(degree_.size()); }
    int degree(int i) const { return degree_[i]; }
    const uint8_t* exponents(int i) const { return &exps_[static_cast<size_t>(i) * nvars_]; }
    int exponent(int i, int v) const { return exps_[static_cast<size_t>(i) * nvars_ + v]; }

    // -1 if the multi-index is not retained.
    int index(const int* e) const;
    int index(std::initializer_list<int> e) const;
    bool contains(const int* e) const;

    struct Pair {
        uint16_t j, k;
    };
    // products: for a fixed left monomial i, pairs (j, k) with e_i + e_j = e_k
    const Pair* row_begin(int i) const { return pairs_.data() + row_start_[i]; }
    const Pair* row_end(int i) const { return pairs_.data() + row_start_[i + 1]; }

    struct DerivEntry {
        uint16_t src, dst;
        uint8_t factor;
    };
    const std::vector<DerivEntry>& deriv_table(int v) const { return deriv_[v]; }
    // index of the monomial obtained by raising variable v by one, -1 if truncated
    int raise(int i, int v) const { return raise_[static_cast<size_t>(i) * nvars_ + v]; }

    size_t pair_count() const { return pairs_.size(); }

private:
    Layout(int nvars, int order, std::vector<DegreeCap> caps);
    bool admissible(const int* e) const;

    int nvars_;
    int order_;
    std::vector<DegreeCap> caps_;
    std::vector<uint8_t> exps_;
    std::vector<int> degree_;
    std::vector<int> dense_;  // (order+1)^nvars lookup
    std::vector<uint32_t> row_start_;
    std::vector<Pair> pairs_;
    std::vector<std::vector<DerivEntry>> deriv_;
    std::vector<int> raise_;
};

namespace detail {
template <class S>
inline void mul_acc(S& c, const S& a, const S& b) {
    c += a * b;
}
inline void mul_acc(std::complex<double>& c, const std::complex<double>& a, const std::complex<double>& b) {
    // avoids the NaN-checking library multiply
    double re = c.real() + a.real() * b.real() - a.imag() * b.imag();
    double im = c.imag() + a.real() * b.imag() + a.imag() * b.real();
    c = {re, im};
}
template <class S>
inline bool is_zero(const S& a) {
    return a == S(0);
}
}  // namespace detail

template <class S>
class Jet {
public:
    using scalar_type = S;

    Jet() = default;
    explicit Jet(const Layout& L) : L_(&L), c_(L.size(), S(0)) {}
    Jet(const Layout& L, const S& value) : L_(&L), c_(L.size(), S(0)) { c_[0] = value; }

    static Jet constant(const Layout& L, const S& value) { return Jet(L, value); }
    static Jet variable(const Layout& L, int v, const S& base) {
        Jet r(L, base);
        int e[16] = {0};
        e[v] = 1;
        int idx = L.index(e);
        if (idx >= 0) r.c_[idx] = S(1);
        return r;
    }

    const Layout& layout() const { return *L_; }
    bool valid() const { return L_ != nullptr; }
    const S& value() const { return c_[0]; }
    S& operator[](int i) { return c_[i]; }
    const S& operator[](int i) const { return c_[i]; }
    const std::vector<S>& coeffs() const { return c_; }
    std::vector<S>& coeffs() { return c_; }

    // Taylor coefficient of the monomial x^e (not the derivative).
    S coeff(std::initializer_list<int> e) const {
        int idx = L_->index(e);
        return idx < 0 ? S(0) : c_[idx];
    }
    // Partial derivative value d^e f at the base point.
    S derivative_value(std::initializer_list<int> e) const {
        int idx = L_->index(e);
        if (idx < 0) return S(0);
        S r = c_[idx];
        for (int k : e)
            for (int m = 2; m <= k; ++m) r = r * S(m);
        return r;
    }

    Jet& operator+=(const Jet& o) {
        for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator+=(const S& s) {
        c_[0] += s;
        return *this;
    }
    Jet& operator-=(const S& s) {
        c_[0] -= s;
        return *this;
    }
    Jet& operator*=(const S& s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    Jet& operator*=(const Jet& o) {
        *this = *this * o;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, const S& s) { return a += s; }
    friend Jet operator+(const S& s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, const S& s) { return a -= s; }
    friend Jet operator-(const S& s, const Jet& a) {
        Jet r = -a;
        r.c_[0] += s;
        return r;
    }
    friend Jet operator*(Jet a, const S& s) { return a *= s; }
    friend Jet operator*(const S& s, Jet a) { return a *= s; }
    Jet operator-() const {
        Jet r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const Layout& L = *a.L_;
        Jet r(L);
        const int n = L.size();
        for (int i = 0; i < n; ++i) {
            const S& ai = a.c_[i];
            if (detail::is_zero(ai)) continue;
            for (const auto* p = L.row_begin(i); p != L.row_end(i); ++p) detail::mul_acc(r.c_[p->k], ai, b.c_[p->j]);
        }
        return r;
    }

    // d/dx_v
    Jet d(int v) const {
        Jet r(*L_);
        for (const auto& e : L_->deriv_table(v)) r.c_[e.dst] = c_[e.src] * S(static_cast<int>(e.factor));
        return r;
    }

    // The jet with its constant term removed.
    Jet nilpotent() const {
        Jet r = *this;
        r.c_[0] = S(0);
        return r;
    }

    // Evaluate the truncated polynomial at a displacement from the base point.
    S evaluate(const std::vector<S>& dx) const {
        S total(0);
        for (int i = 0; i < L_->size(); ++i) {
            if (detail::is_zero(c_[i])) continue;
            S m = c_[i];
            const uint8_t* e = L_->exponents(i);
            for (int v = 0; v < L_->nvars(); ++v)
                for (int k = 0; k < e[v]; ++k) m = m * dx[v];
            total += m;
        }
        return total;
    }

private:
    const Layout* L_ = nullptr;
    std::vector<S> c_;
};

// f(u) given the Taylor coefficients f_k = f^(k)(u0)/k! at the base value u0 of u.
template <class S>
Jet<S> compose(const Jet<S>& u, const std::vector<S>& f) {
    Jet<S> delta = u.nilpotent();
    int D = u.layout().order();
    int top = std::min<int>(D, static_cast<int>(f.size()) - 1);
    Jet<S> r(u.layout(), f[top]);
    for (int k = top - 1; k >= 0; --k) {
        r = r * delta;
        r += f[k];
    }
    return r;
}

// Coefficients of (1+z)^p for rational p = num/den, valid for any field type.
template <class S>
std::vector<S> binomial_series(int num, int den, int order) {
    std::vector<S> f(order + 1, S(0));
    f[0] = S(1);
    for (int k = 1; k <= order; ++k) {
        // C(p,k) = C(p,k-1) (p-k+1)/k
        f[k] = f[k - 1] * (S(num - (k - 1) * den) / S(den * k));
    }
    return f;
}

using CJet = Jet<std::complex<double>>;
using cplx = std::complex<double>;

// Elementary functions for complex-double jets.
CJet exp(const CJet& u);
CJet log(const CJet& u);
CJet pow(const CJet& u, double p);
CJet sqrt(const CJet& u);
CJet sqrt_branch(const CJet& u, cplx root0);  // root0 chooses the branch of the value
CJet inv(const CJet& u);
CJet sin(const CJet& u);
CJet cos(const CJet& u);
CJet sinh(const CJet& u);
CJet cosh(const CJet& u);
CJet asin(const CJet& u);
CJet asinh(const CJet& u);
CJet acos(const CJet& u);
CJet acosh(const CJet& u);
inline CJet operator/(const CJet& a, const CJet& b) { return a * inv(b); }
inline CJet operator/(const CJet& a, cplx s) { return a * (1.0 / s); }
inline CJet operator/(cplx s, const CJet& b) { return inv(b) * s; }

// Taylor coefficients of a univariate function at a point, from coefficients of its
// derivative: f_k = g_{k-1}/k.
std::vector<cplx> integrate_series(cplx f0, const std::vector<cplx>& g);

}  // namespace wavefront::jets

// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "wavefront/symbolcalc.hpp"

// In normal coordinates about y the phase at t = 0 is x.eta + (i eps / 2)|eta||x|^2 and
// det phi_xeta = 1 + i eps x.eta/|eta|. Expanding exp(-(eps/2)|eta||x|^2) sqrt(det) in
// powers of x and trading x^al for (i d/deta)^al turns the amplitude into a symbol; the
// s_{-k} are then fixed order by order so that this symbol is 1. Every term has the form
// eta^beta |eta|^s, so differentiation is exact. Everything is computed at eps = h = 1.

namespace wavefront {

namespace {

using Key = std::pair<std::vector<int>, int>;  // (beta, s)
using Poly = std::map<Key, mpq_class>;

Poly derive(const Poly& p, int j) {
    Poly out;
    for (const auto& [key, c] : p) {
        const auto& [beta, s] = key;
        if (beta[j] > 0) {
            auto b = beta;
            --b[j];
            out[{b, s}] += c * beta[j];
        }
        if (s != 0) {
            auto b = beta;
            ++b[j];
            out[{b, s - 2}] += c * s;
        }
    }
    for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
    return out;
}

// at a unit vector, so |eta|^s = 1
mpq_class evaluate(const Poly& p, const std::vector<mpq_class>& unit) {
    mpq_class total = 0;
    for (const auto& [key, c] : p) {
        mpq_class term = c;
        for (size_t v = 0; v < unit.size(); ++v)
            for (int e = 0; e < key.first[v]; ++e) term *= unit[v];
        total += term;
    }
    return total;
}

void compositions(int d, int n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == d - 1) {
        cur.push_back(n);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int a = 0; a <= n; ++a) {
        cur.push_back(a);
        compositions(d, n - a, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> multi_indices(int d, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    compositions(d, n, cur, out);
    return out;
}

mpz_class factorial(int n) {
    mpz_class r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

mpq_class multinomial(int n, const std::vector<int>& a) {
    mpz_class r = factorial(n);
    for (int x : a) r /= factorial(x);
    return mpq_class(r);
}

mpq_class binom_half(int k) {
    mpq_class c = 1;
    for (int i = 0; i < k; ++i) c = c * (mpq_class(1, 2) - i) / (i + 1);
    return c;
}

// contribution at order -m of s_{-mp} |eta|^{-mp} times the (j, k) term of the x-expansion,
// evaluated at a unit covector
mpq_class contribution(int d, int j, int k, int mp, const std::vector<mpq_class>& unit) {
    mpq_class base = binom_half(k) / mpq_class(factorial(j));
    for (int r = 0; r < j; ++r) base *= mpq_class(-1, 2);
    mpq_class total = 0;
    for (const auto& a : multi_indices(d, j))
        for (const auto& g : multi_indices(d, k)) {
            Poly p;
            p[{g, j - k - mp}] = base * multinomial(j, a) * multinomial(k, g);
            int n = 0;
            for (int v = 0; v < d; ++v) {
                const int order = 2 * a[v] + g[v];
                n += order;
                for (int r = 0; r < order; ++r) p = derive(p, v);
            }
            // i^k from sqrt(det), i^n from the integration by parts; k + n = 2(j + k)
            const int ipow = (k + n) % 4;
            if (ipow % 2) fail(ErrorCode::Internal, "odd power of i in identity symbol");
            mpq_class v = evaluate(p, unit);
            total += ipow == 0 ? v : mpq_class(-v);
        }
    return total;
}

std::vector<mpq_class> unit_covector(int d, bool skew) {
    std::vector<mpq_class> u(d, 0);
    if (skew && d >= 2) {
        u[0] = mpq_class(3, 5);
        u[1] = mpq_class(4, 5);
    } else {
        u[0] = 1;
    }
    return u;
}

std::vector<mpq_class> series(int d, int max_order) {
    std::vector<mpq_class> c{1};
    const auto u1 = unit_covector(d, true), u2 = unit_covector(d, false);
    for (int m = 1; m <= max_order; ++m) {
        mpq_class t1 = 0, t2 = 0;
        for (int mp = 0; mp < m; ++mp)
            for (int j = 0; j <= m - mp; ++j) {
                const int k = m - mp - j;
                t1 += c[mp] * contribution(d, j, k, mp, u1);
                if (d >= 2) t2 += c[mp] * contribution(d, j, k, mp, u2);
            }
        // the result must not depend on the direction of eta
        if (d >= 2 && t1 != t2) fail(ErrorCode::Internal, "identity symbol is not isotropic");
        c.push_back(-t1);
    }
    return c;
}

std::mutex cache_mutex;
std::map<int, std::vector<mpq_class>> cache;

const std::vector<mpq_class>& cached_series(int d, int max_order) {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& v = cache[d];
    if (static_cast<int>(v.size()) <= max_order) v = series(d, max_order);
    return v;
}

}  // namespace

int identity_symbol_max_order(int d) { return d == 2 ? 10 : 2; }

IdentitySymbolTable identity_symbol_table(int d, int max_order) {
    if (d < 1) fail(ErrorCode::InvalidArgument, "dimension must be positive");
    if (max_order < 0 || max_order > identity_symbol_max_order(d))
        fail(ErrorCode::UnsupportedOrder, "identity symbol order outside the supported range");
    const auto& c = cached_series(d, max_order);
    IdentitySymbolTable t;
    t.dimension = d;
    for (int k = 0; k <= max_order; ++k) t.coefficients.push_back({k, c[k].get_str(), c[k].get_d()});
    return t;
}

cplx IdentitySymbolTable::operator()(int k, double eps, double h) const {
    if (k < 0 || k >= static_cast<int>(coefficients.size())) fail(ErrorCode::UnsupportedOrder, "order not in table");
    if (!(h > 0)) fail(ErrorCode::InvalidArgument, "h must be positive");
    if (k == 0) return 1.0;
    return coefficients[k].value * std::pow(eps / h, k);
}

cplx identity_symbol(int d, double eps, int k, double h) { return identity_symbol_table(d, k)(k, eps, h); }

}  // namespace wavefront

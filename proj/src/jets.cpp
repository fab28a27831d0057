// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include "wavefront/jets.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

namespace wavefront::jets {

namespace {
using Key = std::tuple<int, int, std::vector<std::pair<uint32_t, int>>>;

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}
std::map<Key, std::unique_ptr<Layout>>& registry() {
    static std::map<Key, std::unique_ptr<Layout>> r;
    return r;
}
}  // namespace

const Layout& Layout::get(int nvars, int order, std::vector<DegreeCap> caps) {
    if (nvars < 1 || nvars > 16 || order < 0) throw std::invalid_argument("jet layout: bad dimensions");
    std::vector<std::pair<uint32_t, int>> ck;
    for (auto& c : caps) ck.emplace_back(c.var_mask, c.max_degree);
    std::sort(ck.begin(), ck.end());
    Key key{nvars, order, ck};
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto& reg = registry();
    auto it = reg.find(key);
    if (it != reg.end()) return *it->second;
    auto* L = new Layout(nvars, order, std::move(caps));
    reg.emplace(key, std::unique_ptr<Layout>(L));
    return *L;
}

bool Layout::admissible(const int* e) const {
    int total = 0;
    for (int v = 0; v < nvars_; ++v) {
        if (e[v] < 0) return false;
        total += e[v];
    }
    if (total > order_) return false;
    for (const auto& c : caps_) {
        int g = 0;
        for (int v = 0; v < nvars_; ++v)
            if (c.var_mask & (1u << v)) g += e[v];
        if (g > c.max_degree) return false;
    }
    return true;
}

Layout::Layout(int nvars, int order, std::vector<DegreeCap> caps) : nvars_(nvars), order_(order), caps_(std::move(caps)) {
    double dense_size = 1;
    for (int v = 0; v < nvars; ++v) dense_size *= (order + 1);
    if (dense_size > 5e7) throw std::invalid_argument("jet layout too large");

    // enumerate by total degree, then reverse-lexicographic within a degree
    std::vector<std::vector<int>> mons;
    std::vector<int> e(nvars, 0);
    std::function<void(int, int)> rec = [&](int v, int left) {
        if (v == nvars - 1) {
            e[v] = left;
            if (admissible(e.data())) mons.push_back(e);
            return;
        }
        for (int k = left; k >= 0; --k) {
            e[v] = k;
            rec(v + 1, left - k);
        }
        e[v] = 0;
    };
    for (int deg = 0; deg <= order; ++deg) rec(0, deg);
    if (mons.size() > 65535) throw std::invalid_argument("jet layout exceeds 65535 monomials");

    const int n = static_cast<int>(mons.size());
    exps_.resize(static_cast<size_t>(n) * nvars);
    degree_.resize(n);
    dense_.assign(static_cast<size_t>(dense_size), -1);
    for (int i = 0; i < n; ++i) {
        int code = 0, deg = 0;
        for (int v = 0; v < nvars; ++v) {
            exps_[static_cast<size_t>(i) * nvars + v] = static_cast<uint8_t>(mons[i][v]);
            code = code * (order + 1) + mons[i][v];
            deg += mons[i][v];
        }
        degree_[i] = deg;
        dense_[code] = i;
    }

    row_start_.resize(n + 1);
    std::vector<int> s(nvars);
    for (int i = 0; i < n; ++i) {
        row_start_[i] = static_cast<uint32_t>(pairs_.size());
        for (int j = 0; j < n; ++j) {
            if (degree_[i] + degree_[j] > order) break;  // degrees are sorted ascending
            for (int v = 0; v < nvars; ++v) s[v] = mons[i][v] + mons[j][v];
            int k = index(s.data());
            if (k >= 0) pairs_.push_back({static_cast<uint16_t>(j), static_cast<uint16_t>(k)});
        }
    }
    row_start_[n] = static_cast<uint32_t>(pairs_.size());

    deriv_.resize(nvars);
    raise_.assign(static_cast<size_t>(n) * nvars, -1);
    for (int v = 0; v < nvars; ++v) {
        for (int i = 0; i < n; ++i) {
            if (mons[i][v] > 0) {
                for (int u = 0; u < nvars; ++u) s[u] = mons[i][u];
                s[v] -= 1;
                int dst = index(s.data());
                deriv_[v].push_back({static_cast<uint16_t>(i), static_cast<uint16_t>(dst), static_cast<uint8_t>(mons[i][v])});
            }
            for (int u = 0; u < nvars; ++u) s[u] = mons[i][u];
            s[v] += 1;
            raise_[static_cast<size_t>(i) * nvars + v] = index(s.data());
        }
    }
}

int Layout::index(const int* e) const {
    int code = 0, total = 0;
    for (int v = 0; v < nvars_; ++v) {
        if (e[v] < 0) return -1;
        total += e[v];
        if (total > order_) return -1;
        code = code * (order_ + 1) + e[v];
    }
    return dense_[code];
}

int Layout::index(std::initializer_list<int> e) const {
    int buf[16] = {0};
    int v = 0;
    for (int k : e) {
        if (v >= nvars_) return -1;
        buf[v++] = k;
    }
    return index(buf);
}

bool Layout::contains(const int* e) const { return index(e) >= 0; }

namespace {
std::vector<cplx> factorial_scaled(const std::vector<cplx>& derivs) {
    std::vector<cplx> f(derivs.size());
    double fact = 1;
    for (size_t k = 0; k < derivs.size(); ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        f[k] = derivs[k] / fact;
    }
    return f;
}

// Series for functions whose derivative is (s0 + s2 u^2)^(-1/2).
std::vector<cplx> inverse_trig_series(cplx u0, cplx f0, cplx s0, cplx s2, int order) {
    if (order == 0) return {f0};
    const Layout& L1 = Layout::get(1, order - 1);
    CJet u = CJet::variable(L1, 0, u0);
    CJet g = pow(s2 * (u * u) + s0, -0.5);
    return integrate_series(f0, g.coeffs());
}
}  // namespace

std::vector<cplx> integrate_series(cplx f0, const std::vector<cplx>& g) {
    std::vector<cplx> f(g.size() + 1);
    f[0] = f0;
    for (size_t k = 1; k <= g.size(); ++k) f[k] = g[k - 1] / static_cast<double>(k);
    return f;
}

CJet exp(const CJet& u) {
    int D = u.layout().order();
    cplx e = std::exp(u.value());
    std::vector<cplx> d(D + 1, e);
    return compose(u, factorial_scaled(d));
}

CJet log(const CJet& u) {
    int D = u.layout().order();
    cplx a = u.value();
    std::vector<cplx> f(D + 1);
    f[0] = std::log(a);
    cplx ak = 1;
    for (int k = 1; k <= D; ++k) {
        ak *= a;
        f[k] = ((k % 2) ? 1.0 : -1.0) / (static_cast<double>(k) * ak);
    }
    return compose(u, f);
}

CJet pow(const CJet& u, double p) {
    int D = u.layout().order();
    cplx a = u.value();
    std::vector<cplx> f(D + 1);
    cplx ap = std::pow(a, p);
    cplx ainv = 1.0 / a;
    double c = 1;
    cplx apk = ap;
    for (int k = 0; k <= D; ++k) {
        f[k] = c * apk;
        c *= (p - k) / (k + 1.0);
        apk *= ainv;
    }
    return compose(u, f);
}

CJet sqrt(const CJet& u) { return sqrt_branch(u, std::sqrt(u.value())); }

CJet sqrt_branch(const CJet& u, cplx root0) {
    int D = u.layout().order();
    cplx a = u.value();
    std::vector<cplx> f(D + 1);
    double c = 1;
    cplx apk = root0;
    cplx ainv = 1.0 / a;
    for (int k = 0; k <= D; ++k) {
        f[k] = c * apk;
        c *= (0.5 - k) / (k + 1.0);
        apk *= ainv;
    }
    return compose(u, f);
}

CJet inv(const CJet& u) {
    int D = u.layout().order();
    cplx a = u.value();
    std::vector<cplx> f(D + 1);
    cplx ainv = 1.0 / a, p = ainv;
    for (int k = 0; k <= D; ++k) {
        f[k] = ((k % 2) ? -1.0 : 1.0) * p;
        p *= ainv;
    }
    return compose(u, f);
}

CJet sin(const CJet& u) {
    int D = u.layout().order();
    cplx s = std::sin(u.value()), c = std::cos(u.value());
    std::vector<cplx> d(D + 1);
    const cplx cyc[4] = {s, c, -s, -c};
    for (int k = 0; k <= D; ++k) d[k] = cyc[k % 4];
    return compose(u, factorial_scaled(d));
}

CJet cos(const CJet& u) {
    int D = u.layout().order();
    cplx s = std::sin(u.value()), c = std::cos(u.value());
    std::vector<cplx> d(D + 1);
    const cplx cyc[4] = {c, -s, -c, s};
    for (int k = 0; k <= D; ++k) d[k] = cyc[k % 4];
    return compose(u, factorial_scaled(d));
}

CJet sinh(const CJet& u) {
    int D = u.layout().order();
    cplx s = std::sinh(u.value()), c = std::cosh(u.value());
    std::vector<cplx> d(D + 1);
    for (int k = 0; k <= D; ++k) d[k] = (k % 2) ? c : s;
    return compose(u, factorial_scaled(d));
}

CJet cosh(const CJet& u) {
    int D = u.layout().order();
    cplx s = std::sinh(u.value()), c = std::cosh(u.value());
    std::vector<cplx> d(D + 1);
    for (int k = 0; k <= D; ++k) d[k] = (k % 2) ? s : c;
    return compose(u, factorial_scaled(d));
}

CJet asin(const CJet& u) {
    cplx u0 = u.value();
    return compose(u, inverse_trig_series(u0, std::asin(u0), 1.0, -1.0, u.layout().order()));
}

CJet acos(const CJet& u) {
    CJet r = -asin(u);
    r += cplx(M_PI / 2, 0);
    return r;
}

CJet asinh(const CJet& u) {
    cplx u0 = u.value();
    return compose(u, inverse_trig_series(u0, std::asinh(u0), 1.0, 1.0, u.layout().order()));
}

CJet acosh(const CJet& u) {
    cplx u0 = u.value();
    return compose(u, inverse_trig_series(u0, std::acosh(u0), -1.0, 1.0, u.layout().order()));
}

}  // namespace wavefront::jets

// Copyright (C) 2026 wavefront-kit contributors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavefront.h"

namespace {

using nlohmann::ordered_json;

constexpr int kExitModule = 1;
constexpr int kExitConfig = 2;

// Carries a status code to the exit path.
struct Failure : std::runtime_error {
    int status;
    Failure(int s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(int status) {
    if (status != WF_OK) throw Failure(status, wf_last_error());
}

[[noreturn]] void bad_config(const std::string& what) { throw Failure(WF_CONFIG_PARSE, std::string("ConfigParse: ") + what); }

std::vector<double> parse_list(const std::string& s, const char* name) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            bad_config(std::string("--") + name + ": '" + item + "' is not a number");
        }
    }
    return out;
}

std::vector<double> parse_pair(const std::string& s, const char* name) {
    auto v = parse_list(s, name);
    if (v.size() != 2) bad_config(std::string("--") + name + " needs two comma-separated numbers");
    return v;
}

// "a:b:n" gives n points from a to b; otherwise a comma list
std::vector<double> parse_grid(const std::string& s, const char* name) {
    if (s.find(':') == std::string::npos) return parse_list(s, name);
    std::vector<double> p;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) p.push_back(parse_list(item, name).at(0));
    if (p.size() != 3 || p[2] < 1 || p[2] != std::floor(p[2])) bad_config(std::string("--") + name + " range is a:b:n with n >= 1");
    const int n = static_cast<int>(p[2]);
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = n == 1 ? p[0] : p[0] + (p[1] - p[0]) * k / (n - 1);
    return g;
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
    void add(std::vector<double> row) { rows_.push_back(std::move(row)); }

    void write(std::ostream& os, const std::string& format, const ordered_json& config) const {
        if (format == "json") {
            os << "{\"config\":" << config.dump() << ",\"columns\":" << ordered_json(columns_).dump() << ",\"rows\":[";
            for (size_t i = 0; i < rows_.size(); ++i) {
                os << (i ? "," : "") << "[";
                for (size_t j = 0; j < rows_[i].size(); ++j) {
                    const double v = rows_[i][j];
                    os << (j ? "," : "") << (std::isfinite(v) ? num(v) : "null");
                }
                os << "]";
            }
            os << "]}\n";
            return;
        }
        os << "# wavefront-kit " << wf_version() << "\n# config: " << config.dump() << "\n";
        for (size_t j = 0; j < columns_.size(); ++j) os << (j ? "," : "") << columns_[j];
        os << "\n";
        for (const auto& r : rows_) {
            for (size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << num(r[j]);
            os << "\n";
        }
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

struct ModelHandle {
    wf_model* m = nullptr;
    ~ModelHandle() { wf_model_free(m); }
};

struct Common {
    std::string format = "csv";
    std::string output;
    int threads = 0;
    unsigned seed = 0;
};

struct Options {
    std::string model, y = "0,0", eta = "1,0", x = "0,0", t_grid, lambda_grid = "50:200:16";
    double t0 = 0, t1 = 2 * M_PI, T = 2 * M_PI, t = 1, eps = 1, b0_shift = 0, R = 30, shift = 0, sigma = 2, h = 1;
    int samples = 101, steps = 400, depth = 1, angular = 256, radial = 400, x_chart = 0, l_max = 0, d = 2, max_order = -1;
};

ordered_json config_of(const std::string& sub, const Common& c, const Options& o, const std::string& model_json) {
    ordered_json j;
    j["subcommand"] = sub;
    j["format"] = c.format;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    if (!o.model.empty()) {
        j["model_file"] = o.model;
        j["model"] = ordered_json::parse(model_json);
    }
    return j;
}

std::string model_json(const wf_model* m) {
    size_t need = 0;
    wf_model_to_json(m, nullptr, 0, &need);
    std::string s(need, '\0');
    check(wf_model_to_json(m, s.data(), s.size(), &need));
    s.resize(need - 1);
    return s;
}

void emit(const Table& t, const Common& c, const ordered_json& config) {
    if (c.output.empty()) {
        t.write(std::cout, c.format, config);
        return;
    }
    std::ofstream f(c.output);
    if (!f) throw Failure(WF_CONFIG_PARSE, "ConfigParse: cannot write '" + c.output + "'");
    t.write(f, c.format, config);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wave propagators on surfaces through complex-phase oscillatory integrals"};
    app.require_subcommand(1);
    Common common;
    Options o;
    app.add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("-o,--output", common.output, "write the table to a file");
    app.add_option("--threads", common.threads, "worker threads (0: available parallelism; WAVEFRONT_THREADS overrides)");
    app.add_option("--seed", common.seed, "recorded in the output header");

    auto model_opt = [&](CLI::App* s, bool required = true) {
        s->fallthrough();  // global flags may follow the subcommand
        auto* opt = s->add_option("--model", o.model, "model definition (JSON)");
        if (required) opt->required();
    };
    auto ray_opts = [&](CLI::App* s) {
        s->add_option("--y", o.y, "base point u,v (chart 0)");
        s->add_option("--eta", o.eta, "covector a,b at y");
    };

    auto* flow = app.add_subcommand("flow", "sample the cogeodesic flow");
    model_opt(flow);
    ray_opts(flow);
    flow->add_option("--t0", o.t0);
    flow->add_option("--t1", o.t1);
    flow->add_option("--samples", o.samples)->check(CLI::PositiveNumber);

    auto* phase = app.add_subcommand("phase", "branch-tracked weight along a trajectory");
    model_opt(phase);
    ray_opts(phase);
    phase->add_option("--eps", o.eps);
    phase->add_option("--t0", o.t0);
    phase->add_option("--t1", o.t1);
    phase->add_option("--samples", o.samples)->check(CLI::PositiveNumber);

    auto* maslov = app.add_subcommand("maslov", "Maslov index of a loop; the winding trace goes to --output");
    model_opt(maslov);
    ray_opts(maslov);
    maslov->add_option("--T", o.T, "loop period");
    maslov->add_option("--eps", o.eps);
    maslov->add_option("--steps", o.steps)->check(CLI::PositiveNumber);

    auto* symbol = app.add_subcommand("symbol", "subprincipal symbol and transport residual");
    model_opt(symbol);
    ray_opts(symbol);
    symbol->add_option("--eps", o.eps);
    symbol->add_option("--t", o.t, "single time");
    symbol->add_option("--t-grid", o.t_grid, "a:b:n or a comma list (overrides --t)");
    symbol->add_option("--b0-shift", o.b0_shift);

    auto* ident = app.add_subcommand("identity-symbol", "homogeneous symbols of the identity operator");
    ident->fallthrough();
    ident->add_option("--d", o.d, "dimension")->check(CLI::PositiveNumber);
    ident->add_option("--max-order", o.max_order, "highest order (default: all supported)");
    ident->add_option("--eps", o.eps);
    ident->add_option("--length", o.h, "covector length h");

    auto* kernel = app.add_subcommand("kernel", "oscillatory kernel against the spectral sum");
    model_opt(kernel);
    kernel->add_option("--x", o.x);
    kernel->add_option("--x-chart", o.x_chart);
    kernel->add_option("--y", o.y);
    kernel->add_option("--eps", o.eps);
    kernel->add_option("--R", o.R, "regulator scale");
    kernel->add_option("--depth", o.depth, "symbol depth 0 or 1");
    kernel->add_option("--t-grid", o.t_grid)->required();
    kernel->add_option("--angular-nodes", o.angular);
    kernel->add_option("--radial-nodes", o.radial);
    kernel->add_option("--shift", o.shift, "0 or 0.25 (spectral reference)");
    kernel->add_option("--l-max", o.l_max);

    auto* weyl = app.add_subcommand("weyl", "mollified counting derivative on the sphere");
    model_opt(weyl, false);
    weyl->add_option("--lambda-grid", o.lambda_grid);
    weyl->add_option("--sigma", o.sigma);
    weyl->add_option("--l-max", o.l_max);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "wavefront-kit: ConfigParse: " << e.what() << "\n";
        return kExitConfig;
    }
    if (const char* env = std::getenv("WAVEFRONT_THREADS")) {
        try {
            common.threads = std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "wavefront-kit: ConfigParse: WAVEFRONT_THREADS='" << env << "' is not an integer\n";
            return kExitConfig;
        }
    }

    try {
        ModelHandle model;
        std::string mjson;
        if (!o.model.empty()) {
            check(wf_model_from_file(o.model.c_str(), &model.m));
            mjson = model_json(model.m);
        }
        const std::string sub = app.get_subcommands().front()->get_name();
        ordered_json cfg = config_of(sub, common, o, mjson);
        auto y = parse_pair(o.y, "y");
        auto eta = parse_pair(o.eta, "eta");

        if (flow->parsed()) {
            cfg.update({{"y", y}, {"eta", eta}, {"t0", o.t0}, {"t1", o.t1}, {"samples", o.samples}});
            Table tab({"t", "chart", "x1", "x2", "xi1", "xi2", "det_dx_deta", "h"});
            for (int k = 0; k < o.samples; ++k) {
                double t = o.samples == 1 ? o.t0 : o.t0 + (o.t1 - o.t0) * k / (o.samples - 1);
                wf_flow_state s;
                check(wf_flow_sample(model.m, y.data(), eta.data(), t, &s));
                double h = 0;
                check(wf_hamiltonian(model.m, s.x_star, s.xi_star, &h));
                double det = s.dx_deta[0] * s.dx_deta[3] - s.dx_deta[1] * s.dx_deta[2];
                tab.add({s.t, double(s.chart), s.x_star[0], s.x_star[1], s.xi_star[0], s.xi_star[1], det, h});
            }
            emit(tab, common, cfg);
        } else if (phase->parsed()) {
            cfg.update({{"y", y}, {"eta", eta}, {"eps", o.eps}, {"t0", o.t0}, {"t1", o.t1}, {"samples", o.samples}});
            std::vector<double> grid(o.samples);
            for (int k = 0; k < o.samples; ++k) grid[k] = o.samples == 1 ? o.t0 : o.t0 + (o.t1 - o.t0) * k / (o.samples - 1);
            std::vector<wf_weight> w(grid.size());
            check(wf_weight_along(model.m, y.data(), eta.data(), o.eps, grid.data(), grid.size(), w.data()));
            Table tab({"t", "re_det2", "im_det2", "branch_arg", "re_w", "im_w"});
            for (const auto& r : w) tab.add({r.t, r.det2_re, r.det2_im, r.branch_arg, r.w_re, r.w_im});
            emit(tab, common, cfg);
        } else if (maslov->parsed()) {
            cfg.update({{"y", y}, {"eta", eta}, {"T", o.T}, {"eps", o.eps}, {"steps", o.steps}});
            int index = 0;
            double winding = 0;
            size_t n = 0;
            check(wf_maslov(model.m, y.data(), eta.data(), o.T, o.eps, o.steps, &index, &winding, nullptr, nullptr, 0, &n));
            std::vector<double> t(n), arg(n);
            check(wf_maslov(model.m, y.data(), eta.data(), o.T, o.eps, o.steps, &index, &winding, t.data(), arg.data(), n, &n));
            std::cout << index << "\n";
            if (!common.output.empty()) {
                Table tab({"t", "branch_arg", "winding"});
                for (size_t k = 0; k < n; ++k) tab.add({t[k], arg[k], -arg[k] / (2 * M_PI)});
                cfg["index"] = index;
                emit(tab, common, cfg);
            }
        } else if (symbol->parsed()) {
            std::vector<double> grid = o.t_grid.empty() ? std::vector<double>{o.t} : parse_grid(o.t_grid, "t-grid");
            cfg.update({{"y", y}, {"eta", eta}, {"eps", o.eps}, {"t", grid}, {"b0_shift", o.b0_shift}});
            Table tab({"t", "re_a_m1", "im_a_m1", "fte_residual"});
            for (double t : grid) {
                double a[2], r[2];
                check(wf_subprincipal(model.m, y.data(), eta.data(), o.eps, t, o.b0_shift, a));
                check(wf_fte_residual(model.m, y.data(), eta.data(), o.eps, t, r));
                tab.add({t, a[0], a[1], std::hypot(r[0], r[1])});
            }
            emit(tab, common, cfg);
        } else if (ident->parsed()) {
            const int top = o.max_order < 0 ? wf_identity_symbol_max_order(o.d) : o.max_order;
            cfg.update({{"d", o.d}, {"max_order", top}, {"eps", o.eps}, {"h", o.h}});
            // the exact column is text, so this table is written directly
            std::vector<std::string> exact;
            std::vector<std::array<double, 3>> rows;
            for (int k = 0; k <= top; ++k) {
                size_t need = 0;
                wf_identity_symbol_exact(o.d, k, nullptr, 0, &need);
                std::string s(need ? need : 1, '\0');
                check(wf_identity_symbol_exact(o.d, k, s.data(), s.size(), &need));
                s.resize(need - 1);
                double v[2];
                check(wf_identity_symbol(o.d, o.eps, k, o.h, v));
                exact.push_back(s);
                rows.push_back({double(k), v[0], v[1]});
            }
            std::ofstream file;
            if (!common.output.empty()) {
                file.open(common.output);
                if (!file) throw Failure(WF_CONFIG_PARSE, "ConfigParse: cannot write '" + common.output + "'");
            }
            std::ostream& os = common.output.empty() ? std::cout : file;
            if (common.format == "json") {
                os << "{\"config\":" << cfg.dump() << ",\"columns\":[\"k\",\"exact\",\"re_s\",\"im_s\"],\"rows\":[";
                for (size_t i = 0; i < rows.size(); ++i)
                    os << (i ? "," : "") << "[" << int(rows[i][0]) << "," << ordered_json(exact[i]).dump() << "," << num(rows[i][1]) << ","
                       << num(rows[i][2]) << "]";
                os << "]}\n";
            } else {
                os << "# wavefront-kit " << wf_version() << "\n# config: " << cfg.dump() << "\nk,exact,re_s,im_s\n";
                for (size_t i = 0; i < rows.size(); ++i)
                    os << int(rows[i][0]) << "," << exact[i] << "," << num(rows[i][1]) << "," << num(rows[i][2]) << "\n";
            }
        } else if (kernel->parsed()) {
            auto x = parse_pair(o.x, "x");
            auto grid = parse_grid(o.t_grid, "t-grid");
            cfg.update({{"x", x},
                        {"x_chart", o.x_chart},
                        {"y", y},
                        {"eps", o.eps},
                        {"R", o.R},
                        {"depth", o.depth},
                        {"t", grid},
                        {"angular_nodes", o.angular},
                        {"radial_nodes", o.radial},
                        {"shift", o.shift},
                        {"l_max", o.l_max}});
            const bool spectral = std::string(wf_model_kind(model.m)) == "sphere2";
            Table tab({"t", "re_u_osc", "im_u_osc", "re_u_spec", "im_u_spec", "abs_diff"});
            for (double t : grid) {
                wf_kernel_request req;
                wf_kernel_request_init(&req);
                req.t = t;
                req.x[0] = x[0];
                req.x[1] = x[1];
                req.x_chart = o.x_chart;
                req.y[0] = y[0];
                req.y[1] = y[1];
                req.eps = o.eps;
                req.symbol_depth = o.depth;
                req.regulator = o.R;
                req.angular_nodes = o.angular;
                req.radial_nodes = o.radial;
                req.threads = common.threads;
                double u[2], s[2] = {NAN, NAN};
                check(wf_kernel_oscillatory(model.m, &req, u));
                if (spectral) {
                    if (o.x_chart != 0) bad_config("the spectral reference takes x in chart 0");
                    check(wf_kernel_spectral(o.l_max, o.shift, t, x.data(), y.data(), o.R, s));
                }
                tab.add({t, u[0], u[1], s[0], s[1], std::hypot(u[0] - s[0], u[1] - s[1])});
            }
            emit(tab, common, cfg);
        } else if (weyl->parsed()) {
            if (model.m && std::string(wf_model_kind(model.m)) != "sphere2") bad_config("weyl uses the exact spectrum of the sphere");
            auto grid = parse_grid(o.lambda_grid, "lambda-grid");
            cfg.update({{"lambda", grid}, {"sigma", o.sigma}, {"l_max", o.l_max}});
            std::vector<double> v(grid.size());
            check(wf_mollified_counting_derivative(grid.data(), grid.size(), o.sigma, o.l_max, common.threads, v.data()));
            double c[3];
            check(wf_weyl_coefficients(2, 2.0, c));
            Table tab({"lambda", "n_prime_mu", "c1_lambda", "rel_err"});
            for (size_t k = 0; k < grid.size(); ++k) tab.add({grid[k], v[k], c[0] * grid[k], v[k] / (c[0] * grid[k]) - 1});
            emit(tab, common, cfg);
        }
    } catch (const Failure& f) {
        std::cerr << "wavefront-kit: " << f.what() << "\n";
        return f.status == WF_MODEL_LOAD || f.status == WF_CONFIG_PARSE ? kExitConfig : kExitModule;
    } catch (const std::exception& e) {
        std::cerr << "wavefront-kit: Internal: " << e.what() << "\n";
        return kExitModule;
    }
    return 0;
}

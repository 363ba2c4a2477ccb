// Command-line front end: gate checking, solving, verification bundles, and
// oracle comparison for the four-velocity gas solver.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "broadwell/config.hpp"
#include "broadwell/kernels.hpp"
#include "broadwell/oracle.hpp"
#include "broadwell/output.hpp"
#include "broadwell/solver.hpp"

namespace {

using namespace broadwell;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

bool g_quiet = false;

void say(const std::string& line) {
    if (!g_quiet) std::printf("%s\n", line.c_str());
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIters: return "max_iters";
        default: return "diverged";
    }
}

int cmd_check_gate(const std::string& config_path) {
    const RunConfig rc = load_run_config(config_path);
    const GateReport g = gate_report(rc.problem);
    std::printf("p = %s\n", fmt(g.p).c_str());
    std::printf("q = %s\n", fmt(g.q).c_str());
    std::printf("pq = %s\n", fmt(g.pq).c_str());
    std::printf("gate = %s\n", g.gate_ok ? "ok" : "violated");
    std::printf("r_lo = %s\n", fmt(g.r_lo).c_str());
    std::printf("r_hi = %s\n", fmt(g.r_hi).c_str());
    std::printf("bound_B = %s\n", fmt(g.bound_B).c_str());
    std::printf("bound_full = %s\n", fmt(g.bound_full).c_str());
    std::printf("lambda_star = %s\n", fmt(g.lambda_star).c_str());
    return g.gate_ok ? kExitOk : kExitCheckFailed;
}

double oracle_rel_error(const Solution& sol, const UpwindSolution& fd, int nsample) {
    const SpaceTimeBox& b = sol.data().box;
    double scale = 0.0, err = 0.0;
    for (int m = 0; m < nsample; ++m) {
        const double t = b.T * m / (nsample - 1);
        for (int i = 0; i < nsample; ++i) {
            const double x = b.a1 + (b.b1 - b.a1) * i / (nsample - 1);
            for (int j = 0; j < nsample; ++j) {
                const double y = b.a2 + (b.b2 - b.a2) * j / (nsample - 1);
                const Densities d = sol.sample(t, x, y);
                const double vals[4] = {d.n1, d.n2, d.n3, d.n4};
                for (int sp = 1; sp <= 4; ++sp) {
                    scale = std::max(scale, std::fabs(vals[sp - 1]));
                    err = std::max(err, std::fabs(vals[sp - 1] - fd.value(sp, t, x, y)));
                }
            }
        }
    }
    return scale > 0.0 ? err / scale : err;
}

int cmd_solve(const std::string& config_path, bool override_gate,
              const std::string& slices_arg) {
    const auto t_start = std::chrono::steady_clock::now();
    const RunConfig rc = load_run_config(config_path);
    SolverConfig scfg = rc.solver;
    scfg.override_gate = scfg.override_gate || override_gate;

    std::vector<double> slice_times;
    if (slices_arg.empty()) {
        slice_times = {0.0, 0.5 * rc.problem.box.T, rc.problem.box.T};
    } else {
        std::stringstream ss(slices_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                slice_times.push_back(std::stod(tok));
            } catch (...) {
                std::fprintf(stderr, "error: bad slice time '%s'\n", tok.c_str());
                return kExitUsage;
            }
        }
    }

    const Solution sol = solve(rc.problem, scfg);
    if (sol.trace().status == SolveStatus::Diverged) {
        std::fprintf(stderr,
                     "error: iteration diverged (5 consecutive growing deltas); "
                     "check grid and quadrature settings\n");
        return kExitCheckFailed;
    }

    std::filesystem::create_directories(rc.output_dir);
    Summary sum;
    sum.add("config", config_path);
    sum.add("kernels.backend", std::string(kernels::active_backend()));
    const GateReport& g = sol.gate();
    sum.add("gate.p", g.p);
    sum.add("gate.q", g.q);
    sum.add("gate.pq", g.pq);
    sum.add("gate.ok", g.gate_ok ? "true" : "false");
    sum.add("gate.override", scfg.override_gate ? "true" : "false");
    sum.add("gate.r_lo", g.r_lo);
    sum.add("gate.r_hi", g.r_hi);
    sum.add("gate.bound_B", g.bound_B);
    sum.add("gate.bound_full", g.bound_full);
    sum.add("gate.lambda_star", g.lambda_star);

    sum.add("solver.status", status_name(sol.trace().status));
    sum.add("solver.iterations", static_cast<long long>(sol.trace().steps.size()));
    sum.add("solver.final_delta", sol.trace().final_delta());
    sum.add("solver.operator", scfg.use_sigma ? "damped" : "plain");
    for (const auto& st : sol.trace().steps) {
        sum.add("solver.delta." + std::to_string(st.k), st.delta);
    }
    double kappa = -1.0;
    if (g.gate_ok) {
        kappa = contraction_factor(g, rc.problem.box, rc.problem.params);
        sum.add("solver.kappa", kappa);
        if (kappa < 1.0 && !sol.trace().steps.empty())
            sum.add("solver.error_estimate", error_estimate(sol.trace(), kappa));
    }

    const auto res = residual(sol, rc.problem);
    sum.add("residual.n1", res[0]);
    sum.add("residual.n2", res[1]);
    sum.add("residual.n3", res[2]);
    sum.add("residual.n4", res[3]);

    const auto db = derivative_bound_check(sol, g);
    double worst_dt = 0, worst_dx = 0, worst_dy = 0;
    for (int s = 0; s < 4; ++s) {
        worst_dt = std::max(worst_dt, db.measured[s][0]);
        worst_dx = std::max(worst_dx, db.measured[s][1]);
        worst_dy = std::max(worst_dy, db.measured[s][2]);
    }
    sum.add("deriv.sup_dt", worst_dt);
    sum.add("deriv.bound_dt", db.bounds[0]);
    sum.add("deriv.sup_dx", worst_dx);
    sum.add("deriv.bound_dx", db.bounds[1]);
    sum.add("deriv.sup_dy", worst_dy);
    sum.add("deriv.bound_dy", db.bounds[2]);

    sum.add("positivity.min_node", min_value(sol.field()));
    sum.add("norm.sup", sup_norm(sol.field()));

    const auto mb = mass_balance(sol);
    sum.add("mass.defect", mb.mass_defect);
    sum.add("mass.scale", mb.mass_scale);
    sum.add("momentum.x_defect", mb.momx_defect);
    sum.add("momentum.y_defect", mb.momy_defect);

    if (rc.problem.params.S == 0.0) {
        // Pure transport: report the deviation from the closed-form solution.
        double dev = 0.0;
        const SpaceTimeBox& b = rc.problem.box;
        const int n = 17;
        for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double t = b.T * m / (n - 1);
                    const double x = b.a1 + (b.b1 - b.a1) * i / (n - 1);
                    const double y = b.a2 + (b.b2 - b.a2) * j / (n - 1);
                    const Densities d = sol.sample(t, x, y);
                    const double v[4] = {d.n1, d.n2, d.n3, d.n4};
                    for (int sp = 1; sp <= 4; ++sp)
                        dev = std::max(dev,
                                       std::fabs(v[sp - 1] -
                                                 free_streaming_exact(rc.problem, t, x, y, sp)));
                }
        sum.add("freestream.max_deviation", dev);
    }

    int slice_idx = 0;
    for (double t : slice_times) {
        char name[64];
        std::snprintf(name, sizeof name, "slice_%03d.csv", slice_idx);
        const std::string base = rc.output_dir + "/";
        write_slice_csv(base + name, sol, t, rc.output_nx, rc.output_ny);
        sum.add("output.slice." + std::to_string(slice_idx) + ".t", t);
        for (int sp = 1; sp <= 4; ++sp) {
            std::snprintf(name, sizeof name, "slice_%03d_n%d.csv", slice_idx, sp);
            write_species_slice_csv(base + name, sol, sp, t, rc.output_nx, rc.output_ny);
        }
        if (rc.output_moments) {
            std::snprintf(name, sizeof name, "slice_%03d_moments.csv", slice_idx);
            write_moments_csv(base + name, sol, t, rc.output_nx, rc.output_ny);
        }
        ++slice_idx;
    }

    sum.add("timing.total_s",
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
    sum.write(rc.output_dir + "/summary.txt");
    say(sum.to_string());
    say("wrote " + rc.output_dir + "/summary.txt");
    return kExitOk;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_verify(const std::string& config_path) {
    const RunConfig rc = load_run_config(config_path);
    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({name, pass, detail});
    };

    const auto violations = check_compatibility(rc.problem, rc.problem.compat_tol);
    add("compatibility", violations.empty(),
        violations.empty() ? "all corner conditions hold"
                           : std::to_string(violations.size()) + " edge sample(s) mismatch");

    const GateReport g = gate_report(rc.problem);
    add("gate", g.gate_ok, "pq = " + fmt(g.pq));
    if (!g.gate_ok) {
        for (const auto& c : checks)
            std::printf("%-18s %s  %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                        c.detail.c_str());
        return kExitCheckFailed;
    }

    SolverConfig scfg = rc.solver;
    const Solution sol = solve(rc.problem, scfg);
    add("convergence", sol.trace().status == SolveStatus::Converged,
        std::string(status_name(sol.trace().status)) + " after " +
            std::to_string(sol.trace().steps.size()) + " iteration(s), delta " +
            fmt(sol.trace().final_delta()));

    const double nsup = sup_norm(sol.field());
    const double minv = min_value(sol.field());
    bool pos_ok = minv >= -1e-8 * std::max(nsup, 1e-30);

    SolverConfig sig_cfg = scfg;
    sig_cfg.use_sigma = true;
    const Solution sol_sig = solve(rc.problem, sig_cfg);
    const double minv_sig = min_value(sol_sig.field());
    pos_ok = pos_ok && minv_sig >= -1e-8 * std::max(sup_norm(sol_sig.field()), 1e-30);
    add("positivity", pos_ok,
        "min node " + fmt(minv) + " (plain), " + fmt(minv_sig) + " (damped)");

    if (std::isfinite(g.bound_B))
        add("bound", nsup <= g.bound_B * 1.05,
            "sup " + fmt(nsup) + " vs bound " + fmt(g.bound_B));
    else
        add("bound", true, "free streaming, bound governed by data");

    const double kappa = contraction_factor(g, rc.problem.box, rc.problem.params);
    bool contraction_ok = true;
    std::string cdetail = "kappa = " + fmt(kappa);
    int checked = 0;
    const auto& steps = sol.trace().steps;
    for (std::size_t i = steps.size(); i-- > 1 && checked < 3;) {
        if (steps[i].delta < 1e3 * 1e-16 * std::max(nsup, 1.0)) continue;  // roundoff floor
        ++checked;
        if (steps[i].ratio > kappa * 1.1 + 1e-12) {
            contraction_ok = false;
            cdetail += ", ratio " + fmt(steps[i].ratio) + " at k=" + std::to_string(steps[i].k);
        }
    }
    add("contraction-ratio", contraction_ok, cdetail);

    const auto mb = mass_balance(sol);
    const double mass_tol = 1e-3 * std::max(mb.mass_scale, 1e-30);
    add("mass-balance", mb.mass_defect <= mass_tol && mb.momx_defect <= mass_tol &&
                            mb.momy_defect <= mass_tol,
        "defect " + fmt(mb.mass_defect) + " vs tol " + fmt(mass_tol));

    SolverConfig zcfg = scfg;
    zcfg.guess = InitialGuess::Zero;
    SolverConfig ccfg = scfg;
    ccfg.guess = InitialGuess::Constant;
    ccfg.guess_value = std::isfinite(g.bound_B) ? 0.5 * g.bound_B : compute_q(rc.problem);
    const Solution sz = solve(rc.problem, zcfg);
    const Solution sc = solve(rc.problem, ccfg);
    const double guess_gap = sup_distance(sz.field(), sc.field());
    add("guess-independence", guess_gap <= 10.0 * scfg.abs_tol,
        "gap " + fmt(guess_gap) + " vs " + fmt(10.0 * scfg.abs_tol));

    FDGrid fdg = rc.oracle;
    const UpwindSolution fd = upwind_solve(rc.problem, fdg);
    const double rel = oracle_rel_error(sol, fd, 17);
    add("oracle-comparison", rel <= rc.oracle_rel_tol,
        "rel sup error " + fmt(rel) + " vs " + fmt(rc.oracle_rel_tol));

    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        std::printf("%-18s %s  %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.detail.c_str());
    }
    return all ? kExitOk : kExitCheckFailed;
}

int cmd_compare_oracle(const std::string& config_path) {
    const RunConfig rc = load_run_config(config_path);
    const Solution sol = solve(rc.problem, rc.solver);
    const UpwindSolution fd = upwind_solve(rc.problem, rc.oracle);
    const double rel = oracle_rel_error(sol, fd, 17);
    std::printf("fixed_point.iterations = %zu\n", sol.trace().steps.size());
    std::printf("upwind.grid = %dx%dx%d\n", rc.oracle.nx, rc.oracle.ny, rc.oracle.nt);
    std::printf("rel_sup_error = %s\n", fmt(rel).c_str());
    std::printf("tolerance = %s\n", fmt(rc.oracle_rel_tol).c_str());
    return rel <= rc.oracle_rel_tol ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mild-solution solver for the plane four-velocity gas model on a rectangle"};
    app.require_subcommand(1);

    std::string config_path;
    bool override_gate = false;
    std::string slices;

    auto* check = app.add_subcommand("check-gate", "Evaluate the existence gate pq <= 1/4");
    check->add_option("--config", config_path, "Config file")->required();
    check->add_flag("--quiet", g_quiet, "Suppress progress output");

    auto* solve_cmd = app.add_subcommand("solve", "Run the fixed-point solver and write fields");
    solve_cmd->add_option("--config", config_path, "Config file")->required();
    solve_cmd->add_flag("--override-gate", override_gate, "Run even if the gate fails");
    solve_cmd->add_option("--slices", slices, "Comma-separated output times");
    solve_cmd->add_flag("--quiet", g_quiet, "Suppress progress output");

    auto* verify = app.add_subcommand("verify", "Run the property check bundle");
    verify->add_option("--config", config_path, "Config file")->required();
    verify->add_flag("--quiet", g_quiet, "Suppress progress output");

    auto* cmp = app.add_subcommand("compare-oracle", "Cross-validate against the upwind solver");
    cmp->add_option("--config", config_path, "Config file")->required();
    cmp->add_flag("--quiet", g_quiet, "Suppress progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check_gate(config_path);
        if (solve_cmd->parsed()) return cmd_solve(config_path, override_gate, slices);
        if (verify->parsed()) return cmd_verify(config_path);
        if (cmp->parsed()) return cmd_compare_oracle(config_path);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        const std::string msg = e.what();
        return msg.rfind("solve: existence gate violated", 0) == 0 ? kExitCheckFailed
                                                                   : kExitInternal;
    }
    return kExitUsage;
}

// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed in code; runtimes are printed per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "broadwell/model.hpp"
#include "broadwell/oracle.hpp"
#include "broadwell/solver.hpp"
#include "support/backtrace.hpp"
#include "support/instances.hpp"

using namespace broadwell;
using testsupport::constant_instance;
using testsupport::gate_boundary_instance;
using testsupport::random_instance;
using testsupport::rich_instance;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

#define REQUIRE_NEAR(out, value, target, tol, label)                                   \
    do {                                                                               \
        const double v_ = (value), t_ = (target);                                      \
        if (!(std::fabs(v_ - t_) <= (tol))) {                                          \
            (out).pass = false;                                                        \
            (out).detail << " [" << (label) << " " << v_ << " != " << t_ << "]";       \
        }                                                                              \
    } while (0)

#define REQUIRE_LE(out, value, limit, label)                                           \
    do {                                                                               \
        const double v_ = (value), l_ = (limit);                                       \
        if (!(v_ <= l_)) {                                                             \
            (out).pass = false;                                                        \
            (out).detail << " [" << (label) << " " << v_ << " > " << l_ << "]";        \
        }                                                                              \
    } while (0)

#define REQUIRE_TRUE(out, cond, label)                                                 \
    do {                                                                               \
        if (!(cond)) {                                                                 \
            (out).pass = false;                                                        \
            (out).detail << " [" << (label) << "]";                                    \
        }                                                                              \
    } while (0)

SolverConfig cfg_n(int n) {
    SolverConfig cfg;
    cfg.n1 = cfg.n2 = cfg.n3 = n;
    return cfg;
}

double field_sup_err_vs(const Solution& sol,
                        const std::function<double(int, double, double, double)>& ref,
                        int nsample, unsigned seed) {
    const SpaceTimeBox& b = sol.data().box;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ut(0.0, b.T), ux(b.a1, b.b1), uy(b.a2, b.b2);
    double err = 0.0;
    for (int i = 0; i < nsample; ++i) {
        const double t = ut(rng), x = ux(rng), y = uy(rng);
        const Densities d = sol.sample(t, x, y);
        const double v[4] = {d.n1, d.n2, d.n3, d.n4};
        for (int sp = 1; sp <= 4; ++sp)
            err = std::max(err, std::fabs(v[sp - 1] - ref(sp, t, x, y)));
    }
    return err;
}

// --------------------------------------------------------------------------

Outcome criterion1_gate_algebra() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const ProblemData d = gate_boundary_instance();
    const GateReport g = gate_report(d);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE_NEAR(out, g.p, 36.0, 1e-12, "p");
    REQUIRE_NEAR(out, g.q, 1.0 / 144.0, 1e-12, "q");
    REQUIRE_NEAR(out, g.pq, 0.25, 1e-12, "pq");
    REQUIRE_TRUE(out, g.gate_ok, "gate_ok");
    REQUIRE_NEAR(out, g.bound_B, 1.0 / 72.0, 1e-12, "bound_B");
    REQUIRE_LE(out, secs, 1.0, "runtime_s");
    out.detail << " p=" << g.p << " q=" << g.q << " pq=" << g.pq << " B=" << g.bound_B
               << " in " << secs << "s";
    return out;
}

Outcome criterion2_apriori_bound() {
    Outcome out;
    double worst32 = 0.0;
    for (unsigned seed : {11u, 12u, 13u, 14u, 15u, 16u}) {
        const ProblemData d = seed == 16u ? rich_instance(seed) : random_instance(seed);
        const Solution s = solve(d, cfg_n(32));
        REQUIRE_TRUE(out, s.trace().status == SolveStatus::Converged, "converged-32");
        const double ratio = sup_norm(s.field()) / s.gate().bound_B;
        worst32 = std::max(worst32, ratio);
        REQUIRE_LE(out, ratio, 1.05, "norm/bound at 32^3");
    }
    const ProblemData d = random_instance(11u);
    const Solution s64 = solve(d, cfg_n(64));
    const double r64 = sup_norm(s64.field()) / s64.gate().bound_B;
    REQUIRE_LE(out, r64, 1.01, "norm/bound at 64^3");
    out.detail << " worst ||N||/B: " << worst32 << " (32^3, 6 instances), " << r64 << " (64^3)";
    return out;
}

Outcome criterion3_positivity() {
    Outcome out;
    double worst = std::numeric_limits<double>::infinity();
    for (unsigned seed : {21u, 22u, 23u, 24u}) {
        const ProblemData d = seed == 24u ? rich_instance(seed) : random_instance(seed);
        for (bool damped : {false, true}) {
            SolverConfig cfg = cfg_n(32);
            cfg.use_sigma = damped;
            const Solution s = solve(d, cfg);
            REQUIRE_TRUE(out, s.trace().status == SolveStatus::Converged, "converged");
            const double floor = -1e-8 * std::max(sup_norm(s.field()), 1e-30);
            const double mv = min_value(s.field());
            worst = std::min(worst, mv);
            REQUIRE_TRUE(out, mv >= floor, damped ? "min-node damped" : "min-node plain");
        }
    }
    out.detail << " min node value over all runs: " << worst;
    return out;
}

Outcome criterion4_contraction() {
    Outcome out;

    // measured operator differences against p'(||A||+||B||)||A-B||
    const ProblemData d = random_instance(31);
    const GateReport g = gate_report(d);
    auto grid = std::make_shared<const EtaGrid>(d.box, d.params, 17, 17, 17);
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-g.bound_B, g.bound_B);
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        EtaField A = EtaField::zeros(grid), B = EtaField::zeros(grid);
        for (int sp = 1; sp <= 4; ++sp)
            for (int k = 0; k < 17; ++k)
                for (int j = 0; j < 17; ++j)
                    for (int i = 0; i < 17; ++i)
                        if (grid->unmasked(i, j, k)) {
                            A.set(sp, i, j, k, u(rng));
                            B.set(sp, i, j, k, u(rng));
                        }
        const double lhs = sup_distance(apply_T(A, d, {}), apply_T(B, d, {}));
        const double rhs = lipschitz_bound(A, B, d.box, d.params) * sup_distance(A, B);
        if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
        REQUIRE_LE(out, lhs, rhs * 1.02, "operator difference");
    }
    out.detail << " worst measured/bound: " << worst_ratio;

    // guaranteed ratio on the gate-boundary instance
    const ProblemData gb = gate_boundary_instance();
    const double kappa_gb = contraction_factor(gate_report(gb), gb.box, gb.params);
    REQUIRE_NEAR(out, kappa_gb, 1.0 / 9.0, 1e-12, "kappa(gate boundary)");
    SolverConfig gb_cfg = cfg_n(17);
    gb_cfg.guess = InitialGuess::Zero;
    const Solution sgb = solve(gb, gb_cfg);
    REQUIRE_TRUE(out, sgb.trace().status == SolveStatus::Converged, "gate-boundary converges");
    for (std::size_t i = 1; i < sgb.trace().steps.size(); ++i)
        REQUIRE_LE(out, sgb.trace().steps[i].ratio, kappa_gb * 1.1, "ratio(gate boundary)");

    // delta ratios on nontrivial instances settle below kappa * 1.1
    for (unsigned seed : {32u, 33u, 34u}) {
        const ProblemData di =
            seed == 34u ? rich_instance(seed) : random_instance(seed, 0.15, 0.24);
        SolverConfig cfg = cfg_n(21);
        cfg.guess = InitialGuess::Zero;
        cfg.abs_tol = 1e-11;
        const Solution s = solve(di, cfg);
        const double kappa = contraction_factor(s.gate(), di.box, di.params);
        const auto& steps = s.trace().steps;
        int checked = 0;
        for (std::size_t i = steps.size(); i-- > 1 && checked < 3;) {
            if (steps[i].delta < 1e-15) continue;
            REQUIRE_LE(out, steps[i].ratio, kappa * 1.1, "late delta ratio");
            ++checked;
        }
        REQUIRE_TRUE(out, checked >= 1, "has measurable ratios");
    }
    return out;
}

Outcome criterion5_uniqueness_probe() {
    Outcome out;
    const ProblemData d = random_instance(41);
    SolverConfig a = cfg_n(32);
    a.guess = InitialGuess::Zero;
    a.abs_tol = 1e-9;
    SolverConfig b = a;
    b.guess = InitialGuess::Constant;
    b.guess_value = 0.5 * gate_report(d).bound_B;
    const Solution sa = solve(d, a);
    const Solution sb = solve(d, b);
    const double gap = sup_distance(sa.field(), sb.field());
    REQUIRE_LE(out, gap, 10.0 * a.abs_tol, "guess gap");
    out.detail << " zero-vs-constant gap: " << gap << " (tol " << 10.0 * a.abs_tol << ")";
    return out;
}

Outcome criterion6_derivative_bounds() {
    Outcome out;
    const ProblemData d = random_instance(51);
    const Solution s = solve(d, cfg_n(32));
    REQUIRE_TRUE(out, s.trace().status == SolveStatus::Converged, "converged");
    const auto rep = derivative_bound_check(s, s.gate(), {});
    double worst[3] = {0, 0, 0};
    for (int sp = 0; sp < 4; ++sp)
        for (int dir = 0; dir < 3; ++dir) {
            worst[dir] = std::max(worst[dir], rep.measured[sp][dir]);
            REQUIRE_LE(out, rep.measured[sp][dir], rep.bounds[dir] * 1.1, "derivative sup");
        }
    out.detail << " sup dt/dx/dy: " << worst[0] << "/" << worst[1] << "/" << worst[2]
               << " vs bounds " << rep.bounds[0] << "/" << rep.bounds[1] << "/" << rep.bounds[2];
    return out;
}

Outcome criterion7_free_streaming() {
    Outcome out;
    // gentle smooth compatible data; S = 0 removes the collision term
    ProblemData d = constant_instance(1.0, 0.0, {0, 1, 0, 1, 1}, 0.0);
    const Rect sp_rect{0, 1, 0, 1};
    d.init[0] = DataField::sinusoid(sp_rect, 0.05, 0.5, 1, 1);
    d.init[1] = DataField::bump(sp_rect, 0.04, 0.02, 0.5, 0.5, 0.3, 0.3);
    d.init[2] = DataField::sinusoid(sp_rect, 0.06, 0.4, 1, 1);
    d.init[3] = DataField::constant(sp_rect, 0.03);
    d.inflow[0] = DataField::sinusoid({0, 1, 0, 1}, 0.05, 0.5, 1, 1);
    d.inflow[1] = DataField::constant({0, 1, 0, 1}, 0.04);
    d.inflow[2] = DataField::sinusoid({0, 1, 0, 1}, 0.06, 0.3, 1, 2);
    d.inflow[3] = DataField::constant({0, 1, 0, 1}, 0.03);

    const Solution s = solve(d, cfg_n(33));
    REQUIRE_TRUE(out, s.trace().status == SolveStatus::Converged, "converged");
    const EtaGrid& g = s.field().grid();
    const double h = std::max({g.h1, g.h2, g.h3});
    const double err = field_sup_err_vs(
        s, [&](int sp, double t, double x, double y) { return free_streaming_exact(d, t, x, y, sp); },
        5000, 99);
    REQUIRE_LE(out, err, 5.0 * h * h, "transport sup error");
    out.detail << " sup err " << err << " vs 5h^2 = " << 5.0 * h * h;
    return out;
}

Outcome criterion8_maxwellian() {
    Outcome out;
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> rho_d(0.0, 10.0), uv_d(-0.9, 0.9),
        th_d(0.0, 1.57 * 0.99);
    int checked = 0;
    double worst = 0.0;
    while (checked < 10000) {
        const ModelParams mp{1.0 + uv_d(rng), 1.0, th_d(rng)};
        const Moments m{rho_d(rng), uv_d(rng), uv_d(rng)};
        const Densities n = maxwellian(m, mp);
        if (!(n.n1 > 0 && n.n2 > 0 && n.n3 > 0 && n.n4 > 0)) continue;
        ++checked;
        const double q = std::fabs(collision_term(n, mp));
        worst = std::max(worst, m.rho > 0 ? q / (m.rho * m.rho) : q);
        REQUIRE_LE(out, q, 1e-12 * m.rho * m.rho + 1e-300, "equilibrium collision term");
    }
    out.detail << " worst |Q(M)|/rho^2: " << worst;

    // a spatially uniform equilibrium state stays put in time
    const ModelParams mp{1.0, 1.0, 0.0};
    const Densities eq = maxwellian({0.006, 0.08, -0.05}, mp);
    ProblemData d = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, 0.0);
    const Rect sp_rect{0, 1, 0, 1}, tf{0, 1, 0, 1};
    const double vals[4] = {eq.n1, eq.n2, eq.n3, eq.n4};
    for (int sp = 0; sp < 4; ++sp) {
        d.init[sp] = DataField::constant(sp_rect, vals[sp]);
        d.inflow[sp] = DataField::constant(tf, vals[sp]);
    }
    REQUIRE_TRUE(out, gate_report(d).gate_ok, "equilibrium instance inside gate");
    const Solution s = solve(d, cfg_n(17));
    double drift = 0.0;
    const EtaGrid& g = s.field().grid();
    for (int k = 0; k < g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                if (g.unmasked(i, j, k))
                    for (int sp = 1; sp <= 4; ++sp)
                        drift = std::max(drift,
                                         std::fabs(s.field().at(sp, i, j, k) - vals[sp - 1]));
    REQUIRE_LE(out, drift, 1e-8, "equilibrium drift");
    out.detail << "; uniform-equilibrium drift " << drift;
    return out;
}

Outcome criterion9_oracle() {
    Outcome out;
    const ProblemData d = random_instance(71, 0.15, 0.22, /*unit_speed=*/true);
    double errs[3] = {0, 0, 0};
    int level = 0;
    double scale = 0.0;
    for (int n : {16, 32, 64}) {
        const Solution s = solve(d, cfg_n(n));
        const UpwindSolution fd = upwind_solve(d, {n, n, n});
        double err = 0.0;
        for (int m = 0; m < 13; ++m)
            for (int i = 0; i < 13; ++i)
                for (int j = 0; j < 13; ++j) {
                    const double t = d.box.T * m / 12.0;
                    const double x = i / 12.0, y = j / 12.0;
                    const Densities v = s.sample(t, x, y);
                    const double vv[4] = {v.n1, v.n2, v.n3, v.n4};
                    for (int sp = 1; sp <= 4; ++sp) {
                        scale = std::max(scale, std::fabs(vv[sp - 1]));
                        err = std::max(err, std::fabs(vv[sp - 1] - fd.value(sp, t, x, y)));
                    }
                }
        errs[level++] = err;
    }
    const double rel[3] = {errs[0] / scale, errs[1] / scale, errs[2] / scale};
    REQUIRE_TRUE(out, rel[0] > rel[1] && rel[1] > rel[2], "monotone refinement");
    REQUIRE_LE(out, rel[2], 0.05, "relative sup error at 64^3");
    out.detail << " rel err 16/32/64: " << rel[0] << " / " << rel[1] << " / " << rel[2];
    return out;
}

Outcome criterion10_conservation() {
    Outcome out;
    // gentle low-mode instance so the balance integrals are well resolved
    ProblemData d = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, 0.0);
    const Rect sp_rect{0, 1, 0, 1}, tf{0, 1, 0, 1};
    const double base[4] = {0.0015, 0.0012, 0.0013, 0.0011};
    for (int sp = 0; sp < 4; ++sp) {
        d.init[sp] = DataField::sinusoid(sp_rect, base[sp], 0.3, 1, 1);
        d.inflow[sp] = DataField::constant(tf, base[sp]);
    }
    REQUIRE_TRUE(out, gate_report(d).gate_ok, "inside gate");

    const Solution s32 = solve(d, cfg_n(32));
    const auto mb32 = mass_balance(s32, 17, 33);
    const double tol32 = 1e-3 * mb32.mass_scale;
    REQUIRE_LE(out, mb32.mass_defect, tol32, "mass defect at 32^3");
    REQUIRE_LE(out, mb32.momx_defect, tol32, "x-momentum collision source");
    REQUIRE_LE(out, mb32.momy_defect, tol32, "y-momentum collision source");

    const Solution s64 = solve(d, cfg_n(64));
    const auto mb64 = mass_balance(s64, 33, 65);
    REQUIRE_LE(out, mb64.mass_defect, 0.5 * mb32.mass_defect, "defect halves");
    out.detail << " defect " << mb32.mass_defect << " -> " << mb64.mass_defect << " (scale "
               << mb32.mass_scale << ")";
    return out;
}

Outcome criterion11_coordinate_equivalence() {
    Outcome out;
    const ProblemData d = random_instance(81, 0.1, 0.2, /*unit_speed=*/true);
    auto grid = std::make_shared<const EtaGrid>(d.box, d.params, 32, 32, 32);
    const EtaField m = EtaField::from_function(
        grid,
        [](int sp, const CharCoords& e) {
            switch (sp) {
                case 1: return 0.004 + 0.003 * std::sin(2.0 * e.eta1 + e.eta2);
                case 2: return 0.005 + 0.002 * std::cos(e.eta1 - 2.0 * e.eta3);
                case 3: return 0.003 + 0.002 * std::sin(e.eta2 + e.eta3);
                default: return 0.006 + 0.003 * std::cos(2.0 * e.eta2 - e.eta1);
            }
        },
        /*fill_masked=*/true);
    QuadratureConfig quad;
    quad.rule = QuadratureRule::Simpson;
    quad.max_step = 0.25 * grid->min_spacing();
    const EtaField o = apply_T(m, d, quad);

    std::mt19937 rng(5);
    std::uniform_int_distribution<int> pick(0, 31);
    int tested = 0;
    double worst = 0.0;
    while (tested < 1000) {
        const int i = pick(rng), j = pick(rng), k = pick(rng);
        if (!grid->unmasked(i, j, k)) continue;
        ++tested;
        const PhysCoords p = from_eta(grid->node(i, j, k), d.params);
        for (int sp = 1; sp <= 4; ++sp) {
            const double direct = testsupport::backtrace_value(m, d, sp, p.t, p.x, p.y, 512);
            const double diff = std::fabs(direct - o.at(sp, i, j, k));
            worst = std::max(worst, diff);
            REQUIRE_LE(out, diff, 1e-6, "eta-grid vs physical backtrace");
        }
    }
    out.detail << " 1000 nodes, worst |diff| = " << worst;
    return out;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"gate-algebra", criterion1_gate_algebra},
        {"a-priori-bound", criterion2_apriori_bound},
        {"positivity", criterion3_positivity},
        {"contraction", criterion4_contraction},
        {"uniqueness-probe", criterion5_uniqueness_probe},
        {"derivative-bounds", criterion6_derivative_bounds},
        {"free-streaming-exactness", criterion7_free_streaming},
        {"maxwellian-identity", criterion8_maxwellian},
        {"oracle-cross-validation", criterion9_oracle},
        {"conservation", criterion10_conservation},
        {"coordinate-equivalence", criterion11_coordinate_equivalence},
    };

    int failures = 0;
    int idx = 0;
    for (const Entry& e : entries) {
        ++idx;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail << " [exception: " << ex.what() << "]";
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %02d [%s] %-26s%s (%.1fs)\n", idx, out.pass ? "PASS" : "FAIL",
                    e.name, out.detail.str().c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    std::printf("%d/11 criteria passed\n", 11 - failures);
    return failures;
}

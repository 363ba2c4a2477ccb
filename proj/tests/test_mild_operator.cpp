#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <memory>
#include <random>

#include "broadwell/mild_operator.hpp"
#include "broadwell/oracle.hpp"
#include "support/instances.hpp"

using namespace broadwell;
using testsupport::constant_instance;
using testsupport::random_instance;

namespace {

EtaGridPtr make_grid(const ProblemData& d, int n) {
    return std::make_shared<const EtaGrid>(d.box, d.params, n, n, n);
}

// random values on the unmasked nodes, sup norm <= r
EtaField random_field(EtaGridPtr grid, std::mt19937& rng, double r) {
    std::uniform_real_distribution<double> u(-r, r);
    EtaField f = EtaField::zeros(grid);
    const EtaGrid& g = f.grid();
    for (int sp = 1; sp <= 4; ++sp)
        for (int k = 0; k < g.n3; ++k)
            for (int j = 0; j < g.n2; ++j)
                for (int i = 0; i < g.n1; ++i)
                    if (g.unmasked(i, j, k)) f.set(sp, i, j, k, u(rng));
    return f;
}

void for_each_unmasked(const EtaGrid& g, const std::function<void(int, int, int)>& fn) {
    for (int k = 0; k < g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i)
                if (g.unmasked(i, j, k)) fn(i, j, k);
}

}  // namespace

TEST_CASE("eta grid masks exactly the image of the box") {
    const ProblemData d = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, 0.1);
    const EtaGrid g(d.box, d.params, 17, 17, 17);
    CHECK(g.unmasked_count() > 0);
    std::size_t count = 0;
    for (int k = 0; k < g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const PhysCoords p = from_eta(g.node(i, j, k), d.params);
                const bool inside = in_box(d.box, p, g.tol);
                CHECK(g.unmasked(i, j, k) == inside);
                count += inside;
            }
    CHECK(count == g.unmasked_count());
    // the image volume is vol(P)/(2c^2) = 1/2: unmasked fraction approximates
    // 0.5 / bbox_volume
    const double bbox_vol = (g.h1 * (g.n1 - 1)) * (g.h2 * (g.n2 - 1)) * (g.h3 * (g.n3 - 1));
    const double frac = static_cast<double>(g.unmasked_count()) / g.size();
    CHECK(frac == doctest::Approx(0.5 / bbox_vol).epsilon(0.15));
}

TEST_CASE("field interpolation reproduces node values and multilinear functions") {
    const ProblemData d = constant_instance(1.3, 0.6, {0, 1, 0, 1, 1}, 0.1);
    auto grid = make_grid(d, 13);
    auto fn = [](int sp, const CharCoords& e) {
        return 0.2 + 0.1 * sp + 0.3 * e.eta1 - 0.2 * e.eta2 + 0.05 * e.eta3;
    };
    const EtaField f = EtaField::from_function(grid, fn, /*fill_masked=*/true);
    const EtaGrid& g = f.grid();
    for_each_unmasked(g, [&](int i, int j, int k) {
        const CharCoords e = g.node(i, j, k);
        for (int sp = 1; sp <= 4; ++sp)
            CHECK(f.interp(sp, e) == doctest::Approx(f.at(sp, i, j, k)).epsilon(1e-14));
    });
    // affine functions are reproduced exactly anywhere in P'
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const PhysCoords p{u(rng), u(rng), u(rng)};
        const CharCoords e = to_eta(p, d.params);
        for (int sp = 1; sp <= 4; ++sp)
            CHECK(f.interp(sp, e) == doctest::Approx(fn(sp, e)).epsilon(1e-12));
    }
}

TEST_CASE("operator on zero data and zero field is zero") {
    const ProblemData d = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, 0.0);
    auto grid = make_grid(d, 13);
    const EtaField out = apply_T(EtaField::zeros(grid), d, {});
    CHECK(sup_norm(out) == 0.0);
}

TEST_CASE("operator on zero field transports the data exactly") {
    // Q(0) = 0 kills every path integral, so each node carries the data value
    // at its characteristic foot; the closed-form transport solution is an
    // independent route to the same number.
    const ProblemData d = random_instance(17);
    auto grid = make_grid(d, 13);
    const EtaField out = apply_T(EtaField::zeros(grid), d, {});
    const EtaGrid& g = out.grid();
    for_each_unmasked(g, [&](int i, int j, int k) {
        const PhysCoords p = from_eta(g.node(i, j, k), d.params);
        for (int sp = 1; sp <= 4; ++sp) {
            const double want = free_streaming_exact(d, p.t, p.x, p.y, sp);
            CHECK(out.at(sp, i, j, k) == doctest::Approx(want).epsilon(1e-11));
        }
    });
}

TEST_CASE("constants are fixed points") {
    const double kappa = 0.37;
    const ProblemData d = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, kappa);
    auto grid = make_grid(d, 13);
    const EtaField m = EtaField::constant(grid, {kappa, kappa, kappa, kappa});
    const EtaField out = apply_T(m, d, {});
    CHECK(sup_distance(out, m) <= 1e-13);
    const EtaField out_s = apply_T_sigma(m, 2.0, d, {});
    CHECK(sup_distance(out_s, m) <= 1e-12);
    const EtaField out_s2 = apply_T_sigma(m, 3.5, d, {QuadratureRule::Simpson, 0.0, 0});
    CHECK(sup_distance(out_s2, m) <= 1e-12);
}

TEST_CASE("sup_distance basics") {
    const ProblemData d = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, 0.0);
    auto grid = make_grid(d, 9);
    EtaField a = EtaField::zeros(grid);
    EtaField b = EtaField::zeros(grid);
    CHECK(sup_distance(a, b) == 0.0);
    const EtaGrid& g = a.grid();
    const auto seg = g.seg1(g.n2 / 2, g.n3 / 2);
    REQUIRE(!seg.empty());
    b.set(3, seg.lo, g.n2 / 2, g.n3 / 2, 0.125);
    CHECK(sup_distance(a, b) == 0.125);
    CHECK(sup_norm(b) == sup_distance(b, a));
}

TEST_CASE("measured operator differences respect the Lipschitz bound") {
    const ProblemData d = random_instance(55);
    auto grid = make_grid(d, 9);
    const GateReport gate = gate_report(d);
    REQUIRE(gate.gate_ok);
    std::mt19937 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const EtaField A = random_field(grid, rng, gate.bound_B);
        const EtaField B = random_field(grid, rng, gate.bound_B);
        const double lhs = sup_distance(apply_T(A, d, {}), apply_T(B, d, {}));
        const double rhs = lipschitz_bound(A, B, d.box, d.params) * sup_distance(A, B);
        CHECK(lhs <= rhs * 1.02 + 1e-15);
    }
}

TEST_CASE("lipschitz bound hand value") {
    const ProblemData d = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, 0.0);
    CHECK(lipschitz_coefficient(d.box, d.params) == doctest::Approx(4.0));
    auto grid = make_grid(d, 9);
    const double r = 0.25;
    const EtaField A = EtaField::constant(grid, {r, r, r, r});
    CHECK(lipschitz_bound(A, A, d.box, d.params) == doctest::Approx(8.0 * r));
    const EtaField Z = EtaField::zeros(grid);
    CHECK(lipschitz_bound(Z, Z, d.box, d.params) == 0.0);
}

TEST_CASE("output sup norm obeys the quadratic bound") {
    const ProblemData d = random_instance(230);
    auto grid = make_grid(d, 13);
    // affine field: its sup and derivative sups over P' are easy to bound
    const double a0 = 0.01, a1 = 0.004, a2 = -0.003, a3 = 0.002;
    const EtaField m = EtaField::from_function(
        grid,
        [&](int, const CharCoords& e) {
            return a0 + a1 * e.eta1 + a2 * e.eta2 + a3 * e.eta3;
        },
        true);
    const EtaGrid& g = m.grid();
    const double m1 = std::max(std::fabs(g.o1), std::fabs(g.g1(g.n1 - 1)));
    const double m2 = std::max(std::fabs(g.o2), std::fabs(g.g2(g.n2 - 1)));
    const double m3 = std::max(std::fabs(g.o3), std::fabs(g.g3(g.n3 - 1)));
    const double nrm = std::max({std::fabs(a0) + std::fabs(a1) * m1 + std::fabs(a2) * m2 +
                                     std::fabs(a3) * m3,
                                 std::fabs(a1), std::fabs(a2), std::fabs(a3)});
    const GateReport gate = gate_report(d);
    const EtaField out = apply_T(m, d, {});
    CHECK(sup_norm(out) <= gate.p * nrm * nrm + gate.q + 1e-12);
}

TEST_CASE("damped operator") {
    const ProblemData zero = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, 0.0);
    auto grid = make_grid(zero, 13);

    SUBCASE("zero everywhere") {
        const EtaField out = apply_T_sigma(EtaField::zeros(grid), 2.0, zero, {});
        CHECK(sup_norm(out) == 0.0);
    }

    SUBCASE("rejects sigma below 2cS") {
        CHECK_THROWS_AS(apply_T_sigma(EtaField::zeros(grid), 1.9, zero, {}),
                        std::invalid_argument);
    }

    SUBCASE("matches plain free streaming when the field is zero") {
        const ProblemData d = random_instance(402);
        auto gr = make_grid(d, 13);
        const EtaField z = EtaField::zeros(gr);
        const EtaField a = apply_T(z, d, {});
        const EtaField b = apply_T_sigma(z, 2.0 * d.params.c * d.params.S, d, {});
        CHECK(sup_distance(a, b) <= 1e-14);
    }

    SUBCASE("nonnegative output for nonnegative data, any field sign") {
        const ProblemData d = random_instance(403);
        auto gr = make_grid(d, 13);
        std::mt19937 rng(4);
        const GateReport gate = gate_report(d);
        for (int trial = 0; trial < 5; ++trial) {
            const EtaField m = random_field(gr, rng, 3.0 * gate.bound_B);
            const EtaField out = apply_T_sigma(m, 2.0 * d.params.c * d.params.S, d, {});
            CHECK(min_value(out) >= -1e-15);
        }
    }

    SUBCASE("fixed points of the damped iteration are fixed points of T") {
        const ProblemData d = random_instance(404);
        auto gr = make_grid(d, 13);
        const double sigma = 2.0 * d.params.c * d.params.S;
        EtaField cur = EtaField::zeros(gr);
        double delta = 1.0;
        for (int k = 0; k < 60 && delta > 1e-13; ++k) {
            EtaField next = apply_T_sigma(cur, sigma, d, {});
            delta = sup_distance(next, cur);
            cur = std::move(next);
        }
        REQUIRE(delta <= 1e-13);
        const EtaField back = apply_T(cur, d, {});
        // the two discretizations share fixed points up to quadrature error
        CHECK(sup_distance(back, cur) <= 1e-9);
    }
}

TEST_CASE("both branch formulas agree on the classification plane") {
    const ProblemData d = random_instance(520, 0.1, 0.2, /*unit_speed=*/true);
    auto grid = make_grid(d, 13);
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const EtaField m = EtaField::from_function(
        grid,
        [](int sp, const CharCoords& e) {
            return 0.01 * sp + 0.005 * std::sin(3.0 * e.eta1 + 2.0 * e.eta2 - e.eta3);
        },
        true);
    const QuadratureConfig quad{QuadratureRule::Trapezoid, 0.0, 0};
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 60; ++trial) {
        // construct a point on each species' dividing plane
        const double c = d.params.c;
        const SpaceTimeBox& b = d.box;
        double t = u(rng), x = 0, y = u(rng);
        CharCoords e;
        for (int sp = 1; sp <= 4; ++sp) {
            switch (sp) {
                case 1: x = b.a1 + c * t; y = u(rng); break;
                case 2: y = b.a2 + c * t; x = u(rng); break;
                case 3: y = b.b2 - c * t; x = u(rng); break;
                default: x = b.b1 - c * t; y = u(rng); break;
            }
            if (x < b.a1 || x > b.b1 || y < b.a2 || y > b.b2) continue;
            e = to_eta(t, x, y, d.params);
            const double vi = mild_value_branch(m, sp, e, FootKind::Initial, d, quad);
            const double vb = mild_value_branch(m, sp, e, FootKind::Inflow, d, quad);
            CHECK(vi == doctest::Approx(vb).epsilon(1e-9));
            ++tested;
        }
    }
    CHECK(tested >= 60);
}

TEST_CASE("line sweep and generic path evaluation agree at nodes") {
    const ProblemData d = random_instance(530);
    auto grid = make_grid(d, 13);
    std::mt19937 rng(9);
    const EtaField m = EtaField::from_function(
        grid,
        [](int sp, const CharCoords& e) {
            return 0.02 * sp + 0.01 * std::sin(2.0 * e.eta1) * std::cos(e.eta2 + e.eta3);
        },
        true);
    const QuadratureConfig quad;
    const EtaField out = apply_T(m, d, quad);
    const EtaGrid& g = out.grid();
    std::uniform_int_distribution<int> pick(0, g.n1 - 1);
    int tested = 0;
    while (tested < 200) {
        const int i = pick(rng), j = pick(rng), k = pick(rng);
        if (!g.unmasked(i, j, k)) continue;
        ++tested;
        const CharCoords e = g.node(i, j, k);
        for (int sp = 1; sp <= 4; ++sp)
            CHECK(mild_value(m, sp, e, d, quad) ==
                  doctest::Approx(out.at(sp, i, j, k)).epsilon(1e-11));
    }
}

TEST_CASE("trapezoid path quadrature is second order") {
    const ProblemData d = random_instance(540);
    auto grid = make_grid(d, 17);
    const EtaField m = EtaField::from_function(
        grid,
        [](int sp, const CharCoords& e) {
            // distinct shape per species so the collision source is a genuine
            // quadratic along every characteristic
            switch (sp) {
                case 1: return 0.01 + 0.008 * std::sin(2.5 * e.eta1 - e.eta2);
                case 2: return 0.02 + 0.006 * std::cos(1.5 * e.eta3 + e.eta1);
                case 3: return 0.03 + 0.007 * std::sin(e.eta2 + 2.0 * e.eta3);
                default: return 0.04 + 0.005 * std::cos(2.0 * e.eta1 - e.eta3);
            }
        },
        true);
    const double h0 = grid->min_spacing();
    std::vector<EtaField> outs;
    for (int level = 0; level < 5; ++level)
        outs.push_back(apply_T(m, d, {QuadratureRule::Trapezoid, h0 / (1 << level), 0}));
    // errors against the finest level as the reference
    double err[4];
    for (int level = 0; level < 4; ++level) err[level] = sup_distance(outs[level], outs[4]);
    for (int level = 0; level < 3; ++level) {
        CHECK(err[level] > 0.0);
        CHECK(err[level] / err[level + 1] >= 3.5);
    }
    // Simpson at the coarsest step should beat trapezoid comfortably
    const EtaField simp = apply_T(m, d, {QuadratureRule::Simpson, h0, 0});
    CHECK(sup_distance(simp, outs[4]) <= 0.25 * err[0] + 1e-15);
}

TEST_CASE("operator input validation") {
    const ProblemData d = constant_instance(1.0, 1.0, {0, 1, 0, 1, 1}, 0.0);
    auto grid = make_grid(d, 9);
    const EtaField m = EtaField::zeros(grid);
    QuadratureConfig bad;
    bad.max_step = -1.0;
    CHECK_THROWS_AS(apply_T(m, d, bad), std::invalid_argument);

    // mismatched grid geometry
    ProblemData other = d;
    other.box.b1 = 2.0;
    const Rect sp_rect{0, 2, 0, 1};
    other.init[0] = DataField::constant(sp_rect, 0.0);
    other.init[1] = DataField::constant(sp_rect, 0.0);
    other.init[2] = DataField::constant(sp_rect, 0.0);
    other.init[3] = DataField::constant(sp_rect, 0.0);
    CHECK_THROWS_AS(apply_T(m, other, {}), std::invalid_argument);

    auto grid2 = make_grid(d, 11);
    const EtaField m2 = EtaField::zeros(grid2);
    CHECK_THROWS_AS(sup_distance(m, m2), std::invalid_argument);
}

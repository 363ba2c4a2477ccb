#include "broadwell/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace broadwell {

namespace {

double sup_over_samples(const DataField& f) {
    double m = 0.0;
    for (int ia = 0; ia < f.samples_a(); ++ia)
        for (int ib = 0; ib < f.samples_b(); ++ib)
            m = std::max(m, std::fabs(f.sample(ia, ib)));
    return m;
}

// Edge traces entering the compatibility conditions. For species i the
// initial field restricted to the inflow face must match the inflow field
// at t = 0.
struct EdgeSpec {
    // evaluate initial field at edge coordinate s
    double (*init_at)(const ProblemData&, double);
    double lo, hi;  // range of the edge coordinate
};

double init1_edge(const ProblemData& d, double y) { return d.init[0].value(d.box.a1, y); }
double init2_edge(const ProblemData& d, double x) { return d.init[1].value(x, d.box.a2); }
double init3_edge(const ProblemData& d, double x) { return d.init[2].value(x, d.box.b2); }
double init4_edge(const ProblemData& d, double y) { return d.init[3].value(d.box.b1, y); }

}  // namespace

void SpaceTimeBox::validate() const {
    if (!(a1 < b1) || !(a2 < b2))
        throw std::invalid_argument("SpaceTimeBox: need a1 < b1 and a2 < b2");
    if (!(T > 0.0)) throw std::invalid_argument("SpaceTimeBox: need T > 0");
}

std::vector<CompatViolation> check_compatibility(const ProblemData& data, double tol) {
    const EdgeSpec specs[4] = {
        {init1_edge, data.box.a2, data.box.b2},
        {init2_edge, data.box.a1, data.box.b1},
        {init3_edge, data.box.a1, data.box.b1},
        {init4_edge, data.box.a2, data.box.b2},
    };
    std::vector<CompatViolation> out;
    for (int s = 0; s < 4; ++s) {
        const EdgeSpec& es = specs[s];
        const DataField& bdry = data.inflow[s];
        // Edge samples of both fields: the initial field's relevant axis and
        // the inflow field's spatial axis.
        std::vector<double> locs;
        const DataField& ini = data.init[s];
        const bool edge_is_y = (s == 0 || s == 3);
        const int n_init = edge_is_y ? ini.samples_b() : ini.samples_a();
        for (int k = 0; k < n_init; ++k)
            locs.push_back(es.lo + (es.hi - es.lo) * k / (n_init - 1));
        for (int k = 0; k < bdry.samples_b(); ++k) locs.push_back(bdry.node_b(k));
        std::sort(locs.begin(), locs.end());
        locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
        for (double loc : locs) {
            const double vi = es.init_at(data, loc);
            const double vb = bdry.value(0.0, loc);
            const double d = std::fabs(vi - vb);
            if (d > tol) out.push_back({s + 1, loc, d});
        }
    }
    return out;
}

double c1_norm(const DataField& f) {
    double m = sup_over_samples(f);
    for (int ia = 0; ia < f.samples_a(); ++ia)
        for (int ib = 0; ib < f.samples_b(); ++ib) {
            m = std::max(m, std::fabs(f.node_deriv_a(ia, ib)));
            m = std::max(m, std::fabs(f.node_deriv_b(ia, ib)));
        }
    return m;
}

double compute_p(const SpaceTimeBox& box, const ModelParams& params) {
    box.validate();
    const double c = params.c;
    const double m = std::max({4.0 * box.T, 2.0 / c * (box.b1 - box.a1),
                               1.0 / c * (box.b2 - box.a2)});
    return 4.0 * c * params.S * (1.0 + 2.0 * m);
}

double compute_q(const ProblemData& data) {
    const double c = data.params.c;
    const double coef_init = std::max(1.0, 2.0 * c);
    const double coef_in1 = 1.0 + c;
    const double coef_in23 = std::max(2.0, 1.0 + c);
    const double coef_in4 = 2.0 + c;
    double q = 0.0;
    for (int s = 0; s < 4; ++s) q = std::max(q, coef_init * c1_norm(data.init[s]));
    q = std::max(q, coef_in1 * c1_norm(data.inflow[0]));
    q = std::max(q, coef_in23 * c1_norm(data.inflow[1]));
    q = std::max(q, coef_in23 * c1_norm(data.inflow[2]));
    q = std::max(q, coef_in4 * c1_norm(data.inflow[3]));
    return q;
}

GateReport gate_report(const ProblemData& data) {
    GateReport r;
    r.p = compute_p(data.box, data.params);
    r.q = compute_q(data);
    r.pq = r.p * r.q;

    const double inf = std::numeric_limits<double>::infinity();
    if (r.p == 0.0) {
        // Free streaming: the operator is affine in the data and every radius
        // above q is admissible.
        r.gate_ok = true;
        r.r_lo = r.q;
        r.r_hi = inf;
        r.bound_B = inf;
        r.bound_full = inf;
        r.lambda_star = inf;
        return r;
    }

    r.lambda_star = r.q > 0.0 ? 1.0 / (4.0 * r.pq) : inf;
    // Tolerate roundoff at the gate boundary (pq built from parsed decimals).
    r.gate_ok = r.pq <= 0.25 * (1.0 + 1e-12);
    if (r.gate_ok) {
        const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * r.pq));
        r.r_hi = (1.0 + disc) / (2.0 * r.p);
        // Rationalized form of (1 - disc)/(2p); avoids cancellation for small pq.
        r.r_lo = 2.0 * r.q / (1.0 + disc);
        r.bound_B = r.r_hi;
        r.bound_full = std::max(1.0, 2.0 / data.params.c) * r.bound_B;
    }
    return r;
}

std::vector<std::string> validate_problem(const ProblemData& data) {
    std::vector<std::string> issues;
    try {
        data.box.validate();
        data.params.validate();
    } catch (const std::exception& e) {
        issues.emplace_back(e.what());
        return issues;
    }
    if (data.params.theta != 0.0)
        issues.emplace_back("problem requires theta = 0");

    auto expect_rect = [&](const DataField& f, const Rect& want, const std::string& name) {
        const Rect& r = f.rect();
        const double tol = 1e-9 * std::max({1.0, std::fabs(want.ahi), std::fabs(want.bhi)});
        if (std::fabs(r.alo - want.alo) > tol || std::fabs(r.ahi - want.ahi) > tol ||
            std::fabs(r.blo - want.blo) > tol || std::fabs(r.bhi - want.bhi) > tol) {
            std::ostringstream os;
            os << name << ": domain [" << r.alo << "," << r.ahi << "]x[" << r.blo << ","
               << r.bhi << "] does not match expected [" << want.alo << "," << want.ahi
               << "]x[" << want.blo << "," << want.bhi << "]";
            issues.push_back(os.str());
        }
        if (!f.nonnegative())
            issues.push_back(name + ": has negative samples (min " +
                             std::to_string(f.min_sample()) + ")");
    };

    const Rect spatial{data.box.a1, data.box.b1, data.box.a2, data.box.b2};
    const Rect ty{0.0, data.box.T, data.box.a2, data.box.b2};
    const Rect tx{0.0, data.box.T, data.box.a1, data.box.b1};
    for (int s = 0; s < 4; ++s)
        expect_rect(data.init[s], spatial, "init" + std::to_string(s + 1));
    expect_rect(data.inflow[0], ty, "inflow1");
    expect_rect(data.inflow[1], tx, "inflow2");
    expect_rect(data.inflow[2], tx, "inflow3");
    expect_rect(data.inflow[3], ty, "inflow4");

    const auto violations = check_compatibility(data, data.compat_tol);
    if (!violations.empty()) {
        double worst = 0.0;
        for (const auto& v : violations) worst = std::max(worst, v.mismatch);
        std::ostringstream os;
        os << "corner compatibility violated at " << violations.size()
           << " edge sample(s), worst mismatch " << worst;
        issues.push_back(os.str());
    }
    return issues;
}

}  // namespace broadwell

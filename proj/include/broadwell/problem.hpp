#pragma once

#include <array>
#include <string>
#include <vector>

#include "broadwell/data_field.hpp"
#include "broadwell/model.hpp"

namespace broadwell {

struct SpaceTimeBox {
    double a1 = 0, b1 = 1;  // x extent
    double a2 = 0, b2 = 1;  // y extent
    double T = 1;           // time horizon

    void validate() const;  // throws std::invalid_argument
};

// Full problem statement: domain, model constants (theta fixed to 0), four
// initial fields on [a1,b1]x[a2,b2], and the four inflow fields
//   inflow[0] = species 1 at x=a1 on (t,y)
//   inflow[1] = species 2 at y=a2 on (t,x)
//   inflow[2] = species 3 at y=b2 on (t,x)
//   inflow[3] = species 4 at x=b1 on (t,y)
struct ProblemData {
    SpaceTimeBox box;
    ModelParams params;
    std::array<DataField, 4> init;
    std::array<DataField, 4> inflow;
    double compat_tol = 1e-9;
};

struct CompatViolation {
    int species = 0;
    double location = 0;  // coordinate along the shared edge
    double mismatch = 0;
};

/// Corner compatibility between each initial field and its inflow field
/// along the shared edge (initial trace at the inflow face vs inflow trace
/// at t=0), checked at every edge sample of both fields.
std::vector<CompatViolation> check_compatibility(const ProblemData& data, double tol);

/// max of the sup norms of the field and its two partial derivatives, taken
/// over the sample grid.
double c1_norm(const DataField& f);

/// Geometry/collision parameter 4cS(1 + 2 max{4T, (2/c)(b1-a1), (1/c)(b2-a2)}).
double compute_p(const SpaceTimeBox& box, const ModelParams& params);

/// Data-norm parameter: max over the eight fields of coefficient * c1_norm,
/// with coefficients max{1,2c} for initial fields, (1+c) for inflow 1,
/// max{2,1+c} for inflows 2 and 3, (2+c) for inflow 4.
double compute_q(const ProblemData& data);

struct GateReport {
    double p = 0, q = 0, pq = 0;
    bool gate_ok = false;
    double r_lo = 0, r_hi = 0;       // roots of p R^2 - R + q = 0
    double bound_B = 0;              // = r_hi, sup-norm bound on the solution
    double bound_full = 0;           // max{1, 2/c} * bound_B (solution + derivatives)
    double lambda_star = 0;          // largest uniform data scale passing the gate
};

/// Existence gate pq <= 1/4 with the admissible radius interval and a-priori
/// bounds. p = 0 (free streaming) reports gate_ok with an infinite upper
/// sentinel; the bound is then governed by the data itself.
GateReport gate_report(const ProblemData& data);

/// Structural checks: domains line up with the box, all fields nonnegative,
/// compatibility within data.compat_tol. Returns human-readable issues.
std::vector<std::string> validate_problem(const ProblemData& data);

}  // namespace broadwell

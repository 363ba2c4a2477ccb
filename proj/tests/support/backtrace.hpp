#pragma once

#include <cmath>
#include <stdexcept>

#include "broadwell/eta_field.hpp"
#include "broadwell/model.hpp"
#include "broadwell/oracle.hpp"
#include "broadwell/problem.hpp"

// Physical-space characteristic backtrace, derived independently of the
// sheared-coordinate geometry: walk backwards along the species' advection
// direction until leaving the box, read the data there, then integrate the
// collision source of M forward in time along the ray.
namespace testsupport {

using namespace broadwell;

struct PhysFoot {
    bool initial = true;
    double t = 0, x = 0, y = 0;  // foot coordinates
    double tau = 0;              // elapsed time from foot to evaluation point
};

inline PhysFoot phys_foot(const ProblemData& data, int species, double t, double x, double y) {
    const double c = data.params.c;
    const SpaceTimeBox& b = data.box;
    double tau_face = 0;
    switch (species) {
        case 1: tau_face = (x - b.a1) / c; break;
        case 2: tau_face = (y - b.a2) / c; break;
        case 3: tau_face = (b.b2 - y) / c; break;
        case 4: tau_face = (b.b1 - x) / c; break;
        default: throw std::invalid_argument("phys_foot: bad species");
    }
    PhysFoot f;
    f.initial = t <= tau_face;  // ties go to the initial plane
    f.tau = std::min(t, tau_face);
    const Advection a = btheta_advection(species, data.params);
    f.t = t - f.tau;
    f.x = x - a.ax * f.tau;
    f.y = y - a.ay * f.tau;
    return f;
}

inline double phys_data_at_foot(const ProblemData& data, int species, const PhysFoot& f) {
    if (f.initial) return data.init[species - 1].value(f.x, f.y);
    switch (species) {
        case 1: return data.inflow[0].value(f.t, f.y);
        case 2: return data.inflow[1].value(f.t, f.x);
        case 3: return data.inflow[2].value(f.t, f.x);
        default: return data.inflow[3].value(f.t, f.y);
    }
}

// Mild-solution value at (t,x,y) by Simpson quadrature in time along the
// physical ray, reading M through the coordinate map.
inline double backtrace_value(const EtaField& M, const ProblemData& data, int species, double t,
                              double x, double y, int substeps) {
    const PhysFoot f = phys_foot(data, species, t, x, y);
    double value = phys_data_at_foot(data, species, f);
    if (f.tau <= 0.0) return value;

    const Advection a = btheta_advection(species, data.params);
    const double sign = (species == 1 || species == 4) ? 1.0 : -1.0;
    auto q_at = [&](double u) {
        const CharCoords e = to_eta(f.t + u, f.x + a.ax * u, f.y + a.ay * u, data.params);
        return collision_term(M.interp_all(e), data.params);
    };
    const int n = std::max(2, substeps);
    const double h = f.tau / n;
    double integral = 0.0;
    double fprev = q_at(0.0);
    for (int i = 1; i <= n; ++i) {
        const double u = (i == n) ? f.tau : h * i;
        const double fcur = q_at(u);
        integral += h / 6.0 * (fprev + 4.0 * q_at(u - 0.5 * h) + fcur);
        fprev = fcur;
    }
    return value + sign * integral;
}

}  // namespace testsupport

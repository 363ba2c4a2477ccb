#include "broadwell/characteristics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace broadwell {

CharCoords to_eta(double t, double x, double y, const ModelParams& params) {
    const double c = params.c;
    return {x / c, 0.5 * t - x / (2.0 * c) + y / (2.0 * c),
            0.5 * t - x / (2.0 * c) - y / (2.0 * c)};
}

CharCoords to_eta(const PhysCoords& p, const ModelParams& params) {
    return to_eta(p.t, p.x, p.y, params);
}

PhysCoords from_eta(const CharCoords& e, const ModelParams& params) {
    const double c = params.c;
    return {e.eta1 + e.eta2 + e.eta3, c * e.eta1, c * (e.eta2 - e.eta3)};
}

bool in_box(const SpaceTimeBox& box, const PhysCoords& p, double tol) {
    return p.t >= -tol && p.t <= box.T + tol && p.x >= box.a1 - tol && p.x <= box.b1 + tol &&
           p.y >= box.a2 - tol && p.y <= box.b2 + tol;
}

double geometry_tol(const SpaceTimeBox& box) {
    const double scale = std::max({1.0, box.T, box.b1 - box.a1, box.b2 - box.a2,
                                   std::fabs(box.a1), std::fabs(box.b1), std::fabs(box.a2),
                                   std::fabs(box.b2)});
    return 1e-12 * scale;
}

FootPoint classify_foot(int species, const CharCoords& eta, const SpaceTimeBox& box,
                        const ModelParams& params) {
    if (species < 1 || species > 4)
        throw std::invalid_argument("classify_foot: species must be 1..4");
    const double tol = geometry_tol(box);
    const PhysCoords p = from_eta(eta, params);
    if (!in_box(box, p, tol))
        throw std::domain_error("classify_foot: point outside the space-time box");

    const double c = params.c;
    FootPoint f;
    f.species = species;
    switch (species) {
        case 1: {
            // Backward characteristic lowers eta1; it meets t = 0 at
            // eta1 = -eta2-eta3 (physical x there is -c(eta2+eta3)) unless it
            // crosses x = a1 first.
            const double s_init = -eta.eta2 - eta.eta3;
            const double s_bdry = box.a1 / c;
            if (s_init >= s_bdry) {
                f.kind = FootKind::Initial;
                f.u = -c * (eta.eta2 + eta.eta3);
                f.v = c * (eta.eta2 - eta.eta3);
                f.path_length = eta.eta1 - s_init;
            } else {
                f.kind = FootKind::Inflow;
                f.u = box.a1 / c + eta.eta2 + eta.eta3;
                f.v = c * (eta.eta2 - eta.eta3);
                f.path_length = eta.eta1 - s_bdry;
            }
            break;
        }
        case 2: {
            const double s_init = -eta.eta1 - eta.eta3;
            const double s_bdry = eta.eta3 + box.a2 / c;
            if (s_init >= s_bdry) {
                f.kind = FootKind::Initial;
                f.u = c * eta.eta1;
                f.v = -c * eta.eta1 - 2.0 * c * eta.eta3;
                f.path_length = eta.eta2 - s_init;
            } else {
                f.kind = FootKind::Inflow;
                f.u = eta.eta1 + 2.0 * eta.eta3 + box.a2 / c;
                f.v = c * eta.eta1;
                f.path_length = eta.eta2 - s_bdry;
            }
            break;
        }
        case 3: {
            const double s_init = -eta.eta1 - eta.eta2;
            const double s_bdry = eta.eta2 - box.b2 / c;
            if (s_init >= s_bdry) {
                f.kind = FootKind::Initial;
                f.u = c * eta.eta1;
                f.v = c * eta.eta1 + 2.0 * c * eta.eta2;
                f.path_length = eta.eta3 - s_init;
            } else {
                f.kind = FootKind::Inflow;
                f.u = eta.eta1 + 2.0 * eta.eta2 - box.b2 / c;
                f.v = c * eta.eta1;
                f.path_length = eta.eta3 - s_bdry;
            }
            break;
        }
        case 4: {
            // Path parameter runs 0 -> s_end with t = s along the path; the
            // foot at s = 0 sits at x = c(2 eta1 + eta2 + eta3) on t = 0, or
            // on x = b1 when that exceeds b1.
            const double s_init = eta.eta1 + eta.eta2 + eta.eta3;   // = t
            const double s_bdry = -eta.eta1 + box.b1 / c;           // = (b1-x)/c
            if (s_init <= s_bdry) {
                f.kind = FootKind::Initial;
                f.u = c * (2.0 * eta.eta1 + eta.eta2 + eta.eta3);
                f.v = c * (eta.eta2 - eta.eta3);
                f.path_length = s_init;
            } else {
                f.kind = FootKind::Inflow;
                f.u = 2.0 * eta.eta1 + eta.eta2 + eta.eta3 - box.b1 / c;
                f.v = c * (eta.eta2 - eta.eta3);
                f.path_length = s_bdry;
            }
            break;
        }
    }
    // Negative lengths can only come from roundoff at the box boundary.
    if (f.path_length < 0.0) {
        if (f.path_length < -tol)
            throw std::domain_error("classify_foot: negative path length (point outside P')");
        f.path_length = 0.0;
    }
    return f;
}

double barred_data(int species, FootKind kind, const ProblemData& data, const CharCoords& eta) {
    const SpaceTimeBox& box = data.box;
    const ModelParams& params = data.params;
    const double c = params.c;
    double u = 0, v = 0;
    switch (species) {
        case 1:
            if (kind == FootKind::Initial) {
                u = -c * (eta.eta2 + eta.eta3);
                v = c * (eta.eta2 - eta.eta3);
            } else {
                u = box.a1 / c + eta.eta2 + eta.eta3;
                v = c * (eta.eta2 - eta.eta3);
            }
            break;
        case 2:
            if (kind == FootKind::Initial) {
                u = c * eta.eta1;
                v = -c * eta.eta1 - 2.0 * c * eta.eta3;
            } else {
                u = eta.eta1 + 2.0 * eta.eta3 + box.a2 / c;
                v = c * eta.eta1;
            }
            break;
        case 3:
            if (kind == FootKind::Initial) {
                u = c * eta.eta1;
                v = c * eta.eta1 + 2.0 * c * eta.eta2;
            } else {
                u = eta.eta1 + 2.0 * eta.eta2 - box.b2 / c;
                v = c * eta.eta1;
            }
            break;
        case 4:
            if (kind == FootKind::Initial) {
                u = c * (2.0 * eta.eta1 + eta.eta2 + eta.eta3);
                v = c * (eta.eta2 - eta.eta3);
            } else {
                u = 2.0 * eta.eta1 + eta.eta2 + eta.eta3 - box.b1 / c;
                v = c * (eta.eta2 - eta.eta3);
            }
            break;
        default:
            throw std::invalid_argument("barred_data: species must be 1..4");
    }

    const DataField& field =
        (kind == FootKind::Initial) ? data.init[species - 1] : data.inflow[species - 1];
    const Rect& r = field.rect();
    const double tol =
        geometry_tol(box) * 1e2 + 1e-12 * std::max({std::fabs(u), std::fabs(v), 1.0});
    if (u < r.alo - tol || u > r.ahi + tol || v < r.blo - tol || v > r.bhi + tol)
        throw std::logic_error("barred_data: foot outside data domain (species " +
                               std::to_string(species) + ")");
    return field.value(u, v);
}

CharPath characteristic_path(int species, const CharCoords& eta, const FootPoint& foot) {
    CharPath p;
    switch (species) {
        case 1:
            p.base = {0.0, eta.eta2, eta.eta3};
            p.dir = {1.0, 0.0, 0.0};
            p.s1 = eta.eta1;
            p.s0 = eta.eta1 - foot.path_length;
            break;
        case 2:
            p.base = {eta.eta1, 0.0, eta.eta3};
            p.dir = {0.0, 1.0, 0.0};
            p.s1 = eta.eta2;
            p.s0 = eta.eta2 - foot.path_length;
            break;
        case 3:
            p.base = {eta.eta1, eta.eta2, 0.0};
            p.dir = {0.0, 0.0, 1.0};
            p.s1 = eta.eta3;
            p.s0 = eta.eta3 - foot.path_length;
            break;
        case 4:
            // at(s) = (-s + eta1 + s1, s + eta2 - s1, s + eta3 - s1); at s1 it
            // reaches eta, at 0 the foot (t = 0 plane or the x = b1 face).
            p.s0 = 0.0;
            p.s1 = foot.path_length;
            p.base = {eta.eta1 + p.s1, eta.eta2 - p.s1, eta.eta3 - p.s1};
            p.dir = {-1.0, 1.0, 1.0};
            break;
        default:
            throw std::invalid_argument("characteristic_path: species must be 1..4");
    }
    return p;
}

}  // namespace broadwell

#pragma once

#include "broadwell/model.hpp"
#include "broadwell/problem.hpp"

namespace broadwell {

// Coordinates in the sheared image P' of the space-time box under
//   eta1 = x/c, eta2 = t/2 - x/(2c) + y/(2c), eta3 = t/2 - x/(2c) - y/(2c).
// In these coordinates the four transport operators become single
// directional derivatives and the characteristic through a point is an
// axis line (species 1..3) or the (-1,1,1) line (species 4). The path
// parameter coincides with physical time along the characteristic.
struct CharCoords {
    double eta1 = 0, eta2 = 0, eta3 = 0;
};

struct PhysCoords {
    double t = 0, x = 0, y = 0;
};

CharCoords to_eta(double t, double x, double y, const ModelParams& params);
CharCoords to_eta(const PhysCoords& p, const ModelParams& params);

// t = eta1+eta2+eta3, x = c*eta1, y = c*(eta2-eta3). The map scales volumes
// by exactly 2c^2 (its inverse by 1/(2c^2)).
PhysCoords from_eta(const CharCoords& e, const ModelParams& params);

bool in_box(const SpaceTimeBox& box, const PhysCoords& p, double tol);

enum class FootKind { Initial, Inflow };

// Where the backward characteristic of a species leaves the box: on the
// t = 0 plane (Initial) or on that species' inflow face (Inflow). (u, v) are
// the coordinates of the foot on the data surface: (x, y) for Initial feet,
// (t, y) or (t, x) for Inflow feet depending on the face. path_length is the
// elapsed time from foot to evaluation point.
struct FootPoint {
    int species = 0;
    FootKind kind = FootKind::Initial;
    double u = 0, v = 0;
    double path_length = 0;
};

/// Classify the characteristic foot of `species` through `eta`. Points on the
/// dividing plane (both branches agree there by corner compatibility) are
/// classified Initial. Throws std::domain_error if eta lies outside P'.
FootPoint classify_foot(int species, const CharCoords& eta, const SpaceTimeBox& box,
                        const ModelParams& params);

/// The problem data composed with the characteristic geometry: the value the
/// mild solution picks up at the foot of the given branch. Throws if the foot
/// falls outside the data field's domain beyond roundoff.
double barred_data(int species, FootKind kind, const ProblemData& data, const CharCoords& eta);

// Affine path s -> base + s*dir from the foot (s = s0) to the evaluation
// point (s = s1). Species 1..3 vary only eta1/eta2/eta3; species 4 moves
// along (-1, 1, 1).
struct CharPath {
    double s0 = 0, s1 = 0;
    CharCoords base{}, dir{};
    CharCoords at(double s) const {
        return {base.eta1 + s * dir.eta1, base.eta2 + s * dir.eta2, base.eta3 + s * dir.eta3};
    }
};

CharPath characteristic_path(int species, const CharCoords& eta, const FootPoint& foot);

/// Geometry tolerance used for membership and foot checks.
double geometry_tol(const SpaceTimeBox& box);

}  // namespace broadwell

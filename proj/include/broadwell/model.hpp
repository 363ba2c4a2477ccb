#pragma once

namespace broadwell {

// Plane four-velocity gas model. The first particle velocity makes angle
// theta with the x-axis; the others follow by quarter turns. theta = 0 gives
// the axis-aligned configuration the initial-boundary solver works in.
struct ModelParams {
    double c = 1.0;      // particle speed, > 0
    double S = 1.0;      // collision cross-section parameter, >= 0
    double theta = 0.0;  // orientation angle, in [0, pi/2)

    void validate() const;  // throws std::invalid_argument
};

struct Densities {
    double n1 = 0, n2 = 0, n3 = 0, n4 = 0;
};

struct Moments {
    double rho = 0;  // total density, = n1+n2+n3+n4
    double u = 0;    // macroscopic velocity components
    double v = 0;
};

struct Advection {
    double ax = 0, ay = 0;
};

/// Binary collision source 2cS(n2*n3 - n1*n4); drives species 1 and 4 with
/// sign +, species 2 and 3 with sign -.
double collision_term(const Densities& n, const ModelParams& params);

/// Macroscopic density and velocity. Throws std::domain_error when rho = 0
/// (velocity undefined for the vacuum state).
Moments moments(const Densities& n, const ModelParams& params);

/// Local equilibrium densities for the given moments; characterized by a
/// vanishing collision term.
Densities maxwellian(const Moments& m, const ModelParams& params);

/// Advection velocity of species 1..4. Throws std::invalid_argument for any
/// other index.
Advection btheta_advection(int species, const ModelParams& params);

}  // namespace broadwell

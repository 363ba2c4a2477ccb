#include "broadwell/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace broadwell {

namespace {
constexpr double kHalfPi = 1.5707963267948966;
}

void ModelParams::validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("ModelParams: c must be > 0");
    if (!(S >= 0.0)) throw std::invalid_argument("ModelParams: S must be >= 0");
    if (!(theta >= 0.0 && theta < kHalfPi))
        throw std::invalid_argument("ModelParams: theta must lie in [0, pi/2)");
}

double collision_term(const Densities& n, const ModelParams& params) {
    return 2.0 * params.c * params.S * (n.n2 * n.n3 - n.n1 * n.n4);
}

Moments moments(const Densities& n, const ModelParams& params) {
    const double rho = n.n1 + n.n2 + n.n3 + n.n4;
    if (rho == 0.0)
        throw std::domain_error("moments: degenerate state, rho = 0");
    const double ct = std::cos(params.theta);
    const double st = std::sin(params.theta);
    const double d14 = n.n1 - n.n4;
    const double d23 = n.n2 - n.n3;
    return {rho, (ct * d14 - st * d23) / rho, (st * d14 + ct * d23) / rho};
}

Densities maxwellian(const Moments& m, const ModelParams& params) {
    const double ct = std::cos(params.theta);
    const double st = std::sin(params.theta);
    const double c2 = std::cos(2.0 * params.theta);
    const double s2 = std::sin(2.0 * params.theta);
    const double quad = c2 * (m.u * m.u - m.v * m.v) + 2.0 * m.u * m.v * s2;
    const double lin_uc = 2.0 * m.u * ct;
    const double lin_vs = 2.0 * m.v * st;
    const double lin_vc = 2.0 * m.v * ct;
    const double lin_us = 2.0 * m.u * st;
    const double r4 = m.rho / 4.0;
    return {
        r4 * (1.0 + quad + lin_uc + lin_vs),
        r4 * (1.0 - quad + lin_vc - lin_us),
        r4 * (1.0 - quad - lin_vc + lin_us),
        r4 * (1.0 + quad - lin_uc - lin_vs),
    };
}

Advection btheta_advection(int species, const ModelParams& params) {
    const double cc = params.c * std::cos(params.theta);
    const double cs = params.c * std::sin(params.theta);
    switch (species) {
        case 1: return {cc, cs};
        case 2: return {-cs, cc};
        case 3: return {cs, -cc};
        case 4: return {-cc, -cs};
        default:
            throw std::invalid_argument("btheta_advection: species must be 1..4, got " +
                                        std::to_string(species));
    }
}

}  // namespace broadwell

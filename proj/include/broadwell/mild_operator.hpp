#pragma once

#include "broadwell/eta_field.hpp"
#include "broadwell/problem.hpp"

namespace broadwell {

enum class QuadratureRule { Trapezoid, Simpson };

struct QuadratureConfig {
    QuadratureRule rule = QuadratureRule::Trapezoid;
    double max_step = 0.0;  // path-parameter step bound; 0 -> min grid spacing
    int threads = 0;        // 0 -> hardware concurrency
};

// One application of the mild fixed-point operator: for every unmasked grid
// node, the data value at the characteristic foot plus the path integral of
// the collision source of M (sign +,-,-,+ per species). Quadrature chunks are
// split at every grid-plane crossing, so the integrand is polynomial per
// chunk and composite trapezoid converges at clean second order.
EtaField apply_T(const EtaField& M, const ProblemData& data, const QuadratureConfig& quad);

// Exponentially damped variant: both sides of each equation are shifted by
// sigma * rho(|M|) * N_i, and the explicit solution formula integrates the
// shifted source with exp(-sigma * int rho) weights accumulated incrementally
// along the path. For sigma >= 2cS every contribution is nonnegative, so
// nonnegative data yields a nonnegative output regardless of M's sign.
// Throws std::invalid_argument when sigma < 2cS.
EtaField apply_T_sigma(const EtaField& M, double sigma, const ProblemData& data,
                       const QuadratureConfig& quad);

/// The operator's Lipschitz coefficient p' = 4cS max{T, (b1-a1)/c, (b2-a2)/c}.
double lipschitz_coefficient(const SpaceTimeBox& box, const ModelParams& params);

/// Guaranteed bound on ||T(A)-T(B)|| / ||A-B||, namely p' (||A|| + ||B||).
double lipschitz_bound(const EtaField& A, const EtaField& B, const SpaceTimeBox& box,
                       const ModelParams& params);

/// Operator formula evaluated at one arbitrary point of P' against the grid
/// field M. Smooth in eta (no interpolation facets), which makes it the right
/// sampler for residual and derivative diagnostics.
double mild_value(const EtaField& M, int species, const CharCoords& eta,
                  const ProblemData& data, const QuadratureConfig& quad);

/// Same, but with the branch (Initial/Inflow foot) forced; meaningful on the
/// classification plane where both branches are defined and agree.
double mild_value_branch(const EtaField& M, int species, const CharCoords& eta, FootKind kind,
                         const ProblemData& data, const QuadratureConfig& quad);

}  // namespace broadwell

#pragma once

#include <array>
#include <memory>
#include <vector>

#include "broadwell/eta_field.hpp"
#include "broadwell/mild_operator.hpp"
#include "broadwell/problem.hpp"

namespace broadwell {

enum class InitialGuess { Zero, FreeStreaming, Constant };

struct SolverConfig {
    int n1 = 33, n2 = 33, n3 = 33;  // eta grid resolution
    int max_iters = 200;
    double abs_tol = 1e-9;          // sup norm of successive iterates
    bool use_sigma = false;         // iterate the damped operator instead
    double sigma = 0.0;             // 0 -> 2cS (smallest admissible)
    InitialGuess guess = InitialGuess::FreeStreaming;
    double guess_value = 0.0;       // for InitialGuess::Constant
    QuadratureConfig quad;
    bool override_gate = false;     // run outside pq <= 1/4 (marked in output)
};

enum class SolveStatus { Converged, MaxIters, Diverged };

struct IterationStep {
    int k = 0;
    double delta = 0;    // ||N^k - N^{k-1}||
    double ratio = 0;    // delta_k / delta_{k-1} (0 for the first step)
    double seconds = 0;  // wall time of this operator application
};

struct IterationTrace {
    std::vector<IterationStep> steps;
    SolveStatus status = SolveStatus::MaxIters;
    double final_delta() const { return steps.empty() ? 0.0 : steps.back().delta; }
};

class Solution {
public:
    Solution(EtaField field, GateReport gate, IterationTrace trace,
             std::shared_ptr<const ProblemData> data, QuadratureConfig quad);

    const EtaField& field() const { return field_; }
    const GateReport& gate() const { return gate_; }
    const IterationTrace& trace() const { return trace_; }
    const ProblemData& data() const { return *data_; }
    const QuadratureConfig& quad() const { return quad_; }

    /// Trilinear interpolation of the fixed-point grid; reproduces node
    /// values exactly at grid images.
    Densities sample(double t, double x, double y) const;
    double sample_species(int species, double t, double x, double y) const;

    /// Evaluation through the characteristic integral formula against the
    /// converged grid field. Agrees with sample() to discretization accuracy
    /// and is smooth between nodes, which makes it the sampler of choice for
    /// residual and derivative diagnostics.
    Densities sample_mild(double t, double x, double y) const;
    double sample_mild_species(int species, double t, double x, double y) const;

    /// (d/dt, d/dx, d/dy) of the interpolant, via the inverse change of
    /// variables applied to its eta-gradient.
    std::array<double, 3> sample_derivative(int species, double t, double x, double y) const;

private:
    CharCoords eta_of(double t, double x, double y) const;
    EtaField field_;
    GateReport gate_;
    IterationTrace trace_;
    std::shared_ptr<const ProblemData> data_;
    QuadratureConfig quad_;
};

/// Picard iteration of the mild operator (or its damped variant) from the
/// configured guess until the successive sup-norm delta drops below abs_tol.
/// Throws std::runtime_error when the gate fails and no override is set; a
/// divergence or iteration-budget stop is reported through trace().status.
Solution solve(const ProblemData& data, const SolverConfig& cfg);

/// Guaranteed Picard contraction ratio (p'/p)(1 + sqrt(1-4pq)) inside the
/// gate; < 1 always since p'/p < 1/2. Throws std::domain_error outside the
/// gate. Zero when p = 0 (the operator is then constant in M).
double contraction_factor(const GateReport& gate, const SpaceTimeBox& box,
                          const ModelParams& params);

/// A-posteriori sup-norm distance bound to the fixed point of the discrete
/// operator: kappa/(1-kappa) * delta_last.
double error_estimate(const IterationTrace& trace, double kappa);

struct DiagnosticsOptions {
    int samples = 13;         // sample lattice per axis
    double h_fd = 0.0;        // finite-difference step; 0 -> extent/2048 per axis
    double plane_margin = 0;  // exclusion distance from the four planes;
                              // 0 -> one grid-cell diameter plus the stencil
    double interior_pad = 0.02;  // fraction of each extent trimmed at the faces
};

/// Sup of |dN_i/dt + a_i . grad N_i - (+-)Q(N)| per species over interior
/// sample points away from the four planes x-ct=a1, y-ct=a2, y+ct=b2,
/// x+ct=b1 where first derivatives may jump.
std::array<double, 4> residual(const Solution& sol, const ProblemData& data,
                               const DiagnosticsOptions& opts = {});

struct DerivativeBoundReport {
    // measured[species-1][dir]: finite-difference sup of d/dt, d/dx, d/dy
    std::array<std::array<double, 3>, 4> measured{};
    std::array<double, 3> bounds{};  // B, (2/c) B, (1/c) B
    bool ok(double slack = 1.1) const;
};

DerivativeBoundReport derivative_bound_check(const Solution& sol, const GateReport& gate,
                                             const DiagnosticsOptions& opts = {});

struct MassBalanceReport {
    double mass_defect = 0;   // sup_t |d/dt integral rho - boundary flux|
    double momx_defect = 0;   // same for N1 - N4 against the x-face flux
    double momy_defect = 0;   // same for N2 - N3 against the y-face flux
    double mass_scale = 0;    // max_t |integral rho|
};

/// Discrete balance of total mass and of the two collision-free momentum
/// combinations, with Simpson quadrature in space and 4th-order differences
/// in time.
MassBalanceReport mass_balance(const Solution& sol, int nt = 17, int nxy = 33);

}  // namespace broadwell

#pragma once

#include <array>
#include <vector>

#include "broadwell/problem.hpp"

namespace broadwell {

struct FDGrid {
    int nx = 64, ny = 64, nt = 64;
};

// First-order upwind transport with explicit collision relaxation under Lie
// splitting, stepped on a physical (x, y) node grid. A verification solver,
// entirely independent of the characteristic machinery.
class UpwindSolution {
public:
    UpwindSolution(SpaceTimeBox box, ModelParams params, FDGrid grid);

    /// Field value at (t, x, y): linear in t between stored steps, bilinear
    /// in space.
    double value(int species, double t, double x, double y) const;

    int nx() const { return grid_.nx; }
    int ny() const { return grid_.ny; }
    int nt() const { return grid_.nt; }
    double dt() const { return dt_; }

    double node(int species, int step, int ix, int iy) const {
        return frames_[step][species - 1][static_cast<std::size_t>(iy) * grid_.nx + ix];
    }
    std::array<std::vector<double>, 4>& frame(int step) { return frames_[step]; }

private:
    friend UpwindSolution upwind_solve(const ProblemData&, const FDGrid&);
    SpaceTimeBox box_;
    ModelParams params_;
    FDGrid grid_;
    double dx_, dy_, dt_;
    std::vector<std::array<std::vector<double>, 4>> frames_;  // nt+1 time levels
};

/// Runs the upwind/splitting scheme. Enforces the transport CFL condition
/// c dt / min(dx, dy) <= 1 and the collision positivity limit
/// dt * 2cS * rho_max <= 1; throws std::invalid_argument when violated.
UpwindSolution upwind_solve(const ProblemData& data, const FDGrid& grid);

/// Closed-form transport solution for S = 0: each species carries its
/// initial or inflow data unchanged along its characteristic.
double free_streaming_exact(const ProblemData& data, double t, double x, double y, int species);

}  // namespace broadwell

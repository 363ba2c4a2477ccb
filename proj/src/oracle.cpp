#include "broadwell/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "broadwell/kernels.hpp"

namespace broadwell {

UpwindSolution::UpwindSolution(SpaceTimeBox box, ModelParams params, FDGrid grid)
    : box_(box), params_(params), grid_(grid) {
    if (grid_.nx < 2 || grid_.ny < 2 || grid_.nt < 1)
        throw std::invalid_argument("FDGrid: need nx, ny >= 2 and nt >= 1");
    dx_ = (box_.b1 - box_.a1) / (grid_.nx - 1);
    dy_ = (box_.b2 - box_.a2) / (grid_.ny - 1);
    dt_ = box_.T / grid_.nt;
    frames_.resize(grid_.nt + 1);
    for (auto& f : frames_)
        for (auto& v : f) v.assign(static_cast<std::size_t>(grid_.nx) * grid_.ny, 0.0);
}

double UpwindSolution::value(int species, double t, double x, double y) const {
    const double ut = std::min(std::max(t / dt_, 0.0), static_cast<double>(grid_.nt));
    const int it = std::min(static_cast<int>(ut), grid_.nt - 1);
    const double wt = ut - it;

    auto bilinear = [&](int step) {
        const double ux =
            std::min(std::max((x - box_.a1) / dx_, 0.0), static_cast<double>(grid_.nx - 1));
        const double uy =
            std::min(std::max((y - box_.a2) / dy_, 0.0), static_cast<double>(grid_.ny - 1));
        const int ix = std::min(static_cast<int>(ux), grid_.nx - 2);
        const int iy = std::min(static_cast<int>(uy), grid_.ny - 2);
         const double wx = ux - ix, wy = uy - iy;
        const double v00 = node(species, step, ix, iy);
        const double v10 = node(species, step, ix + 1, iy);
        const double v01 = node(species, step, ix, iy + 1);
        const double v11 = node(species, step, ix + 1, iy + 1);
        return (1 - wx) * ((1 - wy) * v00 + wy * v01) + wx * ((1 - wy) * v10 + wy * v11);
    };
    return (1.0 - wt) * bilinear(it) + wt * bilinear(it + 1);
}

UpwindSolution upwind_solve(const ProblemData& data, const FDGrid& grid) {
    data.box.validate();
    data.params.validate();
    UpwindSolution sol(data.box, data.params, grid);
    const double c = data.params.c;
    const double dx = sol.dx_, dy = sol.dy_, dt = sol.dt_;
    const double cfl = c * dt / std::min(dx, dy);
    if (cfl > 1.0 + 1e-12)
        throw std::invalid_argument("upwind_solve: CFL " + std::to_string(cfl) +
                                    " > 1; refine nt");
    const double cflx = c * dt / dx, cfly = c * dt / dy;
    const int nx = grid.nx, ny = grid.ny;
    const std::size_t npts = static_cast<std::size_t>(nx) * ny;
    const auto& ker = kernels::ops();

    // initial data
    for (int s = 0; s < 4; ++s) {
        auto& f = sol.frames_[0][s];
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                f[static_cast<std::size_t>(iy) * nx + ix] =
                    data.init[s].value(data.box.a1 + dx * ix, data.box.a2 + dy * iy);
    }

    std::vector<double> q(npts);
    const double twoCS = 2.0 * c * data.params.S;
    for (int step = 0; step < grid.nt; ++step) {
        const auto& cur = sol.frames_[step];
        auto& nxt = sol.frames_[step + 1];
        const double t_new = dt * (step + 1);

        // transport: pure upwind per species; the stencil never reaches
        // outside on outflow sides, so only inflow faces need data
        for (int iy = 0; iy < ny; ++iy) {
            const double* row = cur[0].data() + static_cast<std::size_t>(iy) * nx;
            double* out = nxt[0].data() + static_cast<std::size_t>(iy) * nx;
            ker.upwind_pair(out + 1, row + 1, row, cflx, nx - 1);
            out[0] = data.inflow[0].value(t_new, data.box.a2 + dy * iy);
        }
        for (int iy = 0; iy < ny; ++iy) {
            const double* row = cur[3].data() + static_cast<std::size_t>(iy) * nx;
            double* out = nxt[3].data() + static_cast<std::size_t>(iy) * nx;
            ker.upwind_pair(out, row, row + 1, cflx, nx - 1);
            out[nx - 1] = data.inflow[3].value(t_new, data.box.a2 + dy * iy);
        }
        for (int iy = ny - 1; iy >= 1; --iy) {
            const double* row = cur[1].data() + static_cast<std::size_t>(iy) * nx;
            const double* prev = cur[1].data() + static_cast<std::size_t>(iy - 1) * nx;
            double* out = nxt[1].data() + static_cast<std::size_t>(iy) * nx;
            ker.upwind_pair(out, row, prev, cfly, nx);
        }
        for (int iy = 0; iy < ny - 1; ++iy) {
            const double* row = cur[2].data() + static_cast<std::size_t>(iy) * nx;
            const double* next = cur[2].data() + static_cast<std::size_t>(iy + 1) * nx;
            double* out = nxt[2].data() + static_cast<std::size_t>(iy) * nx;
            ker.upwind_pair(out, row, next, cfly, nx);
        }
        for (int ix = 0; ix < nx; ++ix) {
            nxt[1][ix] = data.inflow[1].value(t_new, data.box.a1 + dx * ix);
            nxt[2][static_cast<std::size_t>(ny - 1) * nx + ix] =
                data.inflow[2].value(t_new, data.box.a1 + dx * ix);
        }

        // collision step: explicit Euler, with the positivity time-step limit
        double rho_max = 0.0;
        for (std::size_t i = 0; i < npts; ++i)
            rho_max = std::max(rho_max, nxt[0][i] + nxt[1][i] + nxt[2][i] + nxt[3][i]);
        if (dt * twoCS * rho_max > 1.0 + 1e-12)
            throw std::invalid_argument(
                "upwind_solve: collision positivity limit dt*2cS*rho_max <= 1 violated");
        ker.collision_q(nxt[0].data(), nxt[1].data(), nxt[2].data(), nxt[3].data(), q.data(),
                        npts, twoCS);
        ker.axpy(dt, q.data(), nxt[0].data(), npts);
        ker.axpy(-dt, q.data(), nxt[1].data(), npts);
        ker.axpy(-dt, q.data(), nxt[2].data(), npts);
        ker.axpy(dt, q.data(), nxt[3].data(), npts);

        // inflow values are prescribed, not evolved
        for (int iy = 0; iy < ny; ++iy) {
            nxt[0][static_cast<std::size_t>(iy) * nx] =
                data.inflow[0].value(t_new, data.box.a2 + dy * iy);
            nxt[3][static_cast<std::size_t>(iy) * nx + nx - 1] =
                data.inflow[3].value(t_new, data.box.a2 + dy * iy);
        }
        for (int ix = 0; ix < nx; ++ix) {
            nxt[1][ix] = data.inflow[1].value(t_new, data.box.a1 + dx * ix);
            nxt[2][static_cast<std::size_t>(ny - 1) * nx + ix] =
                data.inflow[2].value(t_new, data.box.a1 + dx * ix);
        }
    }
    return sol;
}

double free_streaming_exact(const ProblemData& data, double t, double x, double y, int species) {
    const double c = data.params.c;
    const SpaceTimeBox& b = data.box;
    switch (species) {
        case 1:
            return (x - c * t >= b.a1) ? data.init[0].value(x - c * t, y)
                                       : data.inflow[0].value(t - (x - b.a1) / c, y);
        case 2:
            return (y - c * t >= b.a2) ? data.init[1].value(x, y - c * t)
                                       : data.inflow[1].value(t - (y - b.a2) / c, x);
        case 3:
            return (y + c * t <= b.b2) ? data.init[2].value(x, y + c * t)
                                       : data.inflow[2].value(t - (b.b2 - y) / c, x);
        case 4:
            return (x + c * t <= b.b1) ? data.init[3].value(x + c * t, y)
                                       : data.inflow[3].value(t - (b.b1 - x) / c, y);
        default:
            throw std::invalid_argument("free_streaming_exact: species must be 1..4");
    }
}

}  // namespace broadwell

#include "broadwell/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace broadwell {

namespace {

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double species_of(const Densities& d, int s) {
    switch (s) {
        case 0: return d.n1;
        case 1: return d.n2;
        case 2: return d.n3;
        default: return d.n4;
    }
}

}  // namespace

Solution::Solution(EtaField field, GateReport gate, IterationTrace trace,
                   std::shared_ptr<const ProblemData> data, QuadratureConfig quad)
    : field_(std::move(field)),
      gate_(gate),
      trace_(std::move(trace)),
      data_(std::move(data)),
      quad_(quad) {}

CharCoords Solution::eta_of(double t, double x, double y) const {
    const SpaceTimeBox& b = data_->box;
    const double tol = geometry_tol(b);
    if (t < -tol || t > b.T + tol || x < b.a1 - tol || x > b.b1 + tol || y < b.a2 - tol ||
        y > b.b2 + tol)
        throw std::domain_error("Solution::sample: point outside the space-time box");
    return to_eta(clampd(t, 0.0, b.T), clampd(x, b.a1, b.b1), clampd(y, b.a2, b.b2),
                  data_->params);
}

Densities Solution::sample(double t, double x, double y) const {
    const CharCoords e = eta_of(t, x, y);
    // Cells straddling the boundary of F(P) interpolate only one-sidedly;
    // evaluate those through the characteristic formula instead.
    if (!field_.interp_clean(e)) return sample_mild(t, x, y);
    return field_.interp_all(e);
}

double Solution::sample_species(int species, double t, double x, double y) const {
    const CharCoords e = eta_of(t, x, y);
    if (!field_.interp_clean(e)) return mild_value(field_, species, e, *data_, quad_);
    return field_.interp(species, e);
}

Densities Solution::sample_mild(double t, double x, double y) const {
    const CharCoords e = eta_of(t, x, y);
    return {mild_value(field_, 1, e, *data_, quad_), mild_value(field_, 2, e, *data_, quad_),
            mild_value(field_, 3, e, *data_, quad_), mild_value(field_, 4, e, *data_, quad_)};
}

double Solution::sample_mild_species(int species, double t, double x, double y) const {
    return mild_value(field_, species, eta_of(t, x, y), *data_, quad_);
}

std::array<double, 3> Solution::sample_derivative(int species, double t, double x,
                                                  double y) const {
    const auto g = field_.interp_gradient(species, eta_of(t, x, y));
    const double c = data_->params.c;
    return {0.5 * (g[1] + g[2]),
            g[0] / c - 0.5 * (g[1] + g[2]) / c,
            0.5 * (g[1] - g[2]) / c};
}

Solution solve(const ProblemData& data, const SolverConfig& cfg) {
    data.box.validate();
    data.params.validate();
    if (cfg.max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    if (!(cfg.abs_tol > 0.0)) throw std::invalid_argument("SolverConfig: abs_tol must be > 0");

    const GateReport gate = gate_report(data);
    if (!gate.gate_ok && !cfg.override_gate) {
        std::ostringstream os;
        os << "solve: existence gate violated (p*q = " << gate.pq
           << " > 1/4); rescale the data by at most " << gate.lambda_star
           << " or pass the explicit override";
        throw std::runtime_error(os.str());
    }

    const double sigma =
        cfg.sigma > 0.0 ? cfg.sigma : 2.0 * data.params.c * data.params.S;

    auto grid = std::make_shared<const EtaGrid>(data.box, data.params, cfg.n1, cfg.n2, cfg.n3);
    auto apply = [&](const EtaField& M) {
        return cfg.use_sigma ? apply_T_sigma(M, sigma, data, cfg.quad)
                             : apply_T(M, data, cfg.quad);
    };

    EtaField cur = EtaField::zeros(grid);
    switch (cfg.guess) {
        case InitialGuess::Zero:
            break;
        case InitialGuess::Constant:
            cur = EtaField::constant(grid, {cfg.guess_value, cfg.guess_value, cfg.guess_value,
                                            cfg.guess_value});
            break;
        case InitialGuess::FreeStreaming:
            // T applied to zero: pure characteristic transport of the data.
            cur = apply_T(cur, data, cfg.quad);
            break;
    }

    IterationTrace trace;
    trace.status = SolveStatus::MaxIters;
    double prev_delta = std::numeric_limits<double>::infinity();
    int increases = 0;
    for (int k = 1; k <= cfg.max_iters; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        EtaField next = apply(cur);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double delta = sup_distance(next, cur);
        const double ratio =
            (k > 1 && prev_delta > 0.0 && std::isfinite(prev_delta)) ? delta / prev_delta : 0.0;
        trace.steps.push_back({k, delta, ratio, secs});
        cur = std::move(next);
        if (!std::isfinite(delta)) {
            trace.status = SolveStatus::Diverged;
            break;
        }
        if (delta <= cfg.abs_tol) {
            trace.status = SolveStatus::Converged;
            break;
        }
        increases = delta > prev_delta ? increases + 1 : 0;
        if (increases >= 5) {
            // Inside the gate the iteration cannot diverge; this flags a
            // configuration or discretization problem.
            trace.status = SolveStatus::Diverged;
            break;
        }
        prev_delta = delta;
    }

    return Solution(std::move(cur), gate, std::move(trace),
                    std::make_shared<const ProblemData>(data), cfg.quad);
}

double contraction_factor(const GateReport& gate, const SpaceTimeBox& box,
                          const ModelParams& params) {
    if (!gate.gate_ok)
        throw std::domain_error("contraction_factor: gate pq <= 1/4 not satisfied");
    if (gate.p == 0.0) return 0.0;
    const double pprime = lipschitz_coefficient(box, params);
    const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * gate.pq));
    return pprime / gate.p * (1.0 + disc);
}

double error_estimate(const IterationTrace& trace, double kappa) {
    if (trace.steps.empty())
        throw std::invalid_argument("error_estimate: no completed iteration step");
    if (!(kappa >= 0.0) || kappa >= 1.0)
        throw std::domain_error("error_estimate: need 0 <= kappa < 1");
    return kappa / (1.0 - kappa) * trace.final_delta();
}

namespace {

struct ScanPoint {
    double t, x, y;
    Densities center;
    double deriv[4][3];  // species-1 x {d/dt, d/dx, d/dy}
};

// Central differences of the characteristic-formula sampler over an interior
// lattice, skipping points within `margin` of the four weak-derivative planes.
// Differencing amplifies quadrature noise, so the sampler runs Simpson at a
// quarter of the grid spacing regardless of the solve's own settings.
template <typename Fn>
void scan_derivatives(const Solution& sol, const DiagnosticsOptions& opts, Fn&& visit) {
    const SpaceTimeBox& b = sol.data().box;
    const double c = sol.data().params.c;
    const int n = std::max(3, opts.samples);

    QuadratureConfig dq = sol.quad();
    dq.rule = QuadratureRule::Simpson;
    dq.max_step = 0.25 * sol.field().grid().min_spacing();
    const ProblemData& data = sol.data();
    auto sample = [&](double t, double x, double y) {
        const CharCoords e = to_eta(t, x, y, data.params);
        return Densities{mild_value(sol.field(), 1, e, data, dq),
                         mild_value(sol.field(), 2, e, data, dq),
                         mild_value(sol.field(), 3, e, data, dq),
                         mild_value(sol.field(), 4, e, data, dq)};
    };
    const double ext_t = b.T, ext_x = b.b1 - b.a1, ext_y = b.b2 - b.a2;
    const double ht = opts.h_fd > 0.0 ? opts.h_fd : ext_t / 2048.0;
    const double hx = opts.h_fd > 0.0 ? opts.h_fd : ext_x / 2048.0;
    const double hy = opts.h_fd > 0.0 ? opts.h_fd : ext_y / 2048.0;
    // keep the whole FD stencil and the full interpolation cell away from the
    // planes: the solution is only C^0 across them
    const EtaGrid& grid = sol.field().grid();
    const double cell_reach = c * (grid.h1 + grid.h2 + grid.h3);
    const double fd_reach = 2.0 * (c * ht + std::max(hx, hy));
    const double margin =
        opts.plane_margin > 0.0 ? std::max(opts.plane_margin, fd_reach) : cell_reach + fd_reach;

    const double pt = std::max(opts.interior_pad * ext_t, 2.0 * ht);
    const double px = std::max(opts.interior_pad * ext_x, 2.0 * hx);
    const double py = std::max(opts.interior_pad * ext_y, 2.0 * hy);
    for (int it = 0; it < n; ++it) {
        const double t = pt + (ext_t - 2.0 * pt) * it / (n - 1);
        for (int ix = 0; ix < n; ++ix) {
            const double x = b.a1 + px + (ext_x - 2.0 * px) * ix / (n - 1);
            for (int iy = 0; iy < n; ++iy) {
                const double y = b.a2 + py + (ext_y - 2.0 * py) * iy / (n - 1);
                const double planes[4] = {x - c * t - b.a1, y - c * t - b.a2,
                                          y + c * t - b.b2, x + c * t - b.b1};
                bool near = false;
                for (double pl : planes) near = near || std::fabs(pl) < margin;
                if (near) continue;

                ScanPoint p;
                p.t = t;
                p.x = x;
                p.y = y;
                p.center = sample(t, x, y);
                const Densities tp = sample(t + ht, x, y);
                const Densities tm = sample(t - ht, x, y);
                const Densities xp = sample(t, x + hx, y);
                const Densities xm = sample(t, x - hx, y);
                const Densities yp = sample(t, x, y + hy);
                const Densities ym = sample(t, x, y - hy);
                for (int s = 0; s < 4; ++s) {
                    p.deriv[s][0] = (species_of(tp, s) - species_of(tm, s)) / (2.0 * ht);
                    p.deriv[s][1] = (species_of(xp, s) - species_of(xm, s)) / (2.0 * hx);
                    p.deriv[s][2] = (species_of(yp, s) - species_of(ym, s)) / (2.0 * hy);
                }
                visit(p);
            }
        }
    }
}

}  // namespace

std::array<double, 4> residual(const Solution& sol, const ProblemData& data,
                               const DiagnosticsOptions& opts) {
    const double c = data.params.c;
    std::array<double, 4> sup{};
    scan_derivatives(sol, opts, [&](const ScanPoint& p) {
        const double q = collision_term(p.center, data.params);
        // advection: species 1 +x, 2 +y, 3 -y, 4 -x
        const double r1 = p.deriv[0][0] + c * p.deriv[0][1] - q;
        const double r2 = p.deriv[1][0] + c * p.deriv[1][2] + q;
        const double r3 = p.deriv[2][0] - c * p.deriv[2][2] + q;
        const double r4 = p.deriv[3][0] - c * p.deriv[3][1] - q;
        sup[0] = std::max(sup[0], std::fabs(r1));
        sup[1] = std::max(sup[1], std::fabs(r2));
        sup[2] = std::max(sup[2], std::fabs(r3));
        sup[3] = std::max(sup[3], std::fabs(r4));
    });
    return sup;
}

bool DerivativeBoundReport::ok(double slack) const {
    for (int s = 0; s < 4; ++s)
        for (int d = 0; d < 3; ++d) {
            if (!std::isfinite(bounds[d])) continue;
            if (measured[s][d] > bounds[d] * slack) return false;
        }
    return true;
}

DerivativeBoundReport derivative_bound_check(const Solution& sol, const GateReport& gate,
                                             const DiagnosticsOptions& opts) {
    DerivativeBoundReport rep;
    const double c = sol.data().params.c;
    rep.bounds = {gate.bound_B, 2.0 / c * gate.bound_B, 1.0 / c * gate.bound_B};
    scan_derivatives(sol, opts, [&](const ScanPoint& p) {
        for (int s = 0; s < 4; ++s)
            for (int d = 0; d < 3; ++d)
                rep.measured[s][d] = std::max(rep.measured[s][d], std::fabs(p.deriv[s][d]));
    });
    return rep;
}

namespace {

double simpson_weight(int i, int n) {
    // n odd, composite Simpson over n-1 intervals
    if (i == 0 || i == n - 1) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
}

}  // namespace

MassBalanceReport mass_balance(const Solution& sol, int nt, int nxy) {
    const SpaceTimeBox& b = sol.data().box;
    const double c = sol.data().params.c;
    if (nt < 5) nt = 5;
    if (nxy < 3) nxy = 3;
    if (nxy % 2 == 0) ++nxy;

    const double hx = (b.b1 - b.a1) / (nxy - 1);
    const double hy = (b.b2 - b.a2) / (nxy - 1);
    const double dt = b.T / (nt - 1);

    std::vector<double> mass(nt), px(nt), py(nt);       // volume integrals
    std::vector<double> fmass(nt), fmomx(nt), fmomy(nt);  // boundary fluxes
    for (int m = 0; m < nt; ++m) {
        const double t = dt * m;
        double sm = 0, sx = 0, sy = 0;
        for (int i = 0; i < nxy; ++i) {
            const double wi = simpson_weight(i, nxy);
            const double x = b.a1 + hx * i;
            for (int j = 0; j < nxy; ++j) {
                const double w = wi * simpson_weight(j, nxy);
                const double y = b.a2 + hy * j;
                const Densities d = sol.sample_mild(t, x, y);
                sm += w * (d.n1 + d.n2 + d.n3 + d.n4);
                sx += w * (d.n1 - d.n4);
                sy += w * (d.n2 - d.n3);
            }
        }
        const double wq = hx * hy / 9.0;
        mass[m] = sm * wq;
        px[m] = sx * wq;
        py[m] = sy * wq;

        // x-faces: species 1 and 4 fluxes through x = a1 and x = b1
        double in_a1 = 0, out_b1 = 0, mx_a1 = 0, mx_b1 = 0;
        for (int j = 0; j < nxy; ++j) {
            const double w = simpson_weight(j, nxy);
            const double y = b.a2 + hy * j;
            const Densities da = sol.sample_mild(t, b.a1, y);
            const Densities db = sol.sample_mild(t, b.b1, y);
            in_a1 += w * (da.n1 - da.n4);
            out_b1 += w * (db.n1 - db.n4);
            mx_a1 += w * (da.n1 + da.n4);
            mx_b1 += w * (db.n1 + db.n4);
        }
        // y-faces: species 2 and 3
        double in_a2 = 0, out_b2 = 0, my_a2 = 0, my_b2 = 0;
        for (int i = 0; i < nxy; ++i) {
            const double w = simpson_weight(i, nxy);
            const double x = b.a1 + hx * i;
            const Densities da = sol.sample_mild(t, x, b.a2);
            const Densities db = sol.sample_mild(t, x, b.b2);
            in_a2 += w * (da.n2 - da.n3);
            out_b2 += w * (db.n2 - db.n3);
            my_a2 += w * (da.n2 + da.n3);
            my_b2 += w * (db.n2 + db.n3);
        }
        const double wy = hy / 3.0, wx = hx / 3.0;
        fmass[m] = c * (in_a1 - out_b1) * wy + c * (in_a2 - out_b2) * wx;
        fmomx[m] = -c * (mx_b1 - mx_a1) * wy;
        fmomy[m] = -c * (my_b2 - my_a2) * wx;
    }

    MassBalanceReport rep;
    for (double v : mass) rep.mass_scale = std::max(rep.mass_scale, std::fabs(v));
    // 4th-order central differences in time on the interior samples.
    auto ddt = [&](const std::vector<double>& f, int m) {
        return (-f[m + 2] + 8.0 * f[m + 1] - 8.0 * f[m - 1] + f[m - 2]) / (12.0 * dt);
    };
    for (int m = 2; m + 2 < nt; ++m) {
        rep.mass_defect = std::max(rep.mass_defect, std::fabs(ddt(mass, m) - fmass[m]));
        rep.momx_defect = std::max(rep.momx_defect, std::fabs(ddt(px, m) - fmomx[m]));
        rep.momy_defect = std::max(rep.momy_defect, std::fabs(ddt(py, m) - fmomy[m]));
    }
    return rep;
}

}  // namespace broadwell

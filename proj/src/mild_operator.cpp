#include "broadwell/mild_operator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "parallel_for.hpp"

namespace broadwell {

namespace {

constexpr double kSign[4] = {1.0, -1.0, -1.0, 1.0};

double resolve_max_step(const QuadratureConfig& quad, const EtaGrid& g) {
    if (quad.max_step < 0.0 || !std::isfinite(quad.max_step))
        throw std::invalid_argument("QuadratureConfig: max_step must be > 0 (or 0 for auto)");
    const double ms = quad.max_step > 0.0 ? quad.max_step : g.min_spacing();
    if (!(ms > 0.0)) throw std::invalid_argument("QuadratureConfig: max_step must be > 0");
    return ms;
}

// Power-of-two substep counts make the effective step halve exactly when
// max_step halves, so step-refinement studies see the clean quadrature order.
int substeps_for(double len, double max_step) {
    const double need = std::ceil(len / max_step);
    unsigned n = need >= 1.0 ? static_cast<unsigned>(need) : 1u;
    return static_cast<int>(std::bit_ceil(n));
}

void check_grid_matches(const EtaGrid& g, const ProblemData& data) {
    const SpaceTimeBox& a = g.box;
    const SpaceTimeBox& b = data.box;
    if (a.a1 != b.a1 || a.b1 != b.b1 || a.a2 != b.a2 || a.b2 != b.b2 || a.T != b.T ||
        g.params.c != data.params.c || g.params.S != data.params.S)
        throw std::invalid_argument("operator: field grid was built for different problem data");
}

// ---------------------------------------------------------------------------
// Species 1..3 line sweeps. The characteristic through a grid node varies one
// eta coordinate only, and every node on the line shares the same foot, so a
// single prefix walk from the foot yields the integral at all of them.

struct LineView {
    const double* v[4];        // species values at varying-node 0
    const std::uint8_t* mask;  // same offset/stride
    std::ptrdiff_t stride;
    double o, h;  // varying-axis origin and spacing
    int n;
    bool use_mask;
};

struct LineFoot {
    bool initial = true;
    double s0 = 0;
    double barred = 0;
};

LineFoot line_foot(int sp, const ProblemData& data, const CharCoords& anchor) {
    const SpaceTimeBox& b = data.box;
    const double c = data.params.c;
    double s_init = 0, s_bdry = 0;
    switch (sp) {
        case 1:
            s_init = -anchor.eta2 - anchor.eta3;
            s_bdry = b.a1 / c;
            break;
        case 2:
            s_init = -anchor.eta1 - anchor.eta3;
            s_bdry = anchor.eta3 + b.a2 / c;
            break;
        default:
            s_init = -anchor.eta1 - anchor.eta2;
            s_bdry = anchor.eta2 - b.b2 / c;
            break;
    }
    LineFoot f;
    f.initial = s_init >= s_bdry;  // ties resolve to the initial plane
    f.s0 = std::max(s_init, s_bdry);
    f.barred = barred_data(sp, f.initial ? FootKind::Initial : FootKind::Inflow, data, anchor);
    return f;
}

// Values of the four species at line position `cell + w`; a masked cell
// corner (only the partial first chunk has one) clamps to the live node.
inline void line_vals(const LineView& L, int cell, double w, double out[4]) {
    const bool lo_ok = cell >= 0 && (!L.use_mask || L.mask[cell * L.stride] != 0);
    const bool hi_ok = cell + 1 < L.n && (!L.use_mask || L.mask[(cell + 1) * L.stride] != 0);
    if (lo_ok && hi_ok) {
        const double u = 1.0 - w;
        for (int s = 0; s < 4; ++s)
            out[s] = u * L.v[s][cell * L.stride] + w * L.v[s][(cell + 1) * L.stride];
    } else if (hi_ok) {
        for (int s = 0; s < 4; ++s) out[s] = L.v[s][(cell + 1) * L.stride];
    } else {
        for (int s = 0; s < 4; ++s) out[s] = L.v[s][cell * L.stride];
    }
}

inline double q_of(const double v[4], double twoCS) {
    return twoCS * (v[1] * v[2] - v[0] * v[3]);
}

// sigma-shifted source of |v| for 1-based species sp, plus rho(|v|).
inline double q_sigma_of(const double v[4], int sp, double sigma, double twoCS, double* rho_out) {
    const double a0 = std::fabs(v[0]), a1 = std::fabs(v[1]), a2 = std::fabs(v[2]),
                 a3 = std::fabs(v[3]);
    const double rho = a0 + a1 + a2 + a3;
    *rho_out = rho;
    const double a[4] = {a0, a1, a2, a3};
    return sigma * rho * a[sp - 1] + kSign[sp - 1] * twoCS * (a1 * a2 - a0 * a3);
}

// One exponential-integrator substep for the damped formulas: with rho
// frozen to its substep mean (z = sigma * int rho) and the source linear in
// s, V <- e^{-z} V + dl (w0 f0 + w1 f1) is the exact update. Constants are
// exact fixed points and all weights stay nonnegative.
struct ExpStep {
    double E, w0, w1;
};

inline ExpStep exp_step(double z) {
    ExpStep st;
    st.E = std::exp(-z);
    if (z < 1e-5) {
        st.w0 = 0.5 - z / 3.0 + z * z / 8.0;
        st.w1 = 0.5 - z / 6.0 + z * z / 24.0;
    } else {
        st.w0 = (1.0 - st.E * (1.0 + z)) / (z * z);
        st.w1 = (z - 1.0 + st.E) / (z * z);
    }
    return st;
}

inline double exp_advance(double V, double f0, double f1, double dl, double z) {
    const ExpStep st = exp_step(z);
    return st.E * V + dl * (st.w0 * f0 + st.w1 * f1);
}

void sweep_line_plain(int sp, const LineView& L, const LineFoot& foot, int lo, int hi,
                      double twoCS, double max_step, bool simpson, double* out,
                      std::ptrdiff_t out_stride) {
    const double sgn = kSign[sp - 1];
    double vals[4];

    double prev_pos = foot.s0;
    int foot_cell = static_cast<int>(std::floor((foot.s0 - L.o) / L.h));
    foot_cell = std::min(std::max(foot_cell, lo - 1), std::max(lo - 1, hi - 1));
    line_vals(L, foot_cell, (foot.s0 - (L.o + L.h * foot_cell)) / L.h, vals);
    double fprev = q_of(vals, twoCS);

    double acc = 0.0;
    for (int m = lo; m <= hi; ++m) {
        const double pos = L.o + L.h * m;
        const double len = pos - prev_pos;
        if (len > 0.0) {
            const int cell = m - 1;
            const int nsub = substeps_for(len, max_step);
            const double dl = len / nsub;
            for (int t = 1; t <= nsub; ++t) {
                const double s = (t == nsub) ? pos : prev_pos + t * dl;
                const double w = (s - (L.o + L.h * cell)) / L.h;
                line_vals(L, cell, std::min(std::max(w, 0.0), 1.0), vals);
                const double f = q_of(vals, twoCS);
                if (simpson) {
                    const double sm = s - 0.5 * dl;
                    const double wm = (sm - (L.o + L.h * cell)) / L.h;
                    line_vals(L, cell, std::min(std::max(wm, 0.0), 1.0), vals);
                    acc += dl / 6.0 * (fprev + 4.0 * q_of(vals, twoCS) + f);
                } else {
                    acc += 0.5 * dl * (fprev + f);
                }
                fprev = f;
            }
        }
        out[m * out_stride] = sgn * acc + foot.barred;
        prev_pos = pos;
    }
}

void sweep_line_sigma(int sp, const LineView& L, const LineFoot& foot, int lo, int hi,
                      double sigma, double twoCS, double max_step, bool simpson, double* out,
                      std::ptrdiff_t out_stride) {
    double vals[4], rho_prev, rho_cur, rho_mid;

    double prev_pos = foot.s0;
    int foot_cell = static_cast<int>(std::floor((foot.s0 - L.o) / L.h));
    foot_cell = std::min(std::max(foot_cell, lo - 1), std::max(lo - 1, hi - 1));
    line_vals(L, foot_cell, (foot.s0 - (L.o + L.h * foot_cell)) / L.h, vals);
    double fprev = q_sigma_of(vals, sp, sigma, twoCS, &rho_prev);

    double V = foot.barred;
    for (int m = lo; m <= hi; ++m) {
        const double pos = L.o + L.h * m;
        const double len = pos - prev_pos;
        if (len > 0.0) {
            const int cell = m - 1;
            const int nsub = substeps_for(len, max_step);
            const double dl = len / nsub;
            for (int t = 1; t <= nsub; ++t) {
                const double s = (t == nsub) ? pos : prev_pos + t * dl;
                const double w = (s - (L.o + L.h * cell)) / L.h;
                line_vals(L, cell, std::min(std::max(w, 0.0), 1.0), vals);
                const double f = q_sigma_of(vals, sp, sigma, twoCS, &rho_cur);
                if (simpson) {
                    const double sm = s - 0.5 * dl;
                    const double wm = (sm - (L.o + L.h * cell)) / L.h;
                    line_vals(L, cell, std::min(std::max(wm, 0.0), 1.0), vals);
                    const double fmid = q_sigma_of(vals, sp, sigma, twoCS, &rho_mid);
                    V = exp_advance(V, fprev, fmid, 0.5 * dl,
                                    sigma * 0.25 * dl * (rho_prev + rho_mid));
                    V = exp_advance(V, fmid, f, 0.5 * dl,
                                    sigma * 0.25 * dl * (rho_mid + rho_cur));
                } else {
                    V = exp_advance(V, fprev, f, dl, sigma * 0.5 * dl * (rho_prev + rho_cur));
                }
                fprev = f;
                rho_prev = rho_cur;
            }
        }
        out[m * out_stride] = V;
        prev_pos = pos;
    }
}

// ---------------------------------------------------------------------------
// Generic path quadrature at one point (species 4 bulk work and off-grid
// evaluation for any species). Chunks are split at every grid-plane crossing
// of the affine path, so the stencil cell is fixed per chunk.

struct Corner8 {
    std::size_t idx[8];
    bool live[8];
    bool all_live;
};

inline void corners_at(const EtaGrid& g, const CharCoords& p, bool use_mask, int* ci, int* cj,
                       int* ck, Corner8* c8) {
    auto cell_of = [](double x, double o, double h, int n) {
        double u = (x - o) / h;
        u = std::min(std::max(u, 0.0), static_cast<double>(n - 1));
        return std::min(static_cast<int>(u), n - 2);
    };
    *ci = cell_of(p.eta1, g.o1, g.h1, g.n1);
    *cj = cell_of(p.eta2, g.o2, g.h2, g.n2);
    *ck = cell_of(p.eta3, g.o3, g.h3, g.n3);
    const std::uint8_t* mask = g.mask_data();
    int r = 0;
    c8->all_live = true;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c, ++r) {
                c8->idx[r] = g.index(*ci + a, *cj + b, *ck + c);
                c8->live[r] = !use_mask || mask[c8->idx[r]] != 0;
                c8->all_live = c8->all_live && c8->live[r];
            }
}

inline void tri_vals(const EtaField& M, const Corner8& c8, double w1, double w2, double w3,
                     const CharCoords& p, double out[4]) {
    // corner order matches corners_at: r = a*4 + b*2 + c
    double W[8];
    const double u1 = 1.0 - w1, u2 = 1.0 - w2, u3 = 1.0 - w3;
    W[0] = u1 * u2 * u3;
    W[1] = u1 * u2 * w3;
    W[2] = u1 * w2 * u3;
    W[3] = u1 * w2 * w3;
    W[4] = w1 * u2 * u3;
    W[5] = w1 * u2 * w3;
    W[6] = w1 * w2 * u3;
    W[7] = w1 * w2 * w3;
    if (c8.all_live) {
        for (int s = 0; s < 4; ++s) {
            const double* a = M.values(s + 1).data();
            out[s] = W[0] * a[c8.idx[0]] + W[1] * a[c8.idx[1]] + W[2] * a[c8.idx[2]] +
                     W[3] * a[c8.idx[3]] + W[4] * a[c8.idx[4]] + W[5] * a[c8.idx[5]] +
                     W[6] * a[c8.idx[6]] + W[7] * a[c8.idx[7]];
        }
        return;
    }
    double wsum = 0.0;
    for (int r = 0; r < 8; ++r)
        if (c8.live[r]) wsum += W[r];
    if (wsum <= 0.0) {
        // sliver cell without live corners; the field's own lookup falls back
        // to the nearest live node
        for (int s = 0; s < 4; ++s) out[s] = M.interp(s + 1, p);
        return;
    }
    for (int s = 0; s < 4; ++s) {
        const double* a = M.values(s + 1).data();
        double acc = 0.0;
        for (int r = 0; r < 8; ++r)
            if (c8.live[r]) acc += W[r] * a[c8.idx[r]];
        out[s] = acc / wsum;
    }
}

// Chunk boundaries: path endpoints plus every crossing of a grid plane.
void path_breaks(const EtaGrid& g, const CharPath& path, std::vector<double>& out) {
    out.clear();
    out.push_back(path.s0);
    out.push_back(path.s1);
    const double eps = 1e-12 * std::max({1.0, std::fabs(path.s0), std::fabs(path.s1)});
    const double dirs[3] = {path.dir.eta1, path.dir.eta2, path.dir.eta3};
    const double bases[3] = {path.base.eta1, path.base.eta2, path.base.eta3};
    const double os[3] = {g.o1, g.o2, g.o3};
    const double hs[3] = {g.h1, g.h2, g.h3};
    for (int axis = 0; axis < 3; ++axis) {
        const double d = dirs[axis];
        if (d == 0.0) continue;
        const double v0 = bases[axis] + path.s0 * d;
        const double v1 = bases[axis] + path.s1 * d;
        const double vlo = std::min(v0, v1), vhi = std::max(v0, v1);
        const long mlo = static_cast<long>(std::ceil((vlo - os[axis]) / hs[axis] - 1e-9));
        const long mhi = static_cast<long>(std::floor((vhi - os[axis]) / hs[axis] + 1e-9));
        for (long m = mlo; m <= mhi; ++m) {
            const double s = (os[axis] + m * hs[axis] - bases[axis]) / d;
            if (s > path.s0 + eps && s < path.s1 - eps) out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [eps](double a, double b) { return b - a < eps; }),
              out.end());
    if (out.back() < path.s1 - eps) out.push_back(path.s1);
    out.back() = path.s1;
}

thread_local std::vector<double> t_breaks;

double integrate_path_plain(const EtaField& M, const CharPath& path, double twoCS,
                            double max_step, bool simpson) {
    if (!(path.s1 - path.s0 > 0.0)) return 0.0;
    const EtaGrid& g = M.grid();
    std::vector<double>& brk = t_breaks;
    path_breaks(g, path, brk);

    double vals[4];
    double acc = 0.0;
    for (std::size_t ch = 0; ch + 1 < brk.size(); ++ch) {
        const double A = brk[ch], B = brk[ch + 1];
        const double len = B - A;
        if (!(len > 0.0)) continue;
        int ci, cj, ck;
        Corner8 c8;
        corners_at(g, path.at(0.5 * (A + B)), M.mask_active(), &ci, &cj, &ck, &c8);
        const double g1 = g.g1(ci), g2 = g.g2(cj), g3 = g.g3(ck);
        auto weights = [&](double s, double* w1, double* w2, double* w3) {
            const CharCoords p = path.at(s);
            *w1 = std::min(std::max((p.eta1 - g1) / g.h1, 0.0), 1.0);
            *w2 = std::min(std::max((p.eta2 - g2) / g.h2, 0.0), 1.0);
            *w3 = std::min(std::max((p.eta3 - g3) / g.h3, 0.0), 1.0);
        };
        double w1, w2, w3;
        weights(A, &w1, &w2, &w3);
        tri_vals(M, c8, w1, w2, w3, path.at(A), vals);
        double fprev = q_of(vals, twoCS);
        const int nsub = substeps_for(len, max_step);
        const double dl = len / nsub;
        for (int t = 1; t <= nsub; ++t) {
            const double s = (t == nsub) ? B : A + t * dl;
            weights(s, &w1, &w2, &w3);
            tri_vals(M, c8, w1, w2, w3, path.at(s), vals);
            const double f = q_of(vals, twoCS);
            if (simpson) {
                const double sm = s - 0.5 * dl;
                weights(sm, &w1, &w2, &w3);
                tri_vals(M, c8, w1, w2, w3, path.at(sm), vals);
                acc += dl / 6.0 * (fprev + 4.0 * q_of(vals, twoCS) + f);
            } else {
                acc += 0.5 * dl * (fprev + f);
            }
            fprev = f;
        }
    }
    return acc;
}

double integrate_path_sigma(const EtaField& M, int sp, const CharPath& path, double barred,
                            double sigma, double twoCS, double max_step, bool simpson) {
    if (!(path.s1 - path.s0 > 0.0)) return barred;
    const EtaGrid& g = M.grid();
    std::vector<double>& brk = t_breaks;
    path_breaks(g, path, brk);

    double vals[4], rho_prev = 0, rho_cur = 0, rho_mid = 0;
    double V = barred;
    bool have_prev = false;
    double fprev = 0.0;
    for (std::size_t ch = 0; ch + 1 < brk.size(); ++ch) {
        const double A = brk[ch], B = brk[ch + 1];
        const double len = B - A;
        if (!(len > 0.0)) continue;
        int ci, cj, ck;
        Corner8 c8;
        corners_at(g, path.at(0.5 * (A + B)), M.mask_active(), &ci, &cj, &ck, &c8);
        const double g1 = g.g1(ci), g2 = g.g2(cj), g3 = g.g3(ck);
        auto weights = [&](double s, double* w1, double* w2, double* w3) {
            const CharCoords p = path.at(s);
            *w1 = std::min(std::max((p.eta1 - g1) / g.h1, 0.0), 1.0);
            *w2 = std::min(std::max((p.eta2 - g2) / g.h2, 0.0), 1.0);
            *w3 = std::min(std::max((p.eta3 - g3) / g.h3, 0.0), 1.0);
        };
        double w1, w2, w3;
        weights(A, &w1, &w2, &w3);
        tri_vals(M, c8, w1, w2, w3, path.at(A), vals);
        {
            double rho;
            const double f = q_sigma_of(vals, sp, sigma, twoCS, &rho);
            if (!have_prev) {
                fprev = f;
                rho_prev = rho;
                have_prev = true;
            }
            // at chunk joints the new evaluation equals the previous endpoint
        }
        const int nsub = substeps_for(len, max_step);
        const double dl = len / nsub;
        for (int t = 1; t <= nsub; ++t) {
            const double s = (t == nsub) ? B : A + t * dl;
            weights(s, &w1, &w2, &w3);
            tri_vals(M, c8, w1, w2, w3, path.at(s), vals);
            const double f = q_sigma_of(vals, sp, sigma, twoCS, &rho_cur);
            if (simpson) {
                const double sm = s - 0.5 * dl;
                weights(sm, &w1, &w2, &w3);
                tri_vals(M, c8, w1, w2, w3, path.at(sm), vals);
                const double fmid = q_sigma_of(vals, sp, sigma, twoCS, &rho_mid);
                V = exp_advance(V, fprev, fmid, 0.5 * dl,
                                sigma * 0.25 * dl * (rho_prev + rho_mid));
                V = exp_advance(V, fmid, f, 0.5 * dl,
                                sigma * 0.25 * dl * (rho_mid + rho_cur));
            } else {
                V = exp_advance(V, fprev, f, dl, sigma * 0.5 * dl * (rho_prev + rho_cur));
            }
            fprev = f;
            rho_prev = rho_cur;
        }
    }
    return V;
}

LineView make_line_view(const EtaField& M, int sp, int fixed_a, int fixed_b) {
    const EtaGrid& g = M.grid();
    LineView L;
    std::size_t base;
    switch (sp) {
        case 1:  // line (j, k) = (fixed_a, fixed_b), varying i
            base = g.index(0, fixed_a, fixed_b);
            L.stride = 1;
            L.o = g.o1;
            L.h = g.h1;
            L.n = g.n1;
            break;
        case 2:  // line (i, k), varying j
            base = g.index(fixed_a, 0, fixed_b);
            L.stride = g.n1;
            L.o = g.o2;
            L.h = g.h2;
            L.n = g.n2;
            break;
        default:  // line (i, j), varying k
            base = g.index(fixed_a, fixed_b, 0);
            L.stride = static_cast<std::ptrdiff_t>(g.n1) * g.n2;
            L.o = g.o3;
            L.h = g.h3;
            L.n = g.n3;
            break;
    }
    for (int s = 0; s < 4; ++s) L.v[s] = M.values(s + 1).data() + base;
    L.mask = M.grid().mask_data() + base;
    L.use_mask = M.mask_active();
    return L;
}

struct LineIndex {
    EtaGrid::Segment seg;
    int fa, fb;
    CharCoords anchor;
    std::size_t out_base;
};

// Enumerate nonempty lines of a species together with anchor nodes.
std::vector<LineIndex> collect_lines(const EtaGrid& g, int sp) {
    std::vector<LineIndex> lines;
    if (sp == 1) {
        for (int k = 0; k < g.n3; ++k)
            for (int j = 0; j < g.n2; ++j) {
                const auto s = g.seg1(j, k);
                if (!s.empty())
                    lines.push_back({s, j, k, g.node(s.lo, j, k), g.index(0, j, k)});
            }
    } else if (sp == 2) {
        for (int k = 0; k < g.n3; ++k)
            for (int i = 0; i < g.n1; ++i) {
                const auto s = g.seg2(i, k);
                if (!s.empty())
                    lines.push_back({s, i, k, g.node(i, s.lo, k), g.index(i, 0, k)});
            }
    } else {
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const auto s = g.seg3(i, j);
                if (!s.empty())
                    lines.push_back({s, i, j, g.node(i, j, s.lo), g.index(i, j, 0)});
            }
    }
    return lines;
}

enum class Mode { Plain, Sigma };

EtaField apply_impl(const EtaField& M, const ProblemData& data, const QuadratureConfig& quad,
                    Mode mode, double sigma) {
    const EtaGrid& g = M.grid();
    check_grid_matches(g, data);
    const double max_step = resolve_max_step(quad, g);
    const bool simpson = quad.rule == QuadratureRule::Simpson;
    const double twoCS = 2.0 * data.params.c * data.params.S;

    EtaField out = EtaField::zeros(M.grid_ptr());

    for (int sp = 1; sp <= 3; ++sp) {
        const auto lines = collect_lines(g, sp);
        const std::ptrdiff_t stride = sp == 1 ? 1
                                    : sp == 2 ? g.n1
                                              : static_cast<std::ptrdiff_t>(g.n1) * g.n2;
        double* out_arr = out.values(sp).data();
        detail::parallel_for(
            static_cast<std::int64_t>(lines.size()), quad.threads,
            [&, sp, stride, out_arr](std::int64_t b, std::int64_t e) {
                for (std::int64_t li = b; li < e; ++li) {
                    const LineIndex& ln = lines[li];
                    const LineView L = make_line_view(M, sp, ln.fa, ln.fb);
                    const LineFoot foot = line_foot(sp, data, ln.anchor);
                    if (mode == Mode::Plain)
                        sweep_line_plain(sp, L, foot, ln.seg.lo, ln.seg.hi, twoCS, max_step,
                                         simpson, out_arr + ln.out_base, stride);
                    else
                        sweep_line_sigma(sp, L, foot, ln.seg.lo, ln.seg.hi, sigma, twoCS,
                                         max_step, simpson, out_arr + ln.out_base, stride);
                }
            });
    }

    // Species 4 moves in all three coordinates; evaluate per node.
    {
        const auto lines = collect_lines(g, 1);
        double* out_arr = out.values(4).data();
        detail::parallel_for(
            static_cast<std::int64_t>(lines.size()), quad.threads,
            [&, out_arr](std::int64_t b, std::int64_t e) {
                for (std::int64_t li = b; li < e; ++li) {
                    const LineIndex& ln = lines[li];
                    for (int i = ln.seg.lo; i <= ln.seg.hi; ++i) {
                        const CharCoords eta = g.node(i, ln.fa, ln.fb);
                        const FootPoint foot = classify_foot(4, eta, data.box, data.params);
                        const double barred = barred_data(4, foot.kind, data, eta);
                        const CharPath path = characteristic_path(4, eta, foot);
                        double v;
                        if (mode == Mode::Plain)
                            v = barred + integrate_path_plain(M, path, twoCS, max_step, simpson);
                        else
                            v = integrate_path_sigma(M, 4, path, barred, sigma, twoCS, max_step,
                                                     simpson);
                        out_arr[ln.out_base + i] = v;
                    }
                }
            });
    }
    return out;
}

}  // namespace

EtaField apply_T(const EtaField& M, const ProblemData& data, const QuadratureConfig& quad) {
    return apply_impl(M, data, quad, Mode::Plain, 0.0);
}

EtaField apply_T_sigma(const EtaField& M, double sigma, const ProblemData& data,
                       const QuadratureConfig& quad) {
    const double floor_sigma = 2.0 * data.params.c * data.params.S;
    if (sigma < floor_sigma * (1.0 - 1e-12))
        throw std::invalid_argument("apply_T_sigma: sigma must be >= 2cS");
    return apply_impl(M, data, quad, Mode::Sigma, sigma);
}

double lipschitz_coefficient(const SpaceTimeBox& box, const ModelParams& params) {
    const double c = params.c;
    return 4.0 * c * params.S *
           std::max({box.T, (box.b1 - box.a1) / c, (box.b2 - box.a2) / c});
}

double lipschitz_bound(const EtaField& A, const EtaField& B, const SpaceTimeBox& box,
                       const ModelParams& params) {
    return lipschitz_coefficient(box, params) * (sup_norm(A) + sup_norm(B));
}

double mild_value_branch(const EtaField& M, int species, const CharCoords& eta, FootKind kind,
                         const ProblemData& data, const QuadratureConfig& quad) {
    const EtaGrid& g = M.grid();
    check_grid_matches(g, data);
    const double max_step = resolve_max_step(quad, g);
    const bool simpson = quad.rule == QuadratureRule::Simpson;
    const double twoCS = 2.0 * data.params.c * data.params.S;

    FootPoint foot = classify_foot(species, eta, data.box, data.params);
    if (foot.kind != kind) {
        // Force the other branch: recompute the path length from that
        // branch's lower limit (only sensible on or near the dividing plane).
        const SpaceTimeBox& b = data.box;
        const double c = data.params.c;
        double s0 = 0, s1 = 0;
        switch (species) {
            case 1:
                s1 = eta.eta1;
                s0 = kind == FootKind::Initial ? -eta.eta2 - eta.eta3 : b.a1 / c;
                break;
            case 2:
                s1 = eta.eta2;
                s0 = kind == FootKind::Initial ? -eta.eta1 - eta.eta3 : eta.eta3 + b.a2 / c;
                break;
            case 3:
                s1 = eta.eta3;
                s0 = kind == FootKind::Initial ? -eta.eta1 - eta.eta2 : eta.eta2 - b.b2 / c;
                break;
            default:
                s1 = kind == FootKind::Initial ? eta.eta1 + eta.eta2 + eta.eta3
                                               : -eta.eta1 + b.b1 / c;
                s0 = 0.0;
                break;
        }
        foot.kind = kind;
        foot.path_length = std::max(0.0, s1 - s0);
    }
    const double barred = barred_data(species, kind, data, eta);
    const CharPath path = characteristic_path(species, eta, foot);
    return kSign[species - 1] * integrate_path_plain(M, path, twoCS, max_step, simpson) + barred;
}

double mild_value(const EtaField& M, int species, const CharCoords& eta, const ProblemData& data,
                  const QuadratureConfig& quad) {
    const FootPoint foot = classify_foot(species, eta, data.box, data.params);
    return mild_value_branch(M, species, eta, foot.kind, data, quad);
}

}  // namespace broadwell

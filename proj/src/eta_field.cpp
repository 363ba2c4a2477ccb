#include "broadwell/eta_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "broadwell/kernels.hpp"

namespace broadwell {

EtaGrid::EtaGrid(const SpaceTimeBox& b, const ModelParams& p, int nn1, int nn2, int nn3)
    : box(b), params(p), n1(nn1), n2(nn2), n3(nn3) {
    box.validate();
    params.validate();
    if (n1 < 2 || n2 < 2 || n3 < 2)
        throw std::invalid_argument("EtaGrid: need at least 2 nodes per axis");
    const double c = params.c;
    // Bounding box of F(P): extremes of the linear map over the box vertices.
    o1 = box.a1 / c;
    const double t1 = box.b1 / c;
    o2 = (box.a2 - box.b1) / (2.0 * c);
    const double t2 = 0.5 * box.T + (box.b2 - box.a1) / (2.0 * c);
    o3 = -(box.b1 + box.b2) / (2.0 * c);
    const double t3 = 0.5 * box.T - (box.a1 + box.a2) / (2.0 * c);
    h1 = (t1 - o1) / (n1 - 1);
    h2 = (t2 - o2) / (n2 - 1);
    h3 = (t3 - o3) / (n3 - 1);
    tol = geometry_tol(box);

    mask_.assign(size(), 0);
    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i)
                if (in_box(box, from_eta(node(i, j, k), params), tol)) {
                    mask_[index(i, j, k)] = 1;
                    ++unmasked_count_;
                }

    // P' is convex, so the unmasked nodes along any axis line are one
    // contiguous run.
    seg1_.assign(static_cast<std::size_t>(n2) * n3, {});
    seg2_.assign(static_cast<std::size_t>(n1) * n3, {});
    seg3_.assign(static_cast<std::size_t>(n1) * n2, {});
    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j) {
            Segment s{n1, -1};
            for (int i = 0; i < n1; ++i)
                if (unmasked(i, j, k)) {
                    s.lo = std::min(s.lo, i);
                    s.hi = i;
                }
            seg1_[static_cast<std::size_t>(k) * n2 + j] = s;
        }
    for (int k = 0; k < n3; ++k)
        for (int i = 0; i < n1; ++i) {
            Segment s{n2, -1};
            for (int j = 0; j < n2; ++j)
                if (unmasked(i, j, k)) {
                    s.lo = std::min(s.lo, j);
                    s.hi = j;
                }
            seg2_[static_cast<std::size_t>(k) * n1 + i] = s;
        }
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            Segment s{n3, -1};
            for (int k = 0; k < n3; ++k)
                if (unmasked(i, j, k)) {
                    s.lo = std::min(s.lo, k);
                    s.hi = k;
                }
            seg3_[static_cast<std::size_t>(j) * n1 + i] = s;
        }
}

bool EtaGrid::contains(const CharCoords& e) const {
    return in_box(box, from_eta(e, params), tol);
}

bool EtaGrid::same_geometry(const EtaGrid& other) const {
    return n1 == other.n1 && n2 == other.n2 && n3 == other.n3 && box.a1 == other.box.a1 &&
           box.b1 == other.box.b1 && box.a2 == other.box.a2 && box.b2 == other.box.b2 &&
           box.T == other.box.T && params.c == other.params.c && params.S == other.params.S;
}

double EtaGrid::min_spacing() const { return std::min({h1, h2, h3}); }

EtaField::EtaField(EtaGridPtr grid) : grid_(std::move(grid)) {
    for (auto& v : n_) v.assign(grid_->size(), 0.0);
}

EtaField EtaField::zeros(EtaGridPtr grid) { return EtaField(std::move(grid)); }

EtaField EtaField::constant(EtaGridPtr grid, const Densities& n) {
    EtaField f(grid);
    const double vals[4] = {n.n1, n.n2, n.n3, n.n4};
    const EtaGrid& g = f.grid();
    for (int sp = 0; sp < 4; ++sp) {
        auto& arr = f.n_[sp];
        for (std::size_t idx = 0; idx < g.size(); ++idx)
            if (g.mask_data()[idx]) arr[idx] = vals[sp];
    }
    return f;
}

EtaField EtaField::from_function(EtaGridPtr grid,
                                 const std::function<double(int, const CharCoords&)>& fn,
                                 bool fill_masked) {
    EtaField f(grid);
    const EtaGrid& g = f.grid();
    for (int sp = 1; sp <= 4; ++sp)
        for (int k = 0; k < g.n3; ++k)
            for (int j = 0; j < g.n2; ++j)
                for (int i = 0; i < g.n1; ++i)
                    if (fill_masked || g.unmasked(i, j, k))
                        f.set(sp, i, j, k, fn(sp, g.node(i, j, k)));
    f.mask_active_ = !fill_masked;
    return f;
}

namespace {

struct AxisPos {
    int i0 = 0, i1 = 0;  // node pair (equal when snapped onto a node)
    double w = 0;        // weight of i1
};

// Snap within 1e-12 of a node so that grid images reproduce node values
// exactly despite to_eta/from_eta roundoff.
AxisPos locate(double x, double o, double h, int n) {
    double u = (x - o) / h;
    u = std::min(std::max(u, 0.0), static_cast<double>(n - 1));
    int i = static_cast<int>(u);
    if (i > n - 2) i = n - 2;
    double w = u - i;
    if (w < 1e-12) return {i, i, 0.0};
    if (w > 1.0 - 1e-12) return {i + 1, i + 1, 0.0};
    return {i, i + 1, w};
}

}  // namespace

double EtaField::interp(int species, const CharCoords& e) const {
    const EtaGrid& g = *grid_;
    const AxisPos p1 = locate(e.eta1, g.o1, g.h1, g.n1);
    const AxisPos p2 = locate(e.eta2, g.o2, g.h2, g.n2);
    const AxisPos p3 = locate(e.eta3, g.o3, g.h3, g.n3);
    const auto& arr = n_[species - 1];
    const std::uint8_t* mask = g.mask_data();
    const bool use_mask = mask_active_;

    double acc = 0.0, wsum = 0.0;
    for (int a = 0; a < 2; ++a) {
        const int i = a ? p1.i1 : p1.i0;
        const double wa = a ? p1.w : 1.0 - p1.w;
        if (wa == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
            const int j = b ? p2.i1 : p2.i0;
            const double wb = b ? p2.w : 1.0 - p2.w;
            if (wb == 0.0) continue;
            for (int cidx = 0; cidx < 2; ++cidx) {
                const int k = cidx ? p3.i1 : p3.i0;
                const double wc = cidx ? p3.w : 1.0 - p3.w;
                if (wc == 0.0) continue;
                const std::size_t idx = g.index(i, j, k);
                if (use_mask && !mask[idx]) continue;
                const double w = wa * wb * wc;
                acc += w * arr[idx];
                wsum += w;
            }
        }
    }
    if (wsum > 0.0) return acc / wsum;

    // Whole stencil masked: only happens in slivers near P' vertices on very
    // coarse grids. Take the nearest unmasked node.
    const int ci = p1.w < 0.5 ? p1.i0 : p1.i1;
    const int cj = p2.w < 0.5 ? p2.i0 : p2.i1;
    const int ck = p3.w < 0.5 ? p3.i0 : p3.i1;
    double best = std::numeric_limits<double>::infinity();
    double val = 0.0;
    bool found = false;
    const int rmax = std::max({g.n1, g.n2, g.n3});
    for (int r = 1; r < rmax; ++r) {
        for (int dk = -r; dk <= r; ++dk)
            for (int dj = -r; dj <= r; ++dj)
                for (int di = -r; di <= r; ++di) {
                    if (std::max({std::abs(di), std::abs(dj), std::abs(dk)}) != r) continue;
                    const int i = ci + di, j = cj + dj, k = ck + dk;
                    if (i < 0 || i >= g.n1 || j < 0 || j >= g.n2 || k < 0 || k >= g.n3) continue;
                    const std::size_t idx = g.index(i, j, k);
                    if (!mask[idx]) continue;
                    const double d1 = e.eta1 - g.g1(i), d2 = e.eta2 - g.g2(j),
                                 d3 = e.eta3 - g.g3(k);
                    const double d = d1 * d1 + d2 * d2 + d3 * d3;
                    if (d < best) {
                        best = d;
                        val = arr[idx];
                        found = true;
                    }
                }
        if (found && r >= 2) break;  // scan one extra shell beyond the first hit
    }
    if (!found) throw std::runtime_error("EtaField::interp: no unmasked node found");
    return val;
}

Densities EtaField::interp_all(const CharCoords& e) const {
    return {interp(1, e), interp(2, e), interp(3, e), interp(4, e)};
}

bool EtaField::interp_clean(const CharCoords& e) const {
    if (!mask_active_) return true;
    const EtaGrid& g = *grid_;
    const AxisPos p1 = locate(e.eta1, g.o1, g.h1, g.n1);
    const AxisPos p2 = locate(e.eta2, g.o2, g.h2, g.n2);
    const AxisPos p3 = locate(e.eta3, g.o3, g.h3, g.n3);
    const std::uint8_t* mask = g.mask_data();
    for (int a = 0; a < 2; ++a) {
        const double wa = a ? p1.w : 1.0 - p1.w;
        if (wa == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
            const double wb = b ? p2.w : 1.0 - p2.w;
            if (wb == 0.0) continue;
            for (int c = 0; c < 2; ++c) {
                const double wc = c ? p3.w : 1.0 - p3.w;
                if (wc == 0.0) continue;
                if (!mask[g.index(a ? p1.i1 : p1.i0, b ? p2.i1 : p2.i0, c ? p3.i1 : p3.i0)])
                    return false;
            }
        }
    }
    return true;
}

std::array<double, 3> EtaField::interp_gradient(int species, const CharCoords& e) const {
    const EtaGrid& g = *grid_;
    auto cell = [](double x, double o, double h, int n) {
        double u = (x - o) / h;
        u = std::min(std::max(u, 0.0), static_cast<double>(n - 1));
        int i = std::min(static_cast<int>(u), n - 2);
        return std::pair<int, double>(i, u - i);
    };
    const auto [i, w1] = cell(e.eta1, g.o1, g.h1, g.n1);
    const auto [j, w2] = cell(e.eta2, g.o2, g.h2, g.n2);
    const auto [k, w3] = cell(e.eta3, g.o3, g.h3, g.n3);

    bool full = true;
    double v[2][2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const std::size_t idx = g.index(i + a, j + b, k + c);
                full = full && (!mask_active_ || g.mask_data()[idx]);
                v[a][b][c] = n_[species - 1][idx];
            }
    if (full) {
        const double u1 = 1 - w1, u2 = 1 - w2, u3 = 1 - w3;
        const double d1 = ((v[1][0][0] - v[0][0][0]) * u2 * u3 +
                           (v[1][1][0] - v[0][1][0]) * w2 * u3 +
                           (v[1][0][1] - v[0][0][1]) * u2 * w3 +
                           (v[1][1][1] - v[0][1][1]) * w2 * w3) / g.h1;
        const double d2 = ((v[0][1][0] - v[0][0][0]) * u1 * u3 +
                           (v[1][1][0] - v[1][0][0]) * w1 * u3 +
                           (v[0][1][1] - v[0][0][1]) * u1 * w3 +
                           (v[1][1][1] - v[1][0][1]) * w1 * w3) / g.h2;
        const double d3 = ((v[0][0][1] - v[0][0][0]) * u1 * u2 +
                           (v[1][0][1] - v[1][0][0]) * w1 * u2 +
                           (v[0][1][1] - v[0][1][0]) * u1 * w2 +
                           (v[1][1][1] - v[1][1][0]) * w1 * w2) / g.h3;
        return {d1, d2, d3};
    }
    // Stencil straddles the P' boundary: fall back to small central
    // differences of the renormalized interpolant.
    std::array<double, 3> out{};
    const double steps[3] = {g.h1 * 1e-3, g.h2 * 1e-3, g.h3 * 1e-3};
    for (int axis = 0; axis < 3; ++axis) {
        CharCoords lo = e, hi = e;
        double* plo = axis == 0 ? &lo.eta1 : axis == 1 ? &lo.eta2 : &lo.eta3;
        double* phi = axis == 0 ? &hi.eta1 : axis == 1 ? &hi.eta2 : &hi.eta3;
        *plo -= steps[axis];
        *phi += steps[axis];
        out[axis] = (interp(species, hi) - interp(species, lo)) / (2.0 * steps[axis]);
    }
    return out;
}

double sup_distance(const EtaField& a, const EtaField& b) {
    if (a.grid_ptr().get() != b.grid_ptr().get() && !a.grid().same_geometry(b.grid()))
        throw std::invalid_argument("sup_distance: fields live on different grids");
    double m = 0.0;
    for (int sp = 1; sp <= 4; ++sp)
        m = std::max(m, kernels::ops().sup_abs_diff(a.values(sp).data(), b.values(sp).data(),
                                                    a.values(sp).size()));
    return m;
}

double sup_norm(const EtaField& a) {
    double m = 0.0;
    for (int sp = 1; sp <= 4; ++sp)
        m = std::max(m, kernels::ops().max_abs(a.values(sp).data(), a.values(sp).size()));
    return m;
}

double min_value(const EtaField& a) {
    const EtaGrid& g = a.grid();
    double m = std::numeric_limits<double>::infinity();
    for (int sp = 1; sp <= 4; ++sp) {
        const double* arr = a.values(sp).data();
        for (int k = 0; k < g.n3; ++k)
            for (int j = 0; j < g.n2; ++j) {
                const auto s = g.seg1(j, k);
                if (s.empty()) continue;
                m = std::min(m, kernels::ops().min_value(arr + g.index(s.lo, j, k),
                                                         static_cast<std::size_t>(s.hi - s.lo + 1)));
            }
    }
    return m;
}

}  // namespace broadwell

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "broadwell/characteristics.hpp"
#include "broadwell/model.hpp"
#include "broadwell/problem.hpp"

namespace broadwell {

// Uniform box grid over the bounding box of P' = F(space-time box); nodes
// whose preimage falls outside the box are masked. Because P' is convex, the
// unmasked nodes of every axis line form one contiguous segment; the tables
// below record them once so operator sweeps do not rescan the mask.
class EtaGrid {
public:
    EtaGrid(const SpaceTimeBox& box, const ModelParams& params, int n1, int n2, int n3);

    SpaceTimeBox box;
    ModelParams params;
    int n1, n2, n3;
    double o1, o2, o3;  // bounding-box origin in eta coordinates
    double h1, h2, h3;  // node spacings
    double tol;         // geometry tolerance for membership tests

    double g1(int i) const { return o1 + h1 * i; }
    double g2(int j) const { return o2 + h2 * j; }
    double g3(int k) const { return o3 + h3 * k; }
    CharCoords node(int i, int j, int k) const { return {g1(i), g2(j), g3(k)}; }

    std::size_t size() const { return static_cast<std::size_t>(n1) * n2 * n3; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n2 + j) * n1 + i;
    }
    bool unmasked(int i, int j, int k) const { return mask_[index(i, j, k)] != 0; }
    const std::uint8_t* mask_data() const { return mask_.data(); }
    std::size_t unmasked_count() const { return unmasked_count_; }

    bool contains(const CharCoords& e) const;
    bool same_geometry(const EtaGrid& other) const;

    struct Segment {
        int lo = 0, hi = -1;  // inclusive node range; empty when lo > hi
        bool empty() const { return lo > hi; }
    };
    // Unmasked range along eta1 at fixed (j,k), along eta2 at fixed (i,k),
    // along eta3 at fixed (i,j).
    Segment seg1(int j, int k) const { return seg1_[static_cast<std::size_t>(k) * n2 + j]; }
    Segment seg2(int i, int k) const { return seg2_[static_cast<std::size_t>(k) * n1 + i]; }
    Segment seg3(int i, int j) const { return seg3_[static_cast<std::size_t>(j) * n1 + i]; }

    double min_spacing() const;

private:
    std::vector<std::uint8_t> mask_;
    std::vector<Segment> seg1_, seg2_, seg3_;
    std::size_t unmasked_count_ = 0;
};

using EtaGridPtr = std::shared_ptr<const EtaGrid>;

// Four density grids over an EtaGrid. Masked entries stay zero and are never
// produced by the operator; interpolation drops masked stencil corners and
// renormalizes the remaining weights (values read along characteristics stay
// inside P', so at least one corner is always live).
class EtaField {
public:
    explicit EtaField(EtaGridPtr grid);

    static EtaField zeros(EtaGridPtr grid);
    static EtaField constant(EtaGridPtr grid, const Densities& n);
    // Sample an analytic function; fill_masked extends it to the whole
    // bounding box (useful for test fields with exact interpolation).
    static EtaField from_function(EtaGridPtr grid,
                                  const std::function<double(int, const CharCoords&)>& fn,
                                  bool fill_masked = false);

    const EtaGrid& grid() const { return *grid_; }
    EtaGridPtr grid_ptr() const { return grid_; }

    double at(int species, int i, int j, int k) const {
        return n_[species - 1][grid_->index(i, j, k)];
    }
    void set(int species, int i, int j, int k, double v) {
        n_[species - 1][grid_->index(i, j, k)] = v;
    }
    const std::vector<double>& values(int species) const { return n_[species - 1]; }
    std::vector<double>& values(int species) { return n_[species - 1]; }

    /// Trilinear interpolation at an arbitrary point of P'.
    double interp(int species, const CharCoords& e) const;
    Densities interp_all(const CharCoords& e) const;

    /// True when every corner the stencil at e actually weights is unmasked,
    /// i.e. interpolation there is full-order. Boundary cells fail this and
    /// fall back to renormalized weights inside interp().
    bool interp_clean(const CharCoords& e) const;

    /// Gradient of the interpolant in eta coordinates (constant per cell in
    /// each direction); used by the chain-rule derivative sampler.
    std::array<double, 3> interp_gradient(int species, const CharCoords& e) const;

    /// False when every bounding-box node carries a meaningful value (fields
    /// built by from_function with fill_masked); interpolation then uses full
    /// stencils everywhere.
    bool mask_active() const { return mask_active_; }

private:
    EtaGridPtr grid_;
    std::array<std::vector<double>, 4> n_;
    bool mask_active_ = true;
};

/// max over species and nodes of |A - B|. Grids must match.
double sup_distance(const EtaField& a, const EtaField& b);
/// max over species and nodes of |A|.
double sup_norm(const EtaField& a);
/// min over species and unmasked nodes.
double min_value(const EtaField& a);

}  // namespace broadwell

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "broadwell/solver.hpp"

namespace broadwell {

// Line-oriented "key: value" report, machine-greppable.
class Summary {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, long long value);
    void write(const std::string& path) const;
    std::string to_string() const;

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

/// One time slice of all four species on a physical lattice:
/// "t,x,y,n1,n2,n3,n4", one row per grid point, 17 significant digits.
void write_slice_csv(const std::string& path, const Solution& sol, double t, int nx, int ny);

/// Per-species slice in the loadable field format (alpha=x, beta=y).
void write_species_slice_csv(const std::string& path, const Solution& sol, int species,
                             double t, int nx, int ny);

/// Moments (rho, u, v) on the same lattice: "t,x,y,rho,u,v".
void write_moments_csv(const std::string& path, const Solution& sol, double t, int nx, int ny);

}  // namespace broadwell

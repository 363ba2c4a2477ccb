#include "broadwell/output.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace broadwell {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::FILE* open_or_throw(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    return f;
}

}  // namespace

void Summary::add(const std::string& key, const std::string& value) {
    rows_.emplace_back(key, value);
}
void Summary::add(const std::string& key, double value) { rows_.emplace_back(key, fmt_double(value)); }
void Summary::add(const std::string& key, long long value) {
    rows_.emplace_back(key, std::to_string(value));
}

std::string Summary::to_string() const {
    std::ostringstream os;
    for (const auto& [k, v] : rows_) os << k << ": " << v << "\n";
    return os.str();
}

void Summary::write(const std::string& path) const {
    std::FILE* f = open_or_throw(path);
    const std::string s = to_string();
    std::fwrite(s.data(), 1, s.size(), f);
    std::fclose(f);
}

void write_slice_csv(const std::string& path, const Solution& sol, double t, int nx, int ny) {
    const SpaceTimeBox& b = sol.data().box;
    std::FILE* f = open_or_throw(path);
    std::fprintf(f, "t,x,y,n1,n2,n3,n4\n");
    for (int i = 0; i < nx; ++i) {
        const double x = b.a1 + (b.b1 - b.a1) * i / (nx - 1);
        for (int j = 0; j < ny; ++j) {
            const double y = b.a2 + (b.b2 - b.a2) * j / (ny - 1);
            const Densities d = sol.sample(t, x, y);
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, x, y, d.n1, d.n2,
                         d.n3, d.n4);
        }
    }
    std::fclose(f);
}

void write_species_slice_csv(const std::string& path, const Solution& sol, int species,
                             double t, int nx, int ny) {
    const SpaceTimeBox& b = sol.data().box;
    std::FILE* f = open_or_throw(path);
    std::fprintf(f, "alpha,beta,value\n");
    for (int i = 0; i < nx; ++i) {
        const double x = b.a1 + (b.b1 - b.a1) * i / (nx - 1);
        for (int j = 0; j < ny; ++j) {
            const double y = b.a2 + (b.b2 - b.a2) * j / (ny - 1);
            std::fprintf(f, "%.17g,%.17g,%.17g\n", x, y, sol.sample_species(species, t, x, y));
        }
    }
    std::fclose(f);
}

void write_moments_csv(const std::string& path, const Solution& sol, double t, int nx, int ny) {
    const SpaceTimeBox& b = sol.data().box;
    const ModelParams& mp = sol.data().params;
    std::FILE* f = open_or_throw(path);
    std::fprintf(f, "t,x,y,rho,u,v\n");
    for (int i = 0; i < nx; ++i) {
        const double x = b.a1 + (b.b1 - b.a1) * i / (nx - 1);
        for (int j = 0; j < ny; ++j) {
            const double y = b.a2 + (b.b2 - b.a2) * j / (ny - 1);
            const Densities d = sol.sample(t, x, y);
            const double rho = d.n1 + d.n2 + d.n3 + d.n4;
            double u = 0, v = 0;
            if (rho != 0.0) {
                const Moments m = moments(d, mp);
                u = m.u;
                v = m.v;
            }
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, x, y, rho, u, v);
        }
    }
    std::fclose(f);
}

}  // namespace broadwell

#include "broadwell/data_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace broadwell {

namespace {

constexpr double kPi = 3.141592653589793;

void check_rect(const Rect& r) {
    if (!(r.alo < r.ahi) || !(r.blo < r.bhi))
        throw std::invalid_argument("DataField: degenerate domain rectangle");
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// C^2 compactly supported profile and its derivative.
double pbump(double u) {
    const double w = 1.0 - u * u;
    return w > 0.0 ? w * w * w : 0.0;
}
double dpbump(double u) {
    const double w = 1.0 - u * u;
    return w > 0.0 ? -6.0 * u * w * w : 0.0;
}

std::vector<double> sample_fn(const Rect& r, const DataField::Fn& fn, int n) {
    std::vector<double> v(static_cast<size_t>(n) * n);
    for (int ia = 0; ia < n; ++ia) {
        const double a = r.alo + r.len_a() * ia / (n - 1);
        for (int ib = 0; ib < n; ++ib) {
            const double b = r.blo + r.len_b() * ib / (n - 1);
            v[static_cast<size_t>(ia) * n + ib] = fn(a, b);
        }
    }
    return v;
}

}  // namespace

DataField DataField::from_samples(const Rect& r, int na, int nb, std::vector<double> values) {
    check_rect(r);
    if (na < 2 || nb < 2)
        throw std::invalid_argument("DataField: need at least 2 samples per axis");
    if (values.size() != static_cast<size_t>(na) * nb)
        throw std::invalid_argument("DataField: sample count does not match grid");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("DataField: non-finite sample");
    DataField f;
    f.rect_ = r;
    f.na_ = na;
    f.nb_ = nb;
    f.samples_ = std::move(values);
    return f;
}

DataField DataField::analytic(const Rect& r, Fn value, Fn da, Fn db, int samples) {
    check_rect(r);
    if (samples < 2) throw std::invalid_argument("DataField: need at least 2 samples per axis");
    DataField f;
    f.rect_ = r;
    f.na_ = f.nb_ = samples;
    f.samples_ = sample_fn(r, value, samples);
    f.fn_ = std::move(value);
    f.da_ = std::move(da);
    f.db_ = std::move(db);
    return f;
}

DataField DataField::constant(const Rect& r, double value) {
    return analytic(
        r, [value](double, double) { return value; }, [](double, double) { return 0.0; },
        [](double, double) { return 0.0; }, 2);
}

DataField DataField::sinusoid(const Rect& r, double base, double amp, int mode_a, int mode_b,
                              int samples) {
    check_rect(r);
    if (mode_a < 1 || mode_b < 1)
        throw std::invalid_argument("DataField::sinusoid: modes must be >= 1");
    const double ka = kPi * mode_a / r.len_a();
    const double kb = kPi * mode_b / r.len_b();
    const double alo = r.alo, blo = r.blo;
    return analytic(
        r,
        [=](double a, double b) {
            return base * (1.0 + amp * std::sin(ka * (a - alo)) * std::sin(kb * (b - blo)));
        },
        [=](double a, double b) {
            return base * amp * ka * std::cos(ka * (a - alo)) * std::sin(kb * (b - blo));
        },
        [=](double a, double b) {
            return base * amp * kb * std::sin(ka * (a - alo)) * std::cos(kb * (b - blo));
        },
        samples);
}

DataField DataField::bump(const Rect& r, double base, double amp, double ca, double cb,
                          double wa, double wb, int samples) {
    check_rect(r);
    if (!(wa > 0.0) || !(wb > 0.0))
        throw std::invalid_argument("DataField::bump: widths must be > 0");
    return analytic(
        r,
        [=](double a, double b) {
            return base + amp * pbump((a - ca) / wa) * pbump((b - cb) / wb);
        },
        [=](double a, double b) {
            return amp / wa * dpbump((a - ca) / wa) * pbump((b - cb) / wb);
        },
        [=](double a, double b) {
            return amp / wb * pbump((a - ca) / wa) * dpbump((b - cb) / wb);
        },
        samples);
}

DataField DataField::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("DataField: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("DataField: '" + path + "' is empty");
    // Tolerate whitespace and \r in the header.
    std::string header;
    for (char ch : line)
        if (!std::isspace(static_cast<unsigned char>(ch))) header += ch;
    if (header != "alpha,beta,value")
        throw std::runtime_error("DataField: '" + path + "' missing 'alpha,beta,value' header");

    std::vector<double> as, bs, vs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ss(line);
        double a, b, v;
        char c1, c2;
        if (!(ss >> a >> c1 >> b >> c2 >> v) || c1 != ',' || c2 != ',')
            throw std::runtime_error("DataField: " + path + ":" + std::to_string(lineno) +
                                     ": malformed row");
        as.push_back(a);
        bs.push_back(b);
        vs.push_back(v);
    }
    if (vs.size() < 4) throw std::runtime_error("DataField: '" + path + "' has too few rows");

    auto axis_values = [](std::vector<double> x) {
        std::sort(x.begin(), x.end());
        const double span = std::max(x.back() - x.front(), 1e-300);
        std::vector<double> out{x.front()};
        for (double v : x)
            if (v > out.back() + 1e-9 * span) out.push_back(v);
        return out;
    };
    const std::vector<double> ga = axis_values(as);
    const std::vector<double> gb = axis_values(bs);
    const int na = static_cast<int>(ga.size());
    const int nb = static_cast<int>(gb.size());
    if (na < 2 || nb < 2 || vs.size() != static_cast<size_t>(na) * nb)
        throw std::runtime_error("DataField: '" + path + "' rows do not form a full grid");
    // Uniform spacing check.
    for (const auto* g : {&ga, &gb}) {
        const double h = ((*g).back() - (*g).front()) / (g->size() - 1);
        for (size_t i = 0; i < g->size(); ++i)
            if (std::fabs((*g)[i] - ((*g).front() + h * i)) > 1e-6 * std::max(1.0, std::fabs(h) * g->size()))
                throw std::runtime_error("DataField: '" + path + "' grid is not uniform");
    }

    const Rect r{ga.front(), ga.back(), gb.front(), gb.back()};
    std::vector<double> grid(static_cast<size_t>(na) * nb,
                             std::numeric_limits<double>::quiet_NaN());
    const double ha = r.len_a() / (na - 1), hb = r.len_b() / (nb - 1);
    for (size_t k = 0; k < vs.size(); ++k) {
        const int ia = static_cast<int>(std::lround((as[k] - r.alo) / ha));
        const int ib = static_cast<int>(std::lround((bs[k] - r.blo) / hb));
        grid[static_cast<size_t>(ia) * nb + ib] = vs[k];
    }
    for (double v : grid)
        if (std::isnan(v))
            throw std::runtime_error("DataField: '" + path + "' grid has missing nodes");
    return from_samples(r, na, nb, std::move(grid));
}

double DataField::value(double a, double b) const {
    if (fn_) return fn_(a, b);
    // Bilinear interpolation; arguments clamped to the rectangle (callers
    // guarantee feet land inside up to roundoff).
    const double ha = rect_.len_a() / (na_ - 1), hb = rect_.len_b() / (nb_ - 1);
    double ua = clamp((a - rect_.alo) / ha, 0.0, static_cast<double>(na_ - 1));
    double ub = clamp((b - rect_.blo) / hb, 0.0, static_cast<double>(nb_ - 1));
    int ia = std::min(static_cast<int>(ua), na_ - 2);
    int ib = std::min(static_cast<int>(ub), nb_ - 2);
    const double wa = ua - ia, wb = ub - ib;
    const double v00 = sample(ia, ib), v01 = sample(ia, ib + 1);
    const double v10 = sample(ia + 1, ib), v11 = sample(ia + 1, ib + 1);
    return (1.0 - wa) * ((1.0 - wb) * v00 + wb * v01) + wa * ((1.0 - wb) * v10 + wb * v11);
}

double DataField::node_a(int ia) const { return rect_.alo + rect_.len_a() * ia / (na_ - 1); }
double DataField::node_b(int ib) const { return rect_.blo + rect_.len_b() * ib / (nb_ - 1); }

double DataField::node_deriv_a(int ia, int ib) const {
    if (da_) return da_(node_a(ia), node_b(ib));
    if (na_ < 3)
        throw std::runtime_error("DataField: derivative norm needs analytic derivatives or >= 3 samples per axis");
    const double h = rect_.len_a() / (na_ - 1);
    if (ia == 0) return (sample(1, ib) - sample(0, ib)) / h;
    if (ia == na_ - 1) return (sample(na_ - 1, ib) - sample(na_ - 2, ib)) / h;
    return (sample(ia + 1, ib) - sample(ia - 1, ib)) / (2.0 * h);
}

double DataField::node_deriv_b(int ia, int ib) const {
    if (db_) return db_(node_a(ia), node_b(ib));
    if (nb_ < 3)
        throw std::runtime_error("DataField: derivative norm needs analytic derivatives or >= 3 samples per axis");
    const double h = rect_.len_b() / (nb_ - 1);
    if (ib == 0) return (sample(ia, 1) - sample(ia, 0)) / h;
    if (ib == nb_ - 1) return (sample(ia, nb_ - 1) - sample(ia, nb_ - 2)) / h;
    return (sample(ia, ib + 1) - sample(ia, ib - 1)) / (2.0 * h);
}

double DataField::min_sample() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : samples_) m = std::min(m, v);
    return m;
}

void write_field_csv(const std::string& path, const DataField& f) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    std::fprintf(out, "alpha,beta,value\n");
    for (int ia = 0; ia < f.samples_a(); ++ia)
        for (int ib = 0; ib < f.samples_b(); ++ib)
            std::fprintf(out, "%.17g,%.17g,%.17g\n", f.node_a(ia), f.node_b(ib), f.sample(ia, ib));
    std::fclose(out);
}

}  // namespace broadwell

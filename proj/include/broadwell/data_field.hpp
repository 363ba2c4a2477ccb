#pragma once

#include <functional>
#include <string>
#include <vector>

namespace broadwell {

struct Rect {
    double alo = 0, ahi = 1, blo = 0, bhi = 1;
    double len_a() const { return ahi - alo; }
    double len_b() const { return bhi - blo; }
};

// A scalar function of two variables, sampled on a uniform grid over a
// rectangle with bilinear interpolation between nodes. The built-in families
// additionally carry exact value/derivative closures, so gate norms computed
// from them are not polluted by interpolation error. Differentiated norms of
// pure sample data fall back to grid differences (central inside, one-sided
// at the edges).
class DataField {
public:
    using Fn = std::function<double(double, double)>;

    DataField() = default;

    static DataField from_samples(const Rect& r, int na, int nb, std::vector<double> values);
    static DataField analytic(const Rect& r, Fn value, Fn da, Fn db, int samples = 65);

    static DataField constant(const Rect& r, double value);
    // base * (1 + amp * sin(pi*ma*(a-alo)/La) * sin(pi*mb*(b-blo)/Lb));
    // integer modes make every edge trace identically equal to base.
    static DataField sinusoid(const Rect& r, double base, double amp, int mode_a, int mode_b,
                              int samples = 65);
    // base + amp * g((a-ca)/wa) * g((b-cb)/wb) with g(u) = (1-u^2)^3 on |u|<1,
    // 0 outside: a C^2 bump with compact support.
    static DataField bump(const Rect& r, double base, double amp, double ca, double cb,
                          double wa, double wb, int samples = 65);

    // Header "alpha,beta,value", one row per node, row-major over a uniform grid.
    static DataField load_csv(const std::string& path);

    double value(double a, double b) const;

    const Rect& rect() const { return rect_; }
    int samples_a() const { return na_; }
    int samples_b() const { return nb_; }
    double node_a(int ia) const;
    double node_b(int ib) const;
    double sample(int ia, int ib) const { return samples_[static_cast<size_t>(ia) * nb_ + ib]; }

    bool has_analytic_derivatives() const { return static_cast<bool>(da_); }
    // Partial derivatives at a grid node: the analytic closure when present,
    // grid differences otherwise (requires >= 3 samples on that axis).
    double node_deriv_a(int ia, int ib) const;
    double node_deriv_b(int ia, int ib) const;

    double min_sample() const;
    bool nonnegative() const { return min_sample() >= 0.0; }

private:
    Rect rect_{};
    int na_ = 0, nb_ = 0;
    std::vector<double> samples_;
    Fn fn_, da_, db_;
};

void write_field_csv(const std::string& path, const DataField& f);

}  // namespace broadwell

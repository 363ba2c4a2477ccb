#include "broadwell/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace broadwell {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class KeyMap {
public:
    KeyMap(std::string path, std::map<std::string, Entry> entries)
        : path_(std::move(path)), entries_(std::move(entries)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const auto it = entries_.find(key);
        const int line = it != entries_.end() ? it->second.line : 0;
        throw ConfigError(path_ + ":" + std::to_string(line) + ": " + key + ": " + msg);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& def) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return def;
        it->second.used = true;
        return it->second.value;
    }

    std::string require_string(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end())
            throw ConfigError(path_ + ":0: missing required key '" + key + "'");
        it->second.used = true;
        return it->second.value;
    }

    double get_double(const std::string& key, double def) {
        if (!has(key)) return def;
        return parse_double(key, get_string(key, ""));
    }

    double require_double(const std::string& key) {
        return parse_double(key, require_string(key));
    }

    int get_int(const std::string& key, int def) {
        if (!has(key)) return def;
        const std::string v = get_string(key, "");
        try {
            size_t pos = 0;
            const int r = std::stoi(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return r;
        } catch (...) {
            fail(key, "expected an integer, got '" + v + "'");
        }
    }

    bool get_bool(const std::string& key, bool def) {
        if (!has(key)) return def;
        const std::string v = get_string(key, "");
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        fail(key, "expected a boolean, got '" + v + "'");
    }

    void check_all_used() const {
        for (const auto& [key, e] : entries_)
            if (!e.used)
                throw ConfigError(path_ + ":" + std::to_string(e.line) + ": unknown key '" +
                                  key + "'");
    }

    const std::string& path() const { return path_; }

private:
    double parse_double(const std::string& key, const std::string& v) {
        try {
            size_t pos = 0;
            const double r = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return r;
        } catch (...) {
            fail(key, "expected a number, got '" + v + "'");
        }
    }

    std::string path_;
    std::map<std::string, Entry> entries_;
};

KeyMap parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ":0: cannot open file");
    std::map<std::string, Entry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto pos = s.find('=');
        if (pos == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(s.substr(0, pos));
        const std::string value = trim(s.substr(pos + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        if (entries.count(key))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
        entries[key] = {value, lineno, false};
    }
    return KeyMap(path, std::move(entries));
}

DataField build_field(KeyMap& km, const std::string& prefix, const Rect& rect) {
    const std::string kind = km.get_string(prefix + ".kind", "constant");
    const int samples = km.get_int(prefix + ".samples", 65);
    if (kind == "constant") {
        const double v = km.get_double(prefix + ".value", 0.0);
        if (v < 0.0) km.fail(prefix + ".value", "must be nonnegative");
        return DataField::constant(rect, v);
    }
    if (kind == "sinusoid") {
        const double base = km.require_double(prefix + ".base");
        const double amp = km.get_double(prefix + ".amp", 0.5);
        const int ma = km.get_int(prefix + ".mode_a", 1);
        const int mb = km.get_int(prefix + ".mode_b", 1);
        if (base < 0.0) km.fail(prefix + ".base", "must be nonnegative");
        if (std::fabs(amp) > 1.0)
            km.fail(prefix + ".amp", "|amp| <= 1 keeps the field nonnegative");
        return DataField::sinusoid(rect, base, amp, ma, mb, samples);
    }
    if (kind == "bump") {
        const double base = km.require_double(prefix + ".base");
        const double amp = km.get_double(prefix + ".amp", 0.5 * std::max(base, 1e-300));
        const double ca = km.get_double(prefix + ".center_a", 0.5 * (rect.alo + rect.ahi));
        const double cb = km.get_double(prefix + ".center_b", 0.5 * (rect.blo + rect.bhi));
        const double wa = km.get_double(prefix + ".width_a", 0.25 * rect.len_a());
        const double wb = km.get_double(prefix + ".width_b", 0.25 * rect.len_b());
        if (base < 0.0) km.fail(prefix + ".base", "must be nonnegative");
        if (base + std::min(amp, 0.0) < 0.0)
            km.fail(prefix + ".amp", "base + min(amp,0) must stay nonnegative");
        return DataField::bump(rect, base, amp, ca, cb, wa, wb, samples);
    }
    if (kind == "csv") {
        const std::string p = km.require_string(prefix + ".path");
        try {
            return DataField::load_csv(p);
        } catch (const std::exception& e) {
            km.fail(prefix + ".path", e.what());
        }
    }
    km.fail(prefix + ".kind", "expected constant|sinusoid|bump|csv, got '" + kind + "'");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    KeyMap km = parse_file(path);
    RunConfig rc;

    rc.problem.box.a1 = km.get_double("problem.a1", 0.0);
    rc.problem.box.b1 = km.get_double("problem.b1", 1.0);
    rc.problem.box.a2 = km.get_double("problem.a2", 0.0);
    rc.problem.box.b2 = km.get_double("problem.b2", 1.0);
    rc.problem.box.T = km.get_double("problem.T", 1.0);
    rc.problem.params.c = km.get_double("problem.c", 1.0);
    rc.problem.params.S = km.get_double("problem.S", 1.0);
    rc.problem.params.theta = 0.0;
    rc.problem.compat_tol = km.get_double("problem.compat_tol", 1e-9);
    try {
        rc.problem.box.validate();
        rc.problem.params.validate();
    } catch (const std::exception& e) {
        throw ConfigError(path + ":0: " + e.what());
    }

    const Rect spatial{rc.problem.box.a1, rc.problem.box.b1, rc.problem.box.a2,
                       rc.problem.box.b2};
    const Rect ty{0.0, rc.problem.box.T, rc.problem.box.a2, rc.problem.box.b2};
    const Rect tx{0.0, rc.problem.box.T, rc.problem.box.a1, rc.problem.box.b1};
    for (int s = 0; s < 4; ++s)
        rc.problem.init[s] = build_field(km, "problem.init" + std::to_string(s + 1), spatial);
    rc.problem.inflow[0] = build_field(km, "problem.inflow1", ty);
    rc.problem.inflow[1] = build_field(km, "problem.inflow2", tx);
    rc.problem.inflow[2] = build_field(km, "problem.inflow3", tx);
    rc.problem.inflow[3] = build_field(km, "problem.inflow4", ty);

    rc.solver.n1 = km.get_int("solver.grid.n1", 33);
    rc.solver.n2 = km.get_int("solver.grid.n2", 33);
    rc.solver.n3 = km.get_int("solver.grid.n3", 33);
    rc.solver.max_iters = km.get_int("solver.max_iters", 200);
    rc.solver.abs_tol = km.get_double("solver.abs_tol", 1e-9);
    rc.solver.use_sigma = km.get_bool("solver.sigma.enabled", false);
    rc.solver.sigma = km.get_double("solver.sigma.value", 0.0);
    const std::string guess = km.get_string("solver.guess", "freestream");
    if (guess == "zero")
        rc.solver.guess = InitialGuess::Zero;
    else if (guess == "freestream" || guess == "free_streaming")
        rc.solver.guess = InitialGuess::FreeStreaming;
    else if (guess == "constant")
        rc.solver.guess = InitialGuess::Constant;
    else
        km.fail("solver.guess", "expected zero|freestream|constant, got '" + guess + "'");
    rc.solver.guess_value = km.get_double("solver.guess.value", 0.0);
    const std::string rule = km.get_string("solver.quad.rule", "trapezoid");
    if (rule == "trapezoid")
        rc.solver.quad.rule = QuadratureRule::Trapezoid;
    else if (rule == "simpson")
        rc.solver.quad.rule = QuadratureRule::Simpson;
    else
        km.fail("solver.quad.rule", "expected trapezoid|simpson, got '" + rule + "'");
    rc.solver.quad.max_step = km.get_double("solver.quad.max_step", 0.0);
    rc.solver.quad.threads = km.get_int("solver.threads", 0);

    rc.oracle.nx = km.get_int("oracle.nx", 64);
    rc.oracle.ny = km.get_int("oracle.ny", 64);
    rc.oracle.nt = km.get_int("oracle.nt", 64);
    rc.oracle_rel_tol = km.get_double("oracle.rel_tol", 0.05);

    rc.output_dir = km.get_string("output.dir", "out");
    rc.output_nx = km.get_int("output.nx", 33);
    rc.output_ny = km.get_int("output.ny", 33);
    rc.output_moments = km.get_bool("output.moments", false);

    km.check_all_used();

    const auto issues = validate_problem(rc.problem);
    if (!issues.empty()) {
        std::ostringstream os;
        os << path << ":0: invalid problem data:";
        for (const auto& s : issues) os << "\n  - " << s;
        throw ConfigError(os.str());
    }
    return rc;
}

}  // namespace broadwell

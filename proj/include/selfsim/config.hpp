#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "selfsim/errors.hpp"
#include "selfsim/exponents.hpp"

namespace selfsim {

/// Run-wide settings shared by every CLI command. The file format is one
/// `key = value` per line with `#` comments; command-line flags override
/// whatever the file says, and validate() runs after both.
struct RunConfig {
    int dimension = 1;
    double integrator_rtol = 1e-12;
    double integrator_atol = 1e-14;
    double event_tol = 1e-13;
    double alpha_tol = 1e-10;   ///< bisection width target on matched exponents
    double matching_tol = 1e-9; ///< accepted |s - stilde| at a matched exponent
    double horizon = 0.0;       ///< 0 = per-dimension default
    int zero_budget = 16;       ///< zeros tracked per shot
    int spectral_points = 10000;
    double pde_step = 0.0025;
    int workers = 1;
    std::string output_dir = ".";

    void validate() const {
        if (dimension < 1)
            throw ConfigError("config: dimension must be >= 1");
        const struct { const char* name; double v; } tols[] = {
            {"integrator_rtol", integrator_rtol},
            {"integrator_atol", integrator_atol},
            {"event_tol", event_tol},
            {"alpha_tol", alpha_tol},
            {"matching_tol", matching_tol},
        };
        for (const auto& t : tols)
            if (!(t.v > 0.0))
                throw ConfigError(std::string("config: ") + t.name +
                                  " must be > 0");
        if (horizon < 0.0)
            throw ConfigError("config: horizon must be >= 0 (0 = default)");
        if (zero_budget < 1)
            throw ConfigError("config: zero_budget must be >= 1");
        if (spectral_points < 100)
            throw ConfigError("config: spectral_points must be >= 100");
        if (!(pde_step > 0.0))
            throw ConfigError("config: pde_step must be > 0");
        if (workers < 1)
            throw ConfigError("config: workers must be >= 1");
    }

    ShotOptions shot() const {
        ShotOptions o;
        o.horizon = horizon;
        o.max_zeros = zero_budget;
        o.ode.rtol = integrator_rtol;
        o.ode.atol = integrator_atol;
        o.ode.event_tol = event_tol;
        return o;
    }

    ExponentOptions exponents() const {
        ExponentOptions e;
        e.alpha_tol = alpha_tol;
        e.residual_tol = matching_tol;
        e.shot = shot();
        return e;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double config_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" +
                          value + "'");
    }
    if (used != value.size())
        throw ConfigError("config: trailing characters after " + key + ": '" +
                          value + "'");
    return v;
}

inline int config_int(const std::string& key, const std::string& value) {
    const double v = config_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config: " + key + " must be an integer, got '" +
                          value + "'");
    return i;
}

} // namespace detail

/// Parses `key = value` lines into `base`. Unknown keys are rejected rather
/// than ignored: a typo that silently falls back to a default would defeat
/// the point of a reproducible run.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not key = value: '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: empty key or value on line " +
                              std::to_string(lineno));

        if (key == "dimension") base.dimension = detail::config_int(key, value);
        else if (key == "integrator_rtol") base.integrator_rtol = detail::config_double(key, value);
        else if (key == "integrator_atol") base.integrator_atol = detail::config_double(key, value);
        else if (key == "event_tol") base.event_tol = detail::config_double(key, value);
        else if (key == "alpha_tol") base.alpha_tol = detail::config_double(key, value);
        else if (key == "matching_tol") base.matching_tol = detail::config_double(key, value);
        else if (key == "horizon") base.horizon = detail::config_double(key, value);
        else if (key == "zero_budget") base.zero_budget = detail::config_int(key, value);
        else if (key == "spectral_points") base.spectral_points = detail::config_int(key, value);
        else if (key == "pde_step") base.pde_step = detail::config_double(key, value);
        else if (key == "workers") base.workers = detail::config_int(key, value);
        else if (key == "output_dir") base.output_dir = value;
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    return base;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in, std::move(base));
}

} // namespace selfsim

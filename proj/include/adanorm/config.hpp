#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adanorm/problems.hpp"

namespace adanorm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat dotted-key experiment description. Every run of the pipeline is fully
// determined by one of these plus nothing else: all randomness derives from
// run.base_seed.
struct ExperimentConfig {
    std::string objective_name = "quadratic";
    int d = 16;
    double a_min = 1.0;
    double a_max = 1.0;
    std::string a_spacing = "linear";
    double epsilon = 0.1;
    std::string w1_mode = "ones";
    double w1_scale = 1.0;

    std::string noise_family = "gaussian";
    double sigma0 = 0.0;
    double sigma1 = 0.0;

    std::string optimizer_name = "adagrad_norm";
    double eta = 1.0;
    double b0 = 1.0;
    double d_tilde = 1.0;

    std::vector<std::int64_t> horizons = {1024, 2048, 4096, 8192, 16384, 32768, 65536};
    int seeds = 50;
    std::uint64_t base_seed = 1;

    std::int64_t bias_every = -1;  // -1 auto, 0 off, k >= 1 every k-th step
    int bias_samples = 256;
};

namespace detail {

inline std::string trim(std::string s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double cfg_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs a number, got '" + v + "'");
    }
}

inline std::int64_t cfg_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs an integer, got '" + v + "'");
    }
}

inline std::uint64_t cfg_uint(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs an unsigned integer, got '" + v + "'");
    }
}

inline std::vector<std::int64_t> cfg_int_list(const std::string& key, const std::string& v) {
    std::vector<std::int64_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config key '" + key + "' has an empty list item");
        out.push_back(cfg_int(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' needs a non-empty list");
    return out;
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (c.objective_name != "quadratic" && c.objective_name != "loghump" &&
        c.objective_name != "shifted_quartic_smoothed")
        fail("unknown objective.name '" + c.objective_name + "'");
    if (c.d < 1) fail("objective.d must be >= 1");
    if (!(c.a_min > 0) || !(c.a_max >= c.a_min))
        fail("objective.a_min/a_max must satisfy 0 < a_min <= a_max");
    if (c.a_spacing != "linear" && c.a_spacing != "log")
        fail("objective.a_spacing must be linear or log");
    if (c.epsilon < 0) fail("objective.epsilon must be >= 0");
    if (c.w1_mode != "ones" && c.w1_mode != "e1" && c.w1_mode != "inv_sqrt_a")
        fail("objective.w1_mode must be ones, e1, or inv_sqrt_a");
    if (c.w1_mode == "inv_sqrt_a" && c.objective_name != "quadratic")
        fail("objective.w1_mode inv_sqrt_a applies to the quadratic objective only");
    if (c.noise_family != "gaussian" && c.noise_family != "bounded")
        fail("noise.family must be gaussian or bounded");
    if (c.sigma0 < 0 || c.sigma1 < 0) fail("noise levels must be >= 0");
    if (c.optimizer_name != "adagrad_norm" && c.optimizer_name != "coordinate_adagrad" &&
        c.optimizer_name != "tuned_sgd" && c.optimizer_name != "gd" &&
        c.optimizer_name != "adagrad_norm_overstep")
        fail("unknown optimizer.name '" + c.optimizer_name + "'");
    if (!(c.eta > 0)) fail("optimizer.eta must be > 0");
    if (!(c.b0 > 0)) fail("optimizer.b0 must be > 0 (a zero floor is rejected)");
    if (!(c.d_tilde > 0)) fail("optimizer.d_tilde must be > 0");
    if (c.horizons.empty()) fail("run.horizons must be non-empty");
    for (std::size_t i = 0; i < c.horizons.size(); ++i) {
        if (c.horizons[i] < 0) fail("run.horizons entries must be >= 0");
        if (i > 0 && c.horizons[i] <= c.horizons[i - 1])
            fail("run.horizons must be strictly ascending");
    }
    if (c.seeds < 1) fail("run.seeds must be >= 1");
    if (c.bias_every < -1) fail("instrument.bias_every must be auto, off, or a stride >= 1");
    if (c.bias_samples < 2) fail("instrument.bias_samples must be >= 2");
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              " is not 'key = value': '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + " has an empty key or value");

        if (key == "objective.name") c.objective_name = value;
        else if (key == "objective.d") c.d = static_cast<int>(detail::cfg_int(key, value));
        else if (key == "objective.a_min") c.a_min = detail::cfg_double(key, value);
        else if (key == "objective.a_max") c.a_max = detail::cfg_double(key, value);
        else if (key == "objective.a_spacing") c.a_spacing = value;
        else if (key == "objective.epsilon") c.epsilon = detail::cfg_double(key, value);
        else if (key == "objective.w1_mode") c.w1_mode = value;
        else if (key == "objective.w1_scale") c.w1_scale = detail::cfg_double(key, value);
        else if (key == "noise.family") c.noise_family = value;
        else if (key == "noise.sigma0") c.sigma0 = detail::cfg_double(key, value);
        else if (key == "noise.sigma1") c.sigma1 = detail::cfg_double(key, value);
        else if (key == "optimizer.name") c.optimizer_name = value;
        else if (key == "optimizer.eta") c.eta = detail::cfg_double(key, value);
        else if (key == "optimizer.b0") c.b0 = detail::cfg_double(key, value);
        else if (key == "optimizer.d_tilde") c.d_tilde = detail::cfg_double(key, value);
        else if (key == "run.horizons") c.horizons = detail::cfg_int_list(key, value);
        else if (key == "run.seeds") c.seeds = static_cast<int>(detail::cfg_int(key, value));
        else if (key == "run.base_seed") c.base_seed = detail::cfg_uint(key, value);
        else if (key == "instrument.bias_every") {
            if (value == "auto") c.bias_every = -1;
            else if (value == "off") c.bias_every = 0;
            else c.bias_every = detail::cfg_int(key, value);
        } else if (key == "instrument.bias_samples")
            c.bias_samples = static_cast<int>(detail::cfg_int(key, value));
        else
            throw ConfigError("unknown config key '" + key + "'");
    }
    validate_config(c);
    return c;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

inline Vec initial_point_for(const ExperimentConfig& c, const Vec& diag) {
    Vec w1(static_cast<std::size_t>(c.d), 0.0);
    if (c.w1_mode == "ones") {
        for (auto& x : w1) x = c.w1_scale;
    } else if (c.w1_mode == "e1") {
        w1[0] = c.w1_scale;
    } else {  // inv_sqrt_a
        for (std::size_t i = 0; i < w1.size(); ++i) w1[i] = c.w1_scale / std::sqrt(diag[i]);
    }
    return w1;
}

inline Vec quadratic_diagonal(const ExperimentConfig& c) {
    Vec a(static_cast<std::size_t>(c.d), c.a_min);
    if (c.d > 1) {
        for (int i = 0; i < c.d; ++i) {
            const double frac = static_cast<double>(i) / (c.d - 1);
            if (c.a_spacing == "linear") {
                a[static_cast<std::size_t>(i)] = c.a_min + (c.a_max - c.a_min) * frac;
            } else {
                a[static_cast<std::size_t>(i)] =
                    std::exp(std::log(c.a_min) + (std::log(c.a_max) - std::log(c.a_min)) * frac);
            }
        }
    }
    return a;
}

inline std::unique_ptr<Objective> make_objective(const ExperimentConfig& c) {
    validate_config(c);
    if (c.objective_name == "quadratic") {
        Vec a = quadratic_diagonal(c);
        Vec w1 = initial_point_for(c, a);
        return std::make_unique<Quadratic>(std::move(a), std::move(w1));
    }
    Vec w1 = initial_point_for(c, {});
    if (c.objective_name == "loghump") return std::make_unique<LogHump>(c.d, std::move(w1));
    return std::make_unique<ShiftedQuarticSmoothed>(c.d, c.epsilon, std::move(w1));
}

inline NoiseModel make_noise_model(const ExperimentConfig& c) {
    return make_noise(c.sigma0, c.sigma1,
                      c.noise_family == "gaussian" ? NoiseFamily::gaussian
                                                   : NoiseFamily::bounded);
}

// Instrumentation stride actually used at horizon T: every step up to 2^13,
// then thinned to keep about 2^13 instrumented steps.
inline std::int64_t resolve_bias_stride(const ExperimentConfig& c, std::int64_t T) {
    if (c.bias_every >= 0) return c.bias_every;
    if (T <= 8192) return 1;
    return (T + 8191) / 8192;
}

}  // namespace adanorm

#ifndef ADAPLUS_BENCH_RUN_CONFIG_HPP
#define ADAPLUS_BENCH_RUN_CONFIG_HPP

// Run configuration: a flat `key = value` text file, one key per line,
// `#` comments. Unknown or repeated keys are errors.
//
//   problem            quadratic | rosenbrock | large_grad_small_curvature | logistic
//   problem.dim        dimension (quadratic, rosenbrock, logistic)
//   problem.condition_number, problem.g_mag, problem.curvature,
//   problem.n_samples, problem.margin, problem.seed
//   optimizer          adaplus | adam | adamw | nadam | adabelief | sgdm
//   lr beta1 beta2 eps weight_decay            override kernel defaults
//   nesterov belief decoupled_decay            true | false
//   epochs steps_per_epoch log_every
//   milestones         comma-separated epochs, may be empty
//   decay_factor
//   seeds              comma-separated replica seeds
//   noise              none | gaussian | minibatch
//   noise.scale        stddev (gaussian) or batch fraction (minibatch)
//   init               zeros | constant | uniform
//   init.scale         constant value, or half-width of the uniform range

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaplus/hyper_params.hpp"
#include "adaplus/lr_schedule.hpp"
#include "adaplus/problems.hpp"

namespace adaplus::bench {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitKind { zeros, constant, uniform };

struct ProblemSpec {
    std::string kind = "quadratic";
    std::size_t dim = 2;
    double condition_number = 1.0;
    double g_mag = 10.0;
    double curvature = 1e-3;
    std::size_t n_samples = 500;
    double margin = 0.5;
    std::uint64_t seed = 0;
};

struct RunConfig {
    ProblemSpec problem;
    Kernel kernel = Kernel::adaplus;
    HyperParams hp = HyperParams::defaults(Kernel::adaplus);
    std::uint64_t epochs = 1;
    std::uint64_t steps_per_epoch = 100;
    LrSchedule schedule;
    std::vector<std::uint64_t> seeds{0};
    std::uint64_t log_every = 1;
    NoiseKind noise = NoiseKind::none;
    double noise_scale = 0.0;
    InitKind init = InitKind::uniform;
    double init_scale = 1.0;

    void validate() const;
    std::string canonical() const;
    std::string problem_key() const;
    std::string hash() const;
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline std::uint64_t to_uint(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
    }
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

inline std::vector<std::uint64_t> to_uint_list(const std::string& key, const std::string& v) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(to_uint(key, item));
    }
    return out;
}

inline std::string join(const std::vector<std::uint64_t>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

inline const char* to_string(NoiseKind k) {
    switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::gaussian_additive: return "gaussian";
    case NoiseKind::minibatch_subset: return "minibatch";
    }
    return "none";
}

inline const char* to_string(InitKind k) {
    switch (k) {
    case InitKind::zeros: return "zeros";
    case InitKind::constant: return "constant";
    case InitKind::uniform: return "uniform";
    }
    return "zeros";
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace detail

inline void RunConfig::validate() const {
    static const std::vector<std::string> kinds{"quadratic", "rosenbrock", "large_grad_small_curvature", "logistic"};
    if (std::find(kinds.begin(), kinds.end(), problem.kind) == kinds.end()) {
        throw ConfigError("unknown problem '" + problem.kind + "'");
    }
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (steps_per_epoch < 1) throw ConfigError("steps_per_epoch must be >= 1");
    if (log_every < 1) throw ConfigError("log_every must be >= 1");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
    for (std::size_t i = 1; i < seeds.size(); ++i) {
        if (seeds[i] <= seeds[i - 1]) throw ConfigError("seeds must be distinct");
    }
    if (!(noise_scale >= 0.0)) throw ConfigError("noise.scale must be non-negative");
    try {
        hp.validate();
        schedule.validate();
    } catch (const OptimError& e) {
        throw ConfigError(e.what());
    }
}

/// Fully resolved configuration as sorted key=value lines.
inline std::string RunConfig::canonical() const {
    using detail::fmt_double;
    std::map<std::string, std::string> kv;
    kv["problem"] = problem.kind;
    kv["problem.dim"] = std::to_string(problem.dim);
    kv["problem.condition_number"] = fmt_double(problem.condition_number);
    kv["problem.g_mag"] = fmt_double(problem.g_mag);
    kv["problem.curvature"] = fmt_double(problem.curvature);
    kv["problem.n_samples"] = std::to_string(problem.n_samples);
    kv["problem.margin"] = fmt_double(problem.margin);
    kv["problem.seed"] = std::to_string(problem.seed);
    kv["optimizer"] = std::string(to_string(kernel));
    kv["lr"] = fmt_double(hp.lr);
    kv["beta1"] = fmt_double(hp.beta1);
    kv["beta2"] = fmt_double(hp.beta2);
    kv["eps"] = fmt_double(hp.eps);
    kv["weight_decay"] = fmt_double(hp.weight_decay);
    kv["nesterov"] = hp.use_nesterov ? "true" : "false";
    kv["belief"] = hp.use_belief ? "true" : "false";
    kv["decoupled_decay"] = hp.decoupled_decay ? "true" : "false";
    kv["epochs"] = std::to_string(epochs);
    kv["steps_per_epoch"] = std::to_string(steps_per_epoch);
    kv["log_every"] = std::to_string(log_every);
    kv["milestones"] = detail::join(schedule.milestones);
    kv["decay_factor"] = fmt_double(schedule.decay_factor);
    kv["seeds"] = detail::join(seeds);
    kv["noise"] = detail::to_string(noise);
    kv["noise.scale"] = fmt_double(noise_scale);
    kv["init"] = detail::to_string(init);
    kv["init.scale"] = fmt_double(init_scale);
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

/// Identifies the objective; records are only comparable when it matches.
inline std::string RunConfig::problem_key() const {
    using detail::fmt_double;
    const auto& p = problem;
    if (p.kind == "quadratic") {
        return "quadratic(dim=" + std::to_string(p.dim) + ",condition_number=" + fmt_double(p.condition_number) + ")";
    }
    if (p.kind == "rosenbrock") return "rosenbrock(dim=" + std::to_string(p.dim) + ")";
    if (p.kind == "large_grad_small_curvature") {
        return "large_grad_small_curvature(g_mag=" + fmt_double(p.g_mag) + ",curvature=" + fmt_double(p.curvature) +
               ")";
    }
    return "logistic(n_samples=" + std::to_string(p.n_samples) + ",dim=" + std::to_string(p.dim) +
           ",margin=" + fmt_double(p.margin) + ",seed=" + std::to_string(p.seed) + ")";
}

inline std::string RunConfig::hash() const { return detail::fnv1a_hex(canonical()); }

inline Problem build_problem(const ProblemSpec& spec) {
    try {
        if (spec.kind == "quadratic") return quadratic(spec.dim, spec.condition_number);
        if (spec.kind == "rosenbrock") return rosenbrock(spec.dim);
        if (spec.kind == "large_grad_small_curvature") return large_grad_small_curvature(spec.g_mag, spec.curvature);
        if (spec.kind == "logistic") {
            return logistic_regression_synthetic(spec.n_samples, spec.dim, spec.margin, spec.seed);
        }
    } catch (const OptimError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown problem '" + spec.kind + "'");
}

inline RunConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) throw ConfigError("duplicate key '" + key + "'");
    }

    RunConfig cfg;
    auto take = [&kv](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    // The optimizer picks the baseline hyper-parameters; everything else overrides.
    if (auto v = take("optimizer")) {
        auto k = parse_kernel(*v);
        if (!k) throw ConfigError("unknown optimizer '" + *v + "'");
        cfg.kernel = *k;
    }
    cfg.hp = HyperParams::defaults(cfg.kernel);

    if (auto v = take("problem")) cfg.problem.kind = *v;
    if (auto v = take("problem.dim")) cfg.problem.dim = detail::to_uint("problem.dim", *v);
    if (auto v = take("problem.condition_number")) cfg.problem.condition_number = detail::to_double("problem.condition_number", *v);
    if (auto v = take("problem.g_mag")) cfg.problem.g_mag = detail::to_double("problem.g_mag", *v);
    if (auto v = take("problem.curvature")) cfg.problem.curvature = detail::to_double("problem.curvature", *v);
    if (auto v = take("problem.n_samples")) cfg.problem.n_samples = detail::to_uint("problem.n_samples", *v);
    if (auto v = take("problem.margin")) cfg.problem.margin = detail::to_double("problem.margin", *v);
    if (auto v = take("problem.seed")) cfg.problem.seed = detail::to_uint("problem.seed", *v);

    if (auto v = take("lr")) cfg.hp.lr = detail::to_double("lr", *v);
    if (auto v = take("beta1")) cfg.hp.beta1 = detail::to_double("beta1", *v);
    if (auto v = take("beta2")) cfg.hp.beta2 = detail::to_double("beta2", *v);
    if (auto v = take("eps")) cfg.hp.eps = detail::to_double("eps", *v);
    if (auto v = take("weight_decay")) cfg.hp.weight_decay = detail::to_double("weight_decay", *v);
    if (auto v = take("nesterov")) cfg.hp.use_nesterov = detail::to_bool("nesterov", *v);
    if (auto v = take("belief")) cfg.hp.use_belief = detail::to_bool("belief", *v);
    if (auto v = take("decoupled_decay")) cfg.hp.decoupled_decay = detail::to_bool("decoupled_decay", *v);

    if (auto v = take("epochs")) cfg.epochs = detail::to_uint("epochs", *v);
    if (auto v = take("steps_per_epoch")) cfg.steps_per_epoch = detail::to_uint("steps_per_epoch", *v);
    if (auto v = take("log_every")) cfg.log_every = detail::to_uint("log_every", *v);
    if (auto v = take("milestones")) cfg.schedule.milestones = detail::to_uint_list("milestones", *v);
    if (auto v = take("decay_factor")) cfg.schedule.decay_factor = detail::to_double("decay_factor", *v);
    if (auto v = take("seeds")) {
        cfg.seeds = detail::to_uint_list("seeds", *v);
        std::sort(cfg.seeds.begin(), cfg.seeds.end());
    }

    if (auto v = take("noise")) {
        if (*v == "none") cfg.noise = NoiseKind::none;
        else if (*v == "gaussian") cfg.noise = NoiseKind::gaussian_additive;
        else if (*v == "minibatch") cfg.noise = NoiseKind::minibatch_subset;
        else throw ConfigError("unknown noise '" + *v + "'");
    }
    if (auto v = take("noise.scale")) cfg.noise_scale = detail::to_double("noise.scale", *v);
    if (auto v = take("init")) {
        if (*v == "zeros") cfg.init = InitKind::zeros;
        else if (*v == "constant") cfg.init = InitKind::constant;
        else if (*v == "uniform") cfg.init = InitKind::uniform;
        else throw ConfigError("unknown init '" + *v + "'");
    }
    if (auto v = take("init.scale")) cfg.init_scale = detail::to_double("init.scale", *v);

    if (!kv.empty()) throw ConfigError("unknown key '" + kv.begin()->first + "'");
    if (cfg.problem.kind == "large_grad_small_curvature") cfg.problem.dim = 1;
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse_config(in);
}

} // namespace adaplus::bench

#endif

#ifndef ADAPLUS_BENCH_SELFTEST_HPP
#define ADAPLUS_BENCH_SELFTEST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "adaplus/hyper_params.hpp"
#include "adaplus/kernels.hpp"
#include "adaplus/oracle.hpp"

namespace adaplus::bench {

/// |a - b| / max(|a|, |b|); zero when the values are identical.
inline double relative_error(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

/// Largest relative error over every field of two transcript sequences.
/// Infinite when the shapes differ.
inline double max_relative_error(const std::vector<StepTranscript>& a, const std::vector<StepTranscript>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].t != b[k].t || a[k].elements.size() != b[k].elements.size()) return std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a[k].elements.size(); ++i) {
            const auto& x = a[k].elements[i];
            const auto& y = b[k].elements[i];
            for (auto [p, q] : {std::pair{x.g, y.g}, {x.m, y.m}, {x.second_moment, y.second_moment},
                                {x.mbar, y.mbar}, {x.mhat, y.mhat}, {x.shat, y.shat},
                                {x.decay_applied, y.decay_applied}, {x.delta_theta, y.delta_theta},
                                {x.theta_after, y.theta_after}}) {
                worst = std::max(worst, relative_error(p, q));
            }
        }
    }
    return worst;
}

/// A seeded random problem instance for differential testing.
struct RandomStream {
    Kernel kernel = Kernel::adaplus;
    HyperParams hp;
    std::vector<double> theta0;
    oracle::GradientStream grads;
    std::vector<double> lrs;
};

/// dim in [1, max_dim], gradients N(0, sigma^2) with sigma log-uniform over
/// [1e-3, 1e3], learning rate log-uniform over [1e-4, 1e-1] with one
/// step-decay drop, and the kernel's honoured toggles flipped at random.
inline RandomStream make_random_stream(Kernel kernel, std::uint64_t seed, std::size_t steps,
                                       std::size_t max_dim = 16) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> dim_dist(1, max_dim);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    RandomStream s;
    s.kernel = kernel;
    s.hp = HyperParams::defaults(kernel);
    const std::size_t dim = dim_dist(rng);
    const double sigma = std::pow(10.0, -3.0 + 6.0 * unit(rng));
    const double lr = std::pow(10.0, -4.0 + 3.0 * unit(rng));
    s.hp.lr = lr;
    s.hp.weight_decay = coin(rng) ? 1e-2 : 0.1 * unit(rng);
    s.hp.use_nesterov = coin(rng);
    s.hp.use_belief = coin(rng);
    s.hp.decoupled_decay = coin(rng);
    s.hp.eps_in_second_moment = coin(rng);

    s.theta0.resize(dim);
    for (double& v : s.theta0) v = 2.0 * unit(rng) - 1.0;
    s.grads.assign(steps, std::vector<double>(dim));
    for (auto& g : s.grads) {
        for (double& v : g) v = sigma * normal(rng);
    }
    const std::size_t drop = steps / 2 + 1;
    for (std::size_t k = 0; k < steps; ++k) s.lrs.push_back(k < drop ? lr : lr * 0.1);
    return s;
}

/// Runs a stream through the optimized kernels.
inline std::vector<StepTranscript> run_kernel(const RandomStream& s) {
    OptimizerState state(s.theta0.size());
    ParamVector params(s.theta0);
    std::vector<StepTranscript> out;
    out.reserve(s.grads.size());
    for (std::size_t k = 0; k < s.grads.size(); ++k) {
        out.push_back(step(s.kernel, state, params, s.grads[k], s.hp, s.lrs[k]));
    }
    return out;
}

struct DifferentialReport {
    std::size_t streams = 0;
    std::size_t records = 0;
    double worst_relative_error = 0.0;
    Kernel worst_kernel = Kernel::adaplus;
    std::uint64_t worst_seed = 0;
    bool passed = false;
};

/// Every kernel against the scalar oracle on `streams_per_kernel` seeded
/// random streams of `steps` steps.
inline DifferentialReport run_differential_suite(std::size_t streams_per_kernel = 50, std::size_t steps = 200,
                                                 double tolerance = 1e-12, std::uint64_t base_seed = 20240901) {
    DifferentialReport report;
    for (Kernel kernel : all_kernels) {
        for (std::size_t i = 0; i < streams_per_kernel; ++i) {
            const std::uint64_t seed = base_seed + 1000 * static_cast<std::uint64_t>(kernel) + i;
            const RandomStream s = make_random_stream(kernel, seed, steps);
            const auto fast = run_kernel(s);
            const auto reference = oracle::replay<double>(kernel, s.grads, s.theta0, s.hp, s.lrs);
            const double err = max_relative_error(fast, reference);
            ++report.streams;
            report.records += steps * s.theta0.size();
            if (report.streams == 1 || err > report.worst_relative_error) {
                report.worst_relative_error = err;
                report.worst_kernel = kernel;
                report.worst_seed = seed;
            }
        }
    }
    report.passed = report.worst_relative_error <= tolerance;
    return report;
}

} // namespace adaplus::bench

#endif

#ifndef ADAPLUS_BENCH_RUNNER_HPP
#define ADAPLUS_BENCH_RUNNER_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "adaplus/bench/run_config.hpp"
#include "adaplus/kernels.hpp"
#include "adaplus/lr_schedule.hpp"
#include "adaplus/problems.hpp"

namespace adaplus::bench {

struct RunRow {
    std::uint64_t seed = 0;
    std::uint64_t epoch = 0;
    std::uint64_t step = 0;
    double lr = 0.0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double param_norm = 0.0;

    bool operator==(const RunRow&) const = default;
};

struct RunSummary {
    double final_loss = 0.0; // mean over seeds of the last logged loss
    double best_loss = 0.0;  // mean over seeds of the lowest logged loss
    double wall_time_seconds = 0.0;

    bool operator==(const RunSummary&) const = default;
};

struct RunRecord {
    std::string config_hash;
    std::string problem;
    std::string optimizer;
    bool aborted = false;
    std::string abort_reason;
    std::vector<RunRow> rows;
    RunSummary summary;

    bool operator==(const RunRecord&) const = default;
};

/// Replica parallelism: ADAPLUS_BENCH_THREADS if set and positive, else the
/// hardware concurrency.
inline unsigned parallelism_from_env() {
    if (const char* env = std::getenv("ADAPLUS_BENCH_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

inline double l2_norm(std::span<const double> v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

struct ReplicaResult {
    std::vector<RunRow> rows;
    std::optional<std::string> abort_reason;
};

inline std::vector<double> initial_theta(const RunConfig& cfg, std::size_t dim, std::uint64_t seed) {
    std::vector<double> theta(dim, 0.0);
    switch (cfg.init) {
    case InitKind::zeros: break;
    case InitKind::constant: std::fill(theta.begin(), theta.end(), cfg.init_scale); break;
    case InitKind::uniform: {
        std::seed_seq seq{seed, std::uint64_t{1}};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> dist(-cfg.init_scale, cfg.init_scale);
        for (double& v : theta) v = dist(rng);
        break;
    }
    }
    return theta;
}

inline std::uint64_t noise_seed(std::uint64_t seed) {
    std::seed_seq seq{seed, std::uint64_t{2}};
    std::uint32_t words[2];
    seq.generate(std::begin(words), std::end(words));
    return (std::uint64_t{words[0]} << 32) | words[1];
}

inline ReplicaResult run_replica(const RunConfig& cfg, const Problem& problem, std::uint64_t seed) {
    ReplicaResult result;
    ParamVector params(initial_theta(cfg, problem.dim(), seed));
    Optimizer opt(cfg.kernel, cfg.hp, problem.dim());
    StochasticGradient gradient(problem, NoiseSpec{cfg.noise, cfg.noise_scale, noise_seed(seed)});

    const std::uint64_t total = cfg.epochs * cfg.steps_per_epoch;
    std::uint64_t step = 0;
    for (std::uint64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr_t = lr_at(cfg.schedule, cfg.hp.lr, epoch);
        for (std::uint64_t k = 0; k < cfg.steps_per_epoch; ++k) {
            ++step;
            try {
                const Evaluation noisy = gradient(params.values());
                opt.step(params, noisy.grad, lr_t);
            } catch (const OptimError& e) {
                result.abort_reason = "seed " + std::to_string(seed) + ", step " + std::to_string(step) + ": " + e.what();
                return result;
            }
            if (step % cfg.log_every != 0 && step != total) continue;
            // progress is measured on the noiseless objective
            const Evaluation clean = problem.evaluate(params.values());
            if (!std::isfinite(clean.loss)) {
                result.abort_reason = "seed " + std::to_string(seed) + ", step " + std::to_string(step) +
                                      ": non-finite loss";
                return result;
            }
            result.rows.push_back(
                RunRow{seed, epoch, step, lr_t, clean.loss, l2_norm(clean.grad), l2_norm(params.values())});
        }
    }
    return result;
}

} // namespace detail

/// Runs every seed of `cfg` and assembles the rows in seed order. Replicas
/// run in parallel on up to `threads` workers (default from the environment).
inline RunRecord run(const RunConfig& cfg, std::optional<unsigned> threads = std::nullopt) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    const Problem problem = build_problem(cfg.problem);

    std::vector<detail::ReplicaResult> results(cfg.seeds.size());
    const unsigned workers =
        std::min<unsigned>(threads.value_or(parallelism_from_env()), static_cast<unsigned>(cfg.seeds.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) results[i] = detail::run_replica(cfg, problem, cfg.seeds[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
                    results[i] = detail::run_replica(cfg, problem, cfg.seeds[i]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    RunRecord record;
    record.config_hash = cfg.hash();
    record.problem = cfg.problem_key();
    record.optimizer = std::string(to_string(cfg.kernel));

    double final_sum = 0.0, best_sum = 0.0;
    for (auto& r : results) {
        if (r.abort_reason && !record.aborted) {
            record.aborted = true;
            record.abort_reason = *r.abort_reason;
        }
        if (!r.rows.empty()) {
            final_sum += r.rows.back().loss;
            best_sum += std::min_element(r.rows.begin(), r.rows.end(), [](const RunRow& a, const RunRow& b) {
                            return a.loss < b.loss;
                        })->loss;
        }
        record.rows.insert(record.rows.end(), r.rows.begin(), r.rows.end());
    }
    const double n = static_cast<double>(results.size());
    record.summary.final_loss = final_sum / n;
    record.summary.best_loss = best_sum / n;
    record.summary.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return record;
}

} // namespace adaplus::bench

#endif

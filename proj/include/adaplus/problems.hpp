#ifndef ADAPLUS_PROBLEMS_HPP
#define ADAPLUS_PROBLEMS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adaplus/error.hpp"

namespace adaplus {

struct Evaluation {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Labelled binary dataset, row-major features, labels in {0, 1}.
struct Dataset {
    std::size_t n_samples = 0;
    std::size_t dim = 0;
    std::vector<double> features;
    std::vector<double> labels;

    std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }

    /// Fraction of samples on the correct side of the hyperplane theta.x = 0.
    double accuracy(std::span<const double> theta) const {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n_samples; ++i) {
            const auto x = row(i);
            const double z = std::inner_product(x.begin(), x.end(), theta.begin(), 0.0);
            if ((z > 0.0) == (labels[i] > 0.5)) ++correct;
        }
        return static_cast<double>(correct) / static_cast<double>(n_samples);
    }

    /// CSV with header feature_0..feature_{d-1},label.
    void write_csv(std::ostream& out) const {
        for (std::size_t j = 0; j < dim; ++j) out << "feature_" << j << ',';
        out << "label\n";
        char buf[32];
        for (std::size_t i = 0; i < n_samples; ++i) {
            for (double v : row(i)) {
                std::snprintf(buf, sizeof buf, "%.17g,", v);
                out << buf;
            }
            out << static_cast<int>(labels[i]) << '\n';
        }
    }
};

/// Objective with an exact gradient. Immutable after construction; copies
/// share the underlying evaluators.
class Problem {
public:
    using FullEval = std::function<Evaluation(std::span<const double>)>;
    using SubsetEval = std::function<Evaluation(std::span<const double>, std::span<const std::size_t>)>;

    Problem(std::string name, std::size_t dim, std::optional<double> optimum_value, FullEval eval,
            SubsetEval subset_eval = {}, std::shared_ptr<const Dataset> dataset = {})
        : name_(std::move(name)), dim_(dim), optimum_value_(optimum_value), eval_(std::move(eval)),
          subset_eval_(std::move(subset_eval)), dataset_(std::move(dataset)) {}

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return dim_; }
    std::optional<double> optimum_value() const noexcept { return optimum_value_; }
    const std::shared_ptr<const Dataset>& dataset() const noexcept { return dataset_; }
    bool supports_minibatch() const noexcept { return static_cast<bool>(subset_eval_); }
    std::size_t n_samples() const noexcept { return dataset_ ? dataset_->n_samples : 0; }

    Evaluation evaluate(std::span<const double> theta) const {
        check_dim(theta);
        return eval_(theta);
    }

    /// Loss and gradient over the listed samples only.
    Evaluation evaluate_subset(std::span<const double> theta, std::span<const std::size_t> indices) const {
        if (!subset_eval_) throw OptimError(ErrorKind::invalid_argument, name_ + " has no sample structure");
        check_dim(theta);
        return subset_eval_(theta, indices);
    }

private:
    void check_dim(std::span<const double> theta) const {
        if (theta.size() != dim_) {
            throw OptimError(ErrorKind::dimension_mismatch, name_ + ": theta length " + std::to_string(theta.size()) +
                                                                " != dim " + std::to_string(dim_));
        }
    }

    std::string name_;
    std::size_t dim_;
    std::optional<double> optimum_value_;
    FullEval eval_;
    SubsetEval subset_eval_;
    std::shared_ptr<const Dataset> dataset_;
};

enum class NoiseKind { none, gaussian_additive, minibatch_subset };

/// Gradient noise. `scale` is the stddev of additive Gaussian noise, or the
/// batch fraction of n_samples for minibatch sampling. scale = 0 is noiseless.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double scale = 0.0;
    std::uint64_t seed = 0;
};

/// Stateful noisy-gradient source over a problem. Each call advances the
/// seeded stream, so a sequence of calls is a pure function of the seed.
class StochasticGradient {
public:
    StochasticGradient(Problem problem, NoiseSpec noise) : problem_(std::move(problem)), noise_(noise), rng_(noise.seed) {
        if (!std::isfinite(noise_.scale) || noise_.scale < 0.0) {
            throw OptimError(ErrorKind::invalid_argument, "noise scale must be non-negative");
        }
        if (noise_.kind == NoiseKind::minibatch_subset && noise_.scale > 0.0) {
            if (!problem_.supports_minibatch()) {
                throw OptimError(ErrorKind::invalid_argument, problem_.name() + " does not support minibatch noise");
            }
            if (noise_.scale > 1.0) throw OptimError(ErrorKind::invalid_argument, "batch fraction must be <= 1");
            const auto n = problem_.n_samples();
            batch_size_ = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::llround(noise_.scale * static_cast<double>(n))), 1, n);
            all_indices_.resize(n);
            std::iota(all_indices_.begin(), all_indices_.end(), std::size_t{0});
        }
    }

    const Problem& problem() const noexcept { return problem_; }
    std::size_t batch_size() const noexcept { return batch_size_; }

    Evaluation operator()(std::span<const double> theta) {
        if (noise_.scale == 0.0 || noise_.kind == NoiseKind::none) return problem_.evaluate(theta);
        if (noise_.kind == NoiseKind::gaussian_additive) {
            Evaluation e = problem_.evaluate(theta);
            std::normal_distribution<double> normal(0.0, 1.0);
            for (double& g : e.grad) g += noise_.scale * normal(rng_);
            return e;
        }
        // without replacement within a step
        std::vector<std::size_t> batch;
        batch.reserve(batch_size_);
        std::sample(all_indices_.begin(), all_indices_.end(), std::back_inserter(batch), batch_size_, rng_);
        return problem_.evaluate_subset(theta, batch);
    }

private:
    Problem problem_;
    NoiseSpec noise_;
    std::mt19937_64 rng_;
    std::size_t batch_size_ = 0;
    std::vector<std::size_t> all_indices_;
};

/// f = 1/2 sum d_i theta_i^2 with d log-spaced over [1, condition_number].
inline Problem quadratic(std::size_t dim, double condition_number) {
    if (dim == 0) throw OptimError(ErrorKind::invalid_argument, "quadratic: dim must be positive");
    if (!(condition_number >= 1.0) || !std::isfinite(condition_number)) {
        throw OptimError(ErrorKind::invalid_argument, "quadratic: condition_number must be >= 1");
    }
    std::vector<double> diag(dim, 1.0);
    for (std::size_t i = 1; i < dim; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(dim - 1);
        diag[i] = std::pow(condition_number, frac);
    }
    if (dim > 1) diag.back() = condition_number;
    auto eval = [diag = std::move(diag)](std::span<const double> theta) {
        Evaluation e{0.0, std::vector<double>(theta.size())};
        for (std::size_t i = 0; i < theta.size(); ++i) {
            e.loss += 0.5 * diag[i] * theta[i] * theta[i];
            e.grad[i] = diag[i] * theta[i];
        }
        return e;
    };
    return Problem("quadratic", dim, 0.0, std::move(eval));
}

/// Extended Rosenbrock: sum over pairs of 100 (y - x^2)^2 + (1 - x)^2.
inline Problem rosenbrock(std::size_t dim) {
    if (dim == 0 || dim % 2 != 0) throw OptimError(ErrorKind::invalid_argument, "rosenbrock: dim must be even");
    auto eval = [](std::span<const double> theta) {
        Evaluation e{0.0, std::vector<double>(theta.size(), 0.0)};
        for (std::size_t i = 0; i < theta.size(); i += 2) {
            const double x = theta[i];
            const double y = theta[i + 1];
            const double a = y - x * x;
            const double b = 1.0 - x;
            e.loss += 100.0 * a * a + b * b;
            e.grad[i] = -400.0 * x * a - 2.0 * b;
            e.grad[i + 1] = 200.0 * a;
        }
        return e;
    };
    return Problem("rosenbrock", dim, 0.0, std::move(eval));
}

/// One-dimensional f = g_mag theta + 1/2 curvature theta^2. Near the origin
/// the gradient is large (about g_mag) but changes little between steps.
inline Problem large_grad_small_curvature(double g_mag, double curvature) {
    if (!(g_mag > 0.0) || !std::isfinite(g_mag)) {
        throw OptimError(ErrorKind::invalid_argument, "large_grad_small_curvature: g_mag must be positive");
    }
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
        throw OptimError(ErrorKind::invalid_argument, "large_grad_small_curvature: curvature must be positive");
    }
    auto eval = [g_mag, curvature](std::span<const double> theta) {
        const double x = theta[0];
        return Evaluation{g_mag * x + 0.5 * curvature * x * x, {g_mag + curvature * x}};
    };
    return Problem("large_grad_small_curvature", 1, -(g_mag * g_mag) / (2.0 * curvature), std::move(eval));
}

namespace detail {

inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double ez = std::exp(z);
    return ez / (1.0 + ez);
}

template <typename IndexRange>
Evaluation logistic_eval(const Dataset& data, std::span<const double> theta, const IndexRange& indices,
                         std::size_t count) {
    Evaluation e{0.0, std::vector<double>(data.dim, 0.0)};
    for (std::size_t i : indices) {
        const auto x = data.row(i);
        const double z = std::inner_product(x.begin(), x.end(), theta.begin(), 0.0);
        const double y = data.labels[i];
        e.loss += softplus(z) - y * z;
        const double r = sigmoid(z) - y;
        for (std::size_t j = 0; j < data.dim; ++j) e.grad[j] += r * x[j];
    }
    const double inv = 1.0 / static_cast<double>(count);
    e.loss *= inv;
    for (double& g : e.grad) g *= inv;
    return e;
}

} // namespace detail

/// Linearly separable data: every sample sits at distance >= margin from
/// the hyperplane through the origin with a seeded random unit normal.
inline std::shared_ptr<const Dataset> make_separable_dataset(std::size_t n_samples, std::size_t dim, double margin,
                                                             std::uint64_t seed) {
    if (n_samples < 2) throw OptimError(ErrorKind::invalid_argument, "logistic: n_samples must be >= 2");
    if (dim == 0) throw OptimError(ErrorKind::invalid_argument, "logistic: dim must be positive");
    if (!(margin > 0.0) || !std::isfinite(margin)) {
        throw OptimError(ErrorKind::invalid_argument, "logistic: margin must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    std::vector<double> w(dim);
    double norm = 0.0;
    while (norm < 1e-12) {
        for (double& v : w) v = normal(rng);
        norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    }
    for (double& v : w) v /= norm;

    auto data = std::make_shared<Dataset>();
    data->n_samples = n_samples;
    data->dim = dim;
    data->features.resize(n_samples * dim);
    data->labels.resize(n_samples);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n_samples; ++i) {
        for (double& v : x) v = normal(rng);
        const double along = std::inner_product(x.begin(), x.end(), w.begin(), 0.0);
        const bool positive = coin(rng);
        const double target = (positive ? 1.0 : -1.0) * (margin + std::abs(normal(rng)));
        for (std::size_t j = 0; j < dim; ++j) {
            data->features[i * dim + j] = x[j] + (target - along) * w[j];
        }
        data->labels[i] = positive ? 1.0 : 0.0;
    }
    return data;
}

/// Mean logistic loss over a seeded separable dataset. Supports minibatch
/// evaluation over a subset of sample indices.
inline Problem logistic_regression_synthetic(std::size_t n_samples, std::size_t dim, double margin,
                                             std::uint64_t seed) {
    auto data = make_separable_dataset(n_samples, dim, margin, seed);
    auto full = [data](std::span<const double> theta) {
        std::vector<std::size_t> all(data->n_samples);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return detail::logistic_eval(*data, theta, all, all.size());
    };
    auto subset = [data](std::span<const double> theta, std::span<const std::size_t> indices) {
        for (std::size_t i : indices) {
            if (i >= data->n_samples) throw OptimError(ErrorKind::invalid_argument, "sample index out of range", i);
        }
        if (indices.empty()) throw OptimError(ErrorKind::invalid_argument, "empty minibatch");
        return detail::logistic_eval(*data, theta, indices, indices.size());
    };
    return Problem("logistic_regression_synthetic", dim, std::nullopt, std::move(full), std::move(subset), data);
}

/// Largest absolute deviation between the analytic gradient and central
/// differences of the (noiseless) loss with step h.
inline double check_gradient(const Problem& p, std::span<const double> theta, double h = 1e-6) {
    if (!(h > 0.0)) throw OptimError(ErrorKind::invalid_argument, "check_gradient: h must be positive");
    const Evaluation at = p.evaluate(theta);
    std::vector<double> probe(theta.begin(), theta.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + h;
        const double up = p.evaluate(probe).loss;
        probe[i] = saved - h;
        const double down = p.evaluate(probe).loss;
        probe[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - at.grad[i]));
    }
    return worst;
}

} // namespace adaplus

#endif

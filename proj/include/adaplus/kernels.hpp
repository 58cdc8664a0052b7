#ifndef ADAPLUS_KERNELS_HPP
#define ADAPLUS_KERNELS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adaplus/error.hpp"
#include "adaplus/hyper_params.hpp"
#include "adaplus/state.hpp"
#include "adaplus/transcript.hpp"

namespace adaplus {

namespace detail {

/// Which ingredients an adaptive step applies.
struct AdaptiveRule {
    bool decay = false;    // theta <- theta - lr_t * lambda * theta before the update
    bool nesterov = false; // numerator beta1 * m_t + (1 - beta1) * g_t
    bool belief = false;   // second moment tracks (g - m)^2 instead of g^2
    bool eps_in_second_moment = false;
};

inline void check_step_inputs(const OptimizerState& state, const ParamVector& params,
                              std::span<const double> grads, double lr_t) {
    if (params.dim() != state.dim()) {
        throw OptimError(ErrorKind::dimension_mismatch,
                         "params dim " + std::to_string(params.dim()) + " != state dim " + std::to_string(state.dim()));
    }
    if (grads.size() != params.dim()) {
        throw OptimError(ErrorKind::dimension_mismatch,
                         "grads length " + std::to_string(grads.size()) + " != params dim " +
                             std::to_string(params.dim()));
    }
    if (!std::isfinite(lr_t) || lr_t <= 0.0) {
        throw OptimError(ErrorKind::invalid_hyper_params, "lr_t must be positive and finite");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) throw OptimError(ErrorKind::non_finite_gradient, "gradient entry", i);
    }
}

inline void check_finite_result(std::span<const double> theta, std::span<const double> m,
                                std::span<const double> second) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta[i]) || !std::isfinite(m[i]) || !std::isfinite(second[i])) {
            throw OptimError(ErrorKind::non_finite_parameter, "step produced a non-finite value", i);
        }
    }
}

inline void commit(OptimizerState& state, ParamVector& params, std::vector<double>&& theta,
                   std::vector<double>&& m, std::vector<double>&& second) {
    KernelAccess::values(params) = std::move(theta);
    KernelAccess::m(state) = std::move(m);
    KernelAccess::second_moment(state) = std::move(second);
    ++KernelAccess::t(state);
}

inline StepTranscript adaptive_step(const AdaptiveRule& rule, OptimizerState& state, ParamVector& params,
                                    std::span<const double> grads, const HyperParams& hp, double lr_t) {
    hp.validate();
    check_step_inputs(state, params, grads, lr_t);

    const std::size_t n = params.dim();
    const std::uint64_t t = state.t() + 1;
    const double bias1 = 1.0 - std::pow(hp.beta1, static_cast<double>(t));
    const double bias2 = 1.0 - std::pow(hp.beta2, static_cast<double>(t));

    const auto theta_old = params.values();
    const auto m_old = state.m();
    const auto second_old = state.second_moment();

    std::vector<double> theta_new(n), m_new(n), second_new(n);
    StepTranscript transcript{t, std::vector<ElementRecord>(n)};

    for (std::size_t i = 0; i < n; ++i) {
        ElementRecord& rec = transcript.elements[i];
        const double g = grads[i];
        rec.g = g;

        double theta = theta_old[i];
        if (rule.decay) {
            const double shrink = lr_t * hp.weight_decay * theta;
            rec.decay_applied = -shrink;
            theta = theta - shrink;
        }

        const double m = hp.beta1 * m_old[i] + (1.0 - hp.beta1) * g;

        double second;
        if (rule.belief) {
            const double residual = g - m;
            second = hp.beta2 * second_old[i] + (1.0 - hp.beta2) * (residual * residual);
            if (rule.eps_in_second_moment) second = second + hp.eps;
        } else {
            second = hp.beta2 * second_old[i] + (1.0 - hp.beta2) * (g * g);
        }

        const double mbar = rule.nesterov ? hp.beta1 * m + (1.0 - hp.beta1) * g : m;
        const double mhat = mbar / bias1;
        const double shat = second / bias2;
        const double step = lr_t * mhat / (std::sqrt(shat) + hp.eps);

        rec.m = m;
        rec.second_moment = second;
        rec.mbar = mbar;
        rec.mhat = mhat;
        rec.shat = shat;
        rec.delta_theta = -step;
        rec.theta_after = theta - step;

        theta_new[i] = rec.theta_after;
        m_new[i] = m;
        second_new[i] = second;
    }

    check_finite_result(theta_new, m_new, second_new);
    commit(state, params, std::move(theta_new), std::move(m_new), std::move(second_new));
    return transcript;
}

} // namespace detail

/// AdaPlus: decoupled weight decay, Nesterov-blended numerator and the
/// belief second moment s <- beta2 s + (1 - beta2)(g - m)^2 + eps.
///
/// Honours `use_nesterov`, `use_belief`, `decoupled_decay` and
/// `eps_in_second_moment`, so the baselines are reachable by toggling.
/// On error the state and parameters are left untouched.
inline StepTranscript adaplus_step(OptimizerState& state, ParamVector& params, std::span<const double> grads,
                                   const HyperParams& hp, double lr_t) {
    const detail::AdaptiveRule rule{hp.decoupled_decay, hp.use_nesterov, hp.use_belief, hp.eps_in_second_moment};
    return detail::adaptive_step(rule, state, params, grads, hp, lr_t);
}

/// Classical Adam. Ignores all toggles and the weight decay.
inline StepTranscript adam_step(OptimizerState& state, ParamVector& params, std::span<const double> grads,
                                const HyperParams& hp, double lr_t) {
    return detail::adaptive_step({}, state, params, grads, hp, lr_t);
}

/// Adam preceded by decoupled weight decay. Always decays.
inline StepTranscript adamw_step(OptimizerState& state, ParamVector& params, std::span<const double> grads,
                                 const HyperParams& hp, double lr_t) {
    return detail::adaptive_step({.decay = true}, state, params, grads, hp, lr_t);
}

/// Adam with the Nesterov-blended numerator (bias-corrected by 1 - beta1^t).
/// Honours `use_nesterov`; no weight decay.
inline StepTranscript nadam_step(OptimizerState& state, ParamVector& params, std::span<const double> grads,
                                 const HyperParams& hp, double lr_t) {
    return detail::adaptive_step({.nesterov = hp.use_nesterov}, state, params, grads, hp, lr_t);
}

/// AdaBelief with the classical numerator. Honours `decoupled_decay`.
inline StepTranscript adabelief_step(OptimizerState& state, ParamVector& params, std::span<const double> grads,
                                     const HyperParams& hp, double lr_t) {
    const detail::AdaptiveRule rule{hp.decoupled_decay, false, true, hp.eps_in_second_moment};
    return detail::adaptive_step(rule, state, params, grads, hp, lr_t);
}

/// SGD with momentum, `beta1` as the momentum coefficient mu.
///
/// Classical: m <- mu m + g, theta <- theta - lr_t m.
/// With `use_nesterov`: m <- mu m + lr_t g, theta <- theta - (mu m + lr_t g).
/// Honours `decoupled_decay`.
inline StepTranscript sgdm_step(OptimizerState& state, ParamVector& params, std::span<const double> grads,
                                const HyperParams& hp, double lr_t) {
    hp.validate();
    detail::check_step_inputs(state, params, grads, lr_t);

    const std::size_t n = params.dim();
    const double mu = hp.beta1;
    const auto theta_old = params.values();
    const auto m_old = state.m();

    std::vector<double> theta_new(n), m_new(n), second_new(n, 0.0);
    StepTranscript transcript{state.t() + 1, std::vector<ElementRecord>(n)};

    for (std::size_t i = 0; i < n; ++i) {
        ElementRecord& rec = transcript.elements[i];
        const double g = grads[i];
        rec.g = g;

        double theta = theta_old[i];
        if (hp.decoupled_decay) {
            const double shrink = lr_t * hp.weight_decay * theta;
            rec.decay_applied = -shrink;
            theta = theta - shrink;
        }

        double m, direction;
        if (hp.use_nesterov) {
            m = mu * m_old[i] + lr_t * g;
            direction = mu * m + lr_t * g;
        } else {
            m = mu * m_old[i] + g;
            direction = lr_t * m;
        }

        rec.m = m;
        rec.mbar = hp.use_nesterov ? direction : m;
        rec.mhat = rec.mbar;
        rec.delta_theta = -direction;
        rec.theta_after = theta - direction;

        theta_new[i] = rec.theta_after;
        m_new[i] = m;
    }

    detail::check_finite_result(theta_new, m_new, second_new);
    detail::commit(state, params, std::move(theta_new), std::move(m_new), std::move(second_new));
    return transcript;
}

inline StepTranscript step(Kernel kernel, OptimizerState& state, ParamVector& params, std::span<const double> grads,
                           const HyperParams& hp, double lr_t) {
    switch (kernel) {
    case Kernel::adaplus: return adaplus_step(state, params, grads, hp, lr_t);
    case Kernel::adam: return adam_step(state, params, grads, hp, lr_t);
    case Kernel::adamw: return adamw_step(state, params, grads, hp, lr_t);
    case Kernel::nadam: return nadam_step(state, params, grads, hp, lr_t);
    case Kernel::adabelief: return adabelief_step(state, params, grads, hp, lr_t);
    case Kernel::sgdm: return sgdm_step(state, params, grads, hp, lr_t);
    }
    throw OptimError(ErrorKind::invalid_argument, "unknown kernel");
}

/// A kernel bound to its hyper-parameters and state.
class Optimizer {
public:
    Optimizer(Kernel kernel, HyperParams hp, std::size_t dim) : kernel_(kernel), hp_(hp), state_(dim) {
        hp_.validate();
    }

    StepTranscript step(ParamVector& params, std::span<const double> grads, double lr_t) {
        return adaplus::step(kernel_, state_, params, grads, hp_, lr_t);
    }

    StepTranscript step(ParamVector& params, std::span<const double> grads) { return step(params, grads, hp_.lr); }

    Kernel kernel() const noexcept { return kernel_; }
    const HyperParams& hyper_params() const noexcept { return hp_; }
    const OptimizerState& state() const noexcept { return state_; }

private:
    Kernel kernel_;
    HyperParams hp_;
    OptimizerState state_;
};

} // namespace adaplus

#endif

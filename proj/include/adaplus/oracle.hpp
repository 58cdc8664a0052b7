#ifndef ADAPLUS_ORACLE_HPP
#define ADAPLUS_ORACLE_HPP

// Scalar reference implementation of every kernel.
//
// Nothing here is shared with kernels.hpp. Each kernel is written out as
// its own loop: one element at a time, one statement per update line, no
// algebraic shortcuts. The scalar type is a template parameter so the same
// code can run in double (differential tests) or long double (worked
// examples).

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaplus/error.hpp"
#include "adaplus/hyper_params.hpp"
#include "adaplus/transcript.hpp"

namespace adaplus::oracle {

inline constexpr std::size_t max_dim = 64;

enum class Stage { weight_decay, first_moment, second_moment, nesterov_blend, bias_correction, parameter_update };

inline const char* to_string(Stage s) {
    switch (s) {
    case Stage::weight_decay: return "weight_decay";
    case Stage::first_moment: return "first_moment";
    case Stage::second_moment: return "second_moment";
    case Stage::nesterov_blend: return "nesterov_blend";
    case Stage::bias_correction: return "bias_correction";
    case Stage::parameter_update: return "parameter_update";
    }
    return "unknown";
}

/// A non-finite intermediate, located by step (1-based), element and stage.
class ReplayError : public std::runtime_error {
public:
    ReplayError(std::size_t step, std::size_t element, Stage stage)
        : std::runtime_error("replay: non-finite value at step " + std::to_string(step) + ", element " +
                             std::to_string(element) + ", stage " + to_string(stage)),
          step_(step), element_(element), stage_(stage) {}

    std::size_t step() const noexcept { return step_; }
    std::size_t element() const noexcept { return element_; }
    Stage stage() const noexcept { return stage_; }

private:
    std::size_t step_;
    std::size_t element_;
    Stage stage_;
};

using GradientStream = std::vector<std::vector<double>>;

namespace detail {

template <typename Real>
struct Scalars {
    Real beta1, beta2, eps, weight_decay;
    explicit Scalars(const HyperParams& hp)
        : beta1(hp.beta1), beta2(hp.beta2), eps(hp.eps), weight_decay(hp.weight_decay) {}
};

template <typename Real>
struct Cell {
    Real theta{};
    Real m{};
    Real second{};
};

template <typename Real>
void ensure(Real value, std::size_t step, std::size_t element, Stage stage) {
    if (!std::isfinite(value)) throw ReplayError(step, element, stage);
}

template <typename Real>
BasicElementRecord<Real> adaplus_element(Cell<Real>& c, Real g, Real lr, const Scalars<Real>& k, std::size_t t,
                                         std::size_t i, const HyperParams& hp) {
    BasicElementRecord<Real> r;
    r.g = g;
    Real theta = c.theta;
    if (hp.decoupled_decay) {
        Real shrink = lr * k.weight_decay * c.theta;
        theta = c.theta - shrink;
        r.decay_applied = -shrink;
        ensure(theta, t, i, Stage::weight_decay);
    }
    Real m = k.beta1 * c.m + (Real(1) - k.beta1) * g;
    ensure(m, t, i, Stage::first_moment);
    Real second;
    if (hp.use_belief) {
        Real diff = g - m;
        Real diff_sq = diff * diff;
        if (hp.eps_in_second_moment) {
            second = k.beta2 * c.second + (Real(1) - k.beta2) * diff_sq + k.eps;
        } else {
            second = k.beta2 * c.second + (Real(1) - k.beta2) * diff_sq;
        }
    } else {
        Real g_sq = g * g;
        second = k.beta2 * c.second + (Real(1) - k.beta2) * g_sq;
    }
    ensure(second, t, i, Stage::second_moment);
    Real mbar = m;
    if (hp.use_nesterov) {
        mbar = k.beta1 * m + (Real(1) - k.beta1) * g;
        ensure(mbar, t, i, Stage::nesterov_blend);
    }
    Real mhat = mbar / (Real(1) - std::pow(k.beta1, Real(t)));
    Real shat = second / (Real(1) - std::pow(k.beta2, Real(t)));
    ensure(mhat, t, i, Stage::bias_correction);
    ensure(shat, t, i, Stage::bias_correction);
    Real update = lr * mhat / (std::sqrt(shat) + k.eps);
    Real theta_after = theta - update;
    ensure(theta_after, t, i, Stage::parameter_update);

    r.m = m;
    r.second_moment = second;
    r.mbar = mbar;
    r.mhat = mhat;
    r.shat = shat;
    r.delta_theta = -update;
    r.theta_after = theta_after;
    c = Cell<Real>{theta_after, m, second};
    return r;
}

template <typename Real>
BasicElementRecord<Real> adam_element(Cell<Real>& c, Real g, Real lr, const Scalars<Real>& k, std::size_t t,
                                      std::size_t i) {
    BasicElementRecord<Real> r;
    r.g = g;
    Real m = k.beta1 * c.m + (Real(1) - k.beta1) * g;
    ensure(m, t, i, Stage::first_moment);
    Real g_sq = g * g;
    Real v = k.beta2 * c.second + (Real(1) - k.beta2) * g_sq;
    ensure(v, t, i, Stage::second_moment);
    Real mhat = m / (Real(1) - std::pow(k.beta1, Real(t)));
    Real vhat = v / (Real(1) - std::pow(k.beta2, Real(t)));
    ensure(mhat, t, i, Stage::bias_correction);
    ensure(vhat, t, i, Stage::bias_correction);
    Real update = lr * mhat / (std::sqrt(vhat) + k.eps);
    Real theta_after = c.theta - update;
    ensure(theta_after, t, i, Stage::parameter_update);

    r.m = m;
    r.second_moment = v;
    r.mbar = m;
    r.mhat = mhat;
    r.shat = vhat;
    r.delta_theta = -update;
    r.theta_after = theta_after;
    c = Cell<Real>{theta_after, m, v};
    return r;
}

template <typename Real>
BasicElementRecord<Real> adamw_element(Cell<Real>& c, Real g, Real lr, const Scalars<Real>& k, std::size_t t,
                                       std::size_t i) {
    BasicElementRecord<Real> r;
    r.g = g;
    Real shrink = lr * k.weight_decay * c.theta;
    Real theta = c.theta - shrink;
    ensure(theta, t, i, Stage::weight_decay);
    r.decay_applied = -shrink;
    Real m = k.beta1 * c.m + (Real(1) - k.beta1) * g;
    ensure(m, t, i, Stage::first_moment);
    Real g_sq = g * g;
    Real v = k.beta2 * c.second + (Real(1) - k.beta2) * g_sq;
    ensure(v, t, i, Stage::second_moment);
    Real mhat = m / (Real(1) - std::pow(k.beta1, Real(t)));
    Real vhat = v / (Real(1) - std::pow(k.beta2, Real(t)));
    ensure(mhat, t, i, Stage::bias_correction);
    ensure(vhat, t, i, Stage::bias_correction);
    Real update = lr * mhat / (std::sqrt(vhat) + k.eps);
    Real theta_after = theta - update;
    ensure(theta_after, t, i, Stage::parameter_update);

    r.m = m;
    r.second_moment = v;
    r.mbar = m;
    r.mhat = mhat;
    r.shat = vhat;
    r.delta_theta = -update;
    r.theta_after = theta_after;
    c = Cell<Real>{theta_after, m, v};
    return r;
}

template <typename Real>
BasicElementRecord<Real> nadam_element(Cell<Real>& c, Real g, Real lr, const Scalars<Real>& k, std::size_t t,
                                       std::size_t i, bool nesterov) {
    BasicElementRecord<Real> r;
    r.g = g;
    Real m = k.beta1 * c.m + (Real(1) - k.beta1) * g;
    ensure(m, t, i, Stage::first_moment);
    Real g_sq = g * g;
    Real v = k.beta2 * c.second + (Real(1) - k.beta2) * g_sq;
    ensure(v, t, i, Stage::second_moment);
    Real mbar = m;
    if (nesterov) {
        mbar = k.beta1 * m + (Real(1) - k.beta1) * g;
        ensure(mbar, t, i, Stage::nesterov_blend);
    }
    Real mhat = mbar / (Real(1) - std::pow(k.beta1, Real(t)));
    Real vhat = v / (Real(1) - std::pow(k.beta2, Real(t)));
    ensure(mhat, t, i, Stage::bias_correction);
    ensure(vhat, t, i, Stage::bias_correction);
    Real update = lr * mhat / (std::sqrt(vhat) + k.eps);
    Real theta_after = c.theta - update;
    ensure(theta_after, t, i, Stage::parameter_update);

    r.m = m;
    r.second_moment = v;
    r.mbar = mbar;
    r.mhat = mhat;
    r.shat = vhat;
    r.delta_theta = -update;
    r.theta_after = theta_after;
    c = Cell<Real>{theta_after, m, v};
    return r;
}

template <typename Real>
BasicElementRecord<Real> adabelief_element(Cell<Real>& c, Real g, Real lr, const Scalars<Real>& k, std::size_t t,
                                           std::size_t i, const HyperParams& hp) {
    BasicElementRecord<Real> r;
    r.g = g;
    Real theta = c.theta;
    if (hp.decoupled_decay) {
        Real shrink = lr * k.weight_decay * c.theta;
        theta = c.theta - shrink;
        r.decay_applied = -shrink;
        ensure(theta, t, i, Stage::weight_decay);
    }
    Real m = k.beta1 * c.m + (Real(1) - k.beta1) * g;
    ensure(m, t, i, Stage::first_moment);
    Real diff = g - m;
    Real diff_sq = diff * diff;
    Real s;
    if (hp.eps_in_second_moment) {
        s = k.beta2 * c.second + (Real(1) - k.beta2) * diff_sq + k.eps;
    } else {
        s = k.beta2 * c.second + (Real(1) - k.beta2) * diff_sq;
    }
    ensure(s, t, i, Stage::second_moment);
    Real mhat = m / (Real(1) - std::pow(k.beta1, Real(t)));
    Real shat = s / (Real(1) - std::pow(k.beta2, Real(t)));
    ensure(mhat, t, i, Stage::bias_correction);
    ensure(shat, t, i, Stage::bias_correction);
    Real update = lr * mhat / (std::sqrt(shat) + k.eps);
    Real theta_after = theta - update;
    ensure(theta_after, t, i, Stage::parameter_update);

    r.m = m;
    r.second_moment = s;
    r.mbar = m;
    r.mhat = mhat;
    r.shat = shat;
    r.delta_theta = -update;
    r.theta_after = theta_after;
    c = Cell<Real>{theta_after, m, s};
    return r;
}

template <typename Real>
BasicElementRecord<Real> sgdm_element(Cell<Real>& c, Real g, Real lr, const Scalars<Real>& k, std::size_t t,
                                      std::size_t i, const HyperParams& hp) {
    BasicElementRecord<Real> r;
    r.g = g;
    Real mu = k.beta1;
    Real theta = c.theta;
    if (hp.decoupled_decay) {
        Real shrink = lr * k.weight_decay * c.theta;
        theta = c.theta - shrink;
        r.decay_applied = -shrink;
        ensure(theta, t, i, Stage::weight_decay);
    }
    Real m;
    Real direction;
    if (hp.use_nesterov) {
        m = mu * c.m + lr * g;
        ensure(m, t, i, Stage::first_moment);
        direction = mu * m + lr * g;
        ensure(direction, t, i, Stage::nesterov_blend);
    } else {
        m = mu * c.m + g;
        ensure(m, t, i, Stage::first_moment);
        direction = lr * m;
    }
    Real theta_after = theta - direction;
    ensure(theta_after, t, i, Stage::parameter_update);

    r.m = m;
    r.mbar = hp.use_nesterov ? direction : m;
    r.mhat = r.mbar;
    r.delta_theta = -direction;
    r.theta_after = theta_after;
    c = Cell<Real>{theta_after, m, Real(0)};
    return r;
}

} // namespace detail

/// Replays `stream` through `kernel` from `theta0`, with learning rate
/// `lrs[k]` at step k. Pure: identical inputs give identical transcripts.
///
/// Kernel toggles follow the same contract as kernels.hpp.
template <typename Real = double>
std::vector<BasicStepTranscript<Real>> replay(Kernel kernel, const GradientStream& stream,
                                              std::span<const double> theta0, const HyperParams& hp,
                                              std::span<const double> lrs) {
    if (stream.empty()) throw OptimError(ErrorKind::invalid_argument, "replay: empty stream");
    if (lrs.size() != stream.size()) {
        throw OptimError(ErrorKind::dimension_mismatch, "replay: lrs length differs from stream length");
    }
    const std::size_t dim = theta0.size();
    if (dim == 0 || dim > max_dim) throw OptimError(ErrorKind::invalid_argument, "replay: dim must be in [1, 64]");
    for (std::size_t k = 0; k < stream.size(); ++k) {
        if (stream[k].size() != dim) {
            throw OptimError(ErrorKind::dimension_mismatch, "replay: gradient length differs from theta0", k);
        }
    }
    hp.validate();

    const detail::Scalars<Real> scalars(hp);
    std::vector<detail::Cell<Real>> cells(dim);
    for (std::size_t i = 0; i < dim; ++i) cells[i].theta = Real(theta0[i]);

    std::vector<BasicStepTranscript<Real>> out;
    out.reserve(stream.size());
    for (std::size_t k = 0; k < stream.size(); ++k) {
        const std::size_t t = k + 1;
        const Real lr = Real(lrs[k]);
        BasicStepTranscript<Real> step{t, {}};
        step.elements.reserve(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const Real g = Real(stream[k][i]);
            if (!std::isfinite(g)) throw ReplayError(t, i, Stage::first_moment);
            switch (kernel) {
            case Kernel::adaplus:
                step.elements.push_back(detail::adaplus_element(cells[i], g, lr, scalars, t, i, hp));
                break;
            case Kernel::adam: step.elements.push_back(detail::adam_element(cells[i], g, lr, scalars, t, i)); break;
            case Kernel::adamw: step.elements.push_back(detail::adamw_element(cells[i], g, lr, scalars, t, i)); break;
            case Kernel::nadam:
                step.elements.push_back(detail::nadam_element(cells[i], g, lr, scalars, t, i, hp.use_nesterov));
                break;
            case Kernel::adabelief:
                step.elements.push_back(detail::adabelief_element(cells[i], g, lr, scalars, t, i, hp));
                break;
            case Kernel::sgdm:
                step.elements.push_back(detail::sgdm_element(cells[i], g, lr, scalars, t, i, hp));
                break;
            }
        }
        out.push_back(std::move(step));
    }
    return out;
}

} // namespace adaplus::oracle

#endif

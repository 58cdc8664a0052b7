#ifndef ADAPLUS_HYPER_PARAMS_HPP
#define ADAPLUS_HYPER_PARAMS_HPP

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "adaplus/error.hpp"

namespace adaplus {

enum class Kernel { adaplus, adam, adamw, nadam, adabelief, sgdm };

inline constexpr std::array<Kernel, 6> all_kernels{Kernel::adaplus, Kernel::adam,      Kernel::adamw,
                                                   Kernel::nadam,   Kernel::adabelief, Kernel::sgdm};

inline std::string_view to_string(Kernel k) {
    switch (k) {
    case Kernel::adaplus: return "adaplus";
    case Kernel::adam: return "adam";
    case Kernel::adamw: return "adamw";
    case Kernel::nadam: return "nadam";
    case Kernel::adabelief: return "adabelief";
    case Kernel::sgdm: return "sgdm";
    }
    return "unknown";
}

inline std::optional<Kernel> parse_kernel(std::string_view name) {
    for (Kernel k : all_kernels) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

/// Hyper-parameters shared by every kernel.
///
/// The three toggles select which ingredients a kernel applies; each kernel
/// documents which of them it honours. `beta1` doubles as the momentum
/// coefficient for SGDM.
struct HyperParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-2;
    bool use_nesterov = true;
    bool use_belief = true;
    bool decoupled_decay = true;
    /// Adds eps inside the belief recursion every step. Switching it off is
    /// only meant for reduction tests against the v-based kernels.
    bool eps_in_second_moment = true;

    void validate() const {
        auto fail = [](const std::string& msg) { throw OptimError(ErrorKind::invalid_hyper_params, msg); };
        if (!std::isfinite(lr) || lr <= 0.0) fail("lr must be positive and finite");
        if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
        if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
        if (!std::isfinite(eps) || eps < 0.0) fail("eps must be non-negative and finite");
        if (!std::isfinite(weight_decay) || weight_decay < 0.0) fail("weight_decay must be non-negative and finite");
    }

    /// Defaults for a kernel: the toggles are set to that kernel's identity.
    static HyperParams defaults(Kernel k) {
        HyperParams hp;
        switch (k) {
        case Kernel::adaplus: break;
        case Kernel::adam:
            hp.use_nesterov = hp.use_belief = hp.decoupled_decay = false;
            hp.weight_decay = 0.0;
            break;
        case Kernel::adamw:
            hp.use_nesterov = hp.use_belief = false;
            break;
        case Kernel::nadam:
            hp.use_belief = hp.decoupled_decay = false;
            hp.weight_decay = 0.0;
            break;
        case Kernel::adabelief:
            hp.use_nesterov = hp.decoupled_decay = false;
            hp.weight_decay = 0.0;
            break;
        case Kernel::sgdm:
            hp.lr = 0.1;
            hp.use_nesterov = hp.use_belief = hp.decoupled_decay = false;
            hp.weight_decay = 0.0;
            break;
        }
        return hp;
    }
};

} // namespace adaplus

#endif

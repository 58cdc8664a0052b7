#ifndef ADAPLUS_LR_SCHEDULE_HPP
#define ADAPLUS_LR_SCHEDULE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "adaplus/error.hpp"

namespace adaplus {

/// Step decay: the learning rate is multiplied by `decay_factor` at each
/// milestone epoch.
struct LrSchedule {
    std::vector<std::uint64_t> milestones;
    double decay_factor = 0.1;

    void validate() const {
        if (!std::isfinite(decay_factor) || decay_factor <= 0.0) {
            throw OptimError(ErrorKind::invalid_argument, "decay_factor must be positive");
        }
        for (std::size_t i = 0; i < milestones.size(); ++i) {
            if (milestones[i] == 0) throw OptimError(ErrorKind::invalid_argument, "milestones must be positive", i);
            if (i > 0 && milestones[i] <= milestones[i - 1]) {
                throw OptimError(ErrorKind::invalid_argument, "milestones must be strictly increasing", i);
            }
        }
    }
};

/// base_lr * decay_factor^k, k = number of milestones <= epoch.
inline double lr_at(const LrSchedule& schedule, double base_lr, std::uint64_t epoch) {
    const auto passed = std::upper_bound(schedule.milestones.begin(), schedule.milestones.end(), epoch) -
                        schedule.milestones.begin();
    return base_lr * std::pow(schedule.decay_factor, static_cast<double>(passed));
}

} // namespace adaplus

#endif

#ifndef ADAPLUS_STATE_HPP
#define ADAPLUS_STATE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "adaplus/error.hpp"

namespace adaplus {

namespace detail {
struct KernelAccess;
}

/// Flat parameter vector. Every entry is finite at all times.
class ParamVector {
public:
    explicit ParamVector(std::size_t dim) : values_(dim, 0.0) {
        if (dim == 0) throw OptimError(ErrorKind::invalid_argument, "parameter dimension must be positive");
    }

    explicit ParamVector(std::span<const double> values) : ParamVector(values.size()) { assign(values); }

    ParamVector(std::initializer_list<double> values)
        : ParamVector(std::span<const double>(values.begin(), values.size())) {}

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Replaces all values. Rejects wrong lengths and non-finite entries
    /// without modifying the vector.
    void assign(std::span<const double> values) {
        if (values.size() != values_.size()) {
            throw OptimError(ErrorKind::dimension_mismatch, "assign: length differs from parameter dimension");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) {
                throw OptimError(ErrorKind::non_finite_parameter, "assign: non-finite value", i);
            }
        }
        values_.assign(values.begin(), values.end());
    }

private:
    friend struct detail::KernelAccess;
    std::vector<double> values_;
};

/// Per-parameter optimizer memory: first-moment EMA `m`, second-moment
/// EMA (s for belief kernels, v otherwise; unused by SGDM) and the step
/// counter. All vectors keep length `dim()`.
class OptimizerState {
public:
    explicit OptimizerState(std::size_t dim) : m_(dim, 0.0), second_moment_(dim, 0.0) {
        if (dim == 0) throw OptimError(ErrorKind::invalid_argument, "state dimension must be positive");
    }

    std::size_t dim() const noexcept { return m_.size(); }
    std::uint64_t t() const noexcept { return t_; }
    std::span<const double> m() const noexcept { return m_; }
    std::span<const double> second_moment() const noexcept { return second_moment_; }

private:
    friend struct detail::KernelAccess;
    std::uint64_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> second_moment_;
};

namespace detail {

struct KernelAccess {
    static std::vector<double>& values(ParamVector& p) { return p.values_; }
    static std::vector<double>& m(OptimizerState& s) { return s.m_; }
    static std::vector<double>& second_moment(OptimizerState& s) { return s.second_moment_; }
    static std::uint64_t& t(OptimizerState& s) { return s.t_; }
};

} // namespace detail
} // namespace adaplus

#endif

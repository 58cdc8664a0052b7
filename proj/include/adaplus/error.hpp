#ifndef ADAPLUS_ERROR_HPP
#define ADAPLUS_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace adaplus {

enum class ErrorKind {
    invalid_hyper_params,
    dimension_mismatch,
    non_finite_gradient,
    non_finite_parameter,
    invalid_argument,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_hyper_params: return "invalid_hyper_params";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::non_finite_gradient: return "non_finite_gradient";
    case ErrorKind::non_finite_parameter: return "non_finite_parameter";
    case ErrorKind::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

/// Error raised by the optimizer kernels, problems and schedule code.
/// `index()` names the offending element when the failure is element-local.
class OptimError : public std::runtime_error {
public:
    OptimError(ErrorKind kind, const std::string& what, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what +
                             (index ? " (index " + std::to_string(*index) + ")" : std::string())),
          kind_(kind), index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

} // namespace adaplus

#endif

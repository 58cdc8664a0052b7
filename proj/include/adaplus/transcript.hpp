#ifndef ADAPLUS_TRANSCRIPT_HPP
#define ADAPLUS_TRANSCRIPT_HPP

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "adaplus/error.hpp"

namespace adaplus {

/// Every intermediate of one element's update, in execution order.
///
/// For v-based kernels `second_moment`/`shat` hold v and v-hat. For SGDM
/// `m` is the momentum buffer, `mbar` the applied direction and the
/// second-moment fields are zero.
template <typename Real>
struct BasicElementRecord {
    Real g{};
    Real m{};
    Real second_moment{};
    Real mbar{};
    Real mhat{};
    Real shat{};
    Real decay_applied{}; // increment from decoupled weight decay
    Real delta_theta{};   // increment from the adaptive update
    Real theta_after{};
};

template <typename Real>
struct BasicStepTranscript {
    std::uint64_t t = 0;
    std::vector<BasicElementRecord<Real>> elements;
};

using ElementRecord = BasicElementRecord<double>;
using StepTranscript = BasicStepTranscript<double>;

// Fixture format: one line per (step, element),
//   t idx g m s mbar mhat shat dtheta theta
// with 17 significant digits. decay_applied is not part of the format.

template <typename Real>
void write_fixture(std::ostream& out, const std::vector<BasicStepTranscript<Real>>& transcripts) {
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out << buf;
    };
    for (const auto& step : transcripts) {
        for (std::size_t i = 0; i < step.elements.size(); ++i) {
            const auto& e = step.elements[i];
            out << step.t << ' ' << i;
            put(static_cast<double>(e.g));
            put(static_cast<double>(e.m));
            put(static_cast<double>(e.second_moment));
            put(static_cast<double>(e.mbar));
            put(static_cast<double>(e.mhat));
            put(static_cast<double>(e.shat));
            put(static_cast<double>(e.delta_theta));
            put(static_cast<double>(e.theta_after));
            out << '\n';
        }
    }
}

/// Parses a fixture. Lines starting with '#' and blank lines are skipped.
/// Records must be grouped by step and numbered 0..dim-1 within a step.
inline std::vector<StepTranscript> read_fixture(std::istream& in) {
    std::vector<StepTranscript> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::uint64_t t = 0;
        std::size_t idx = 0;
        ElementRecord e;
        if (!(ls >> t >> idx >> e.g >> e.m >> e.second_moment >> e.mbar >> e.mhat >> e.shat >> e.delta_theta >>
              e.theta_after)) {
            throw OptimError(ErrorKind::invalid_argument, "malformed fixture line " + std::to_string(lineno));
        }
        if (out.empty() || out.back().t != t) {
            out.push_back(StepTranscript{t, {}});
        }
        if (idx != out.back().elements.size()) {
            throw OptimError(ErrorKind::invalid_argument,
                             "fixture element index out of order on line " + std::to_string(lineno));
        }
        out.back().elements.push_back(e);
    }
    return out;
}

} // namespace adaplus

#endif

#pragma once

#include <stdexcept>
#include <string>

namespace certsens {

/// Thrown when a time-stepping scheme produces non-finite or runaway values.
class SolverDiverged : public std::runtime_error {
public:
    explicit SolverDiverged(const std::string& what) : std::runtime_error(what) {}
};

/// Snapshot set cannot support the requested basis dimension.
class RankDeficient : public std::runtime_error {
public:
    explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

/// Accumulated state-error bound exceeded its cap; certification is useless
/// at this parameter, though not incorrect.
class BoundBlowup : public std::runtime_error {
public:
    explicit BoundBlowup(const std::string& what) : std::runtime_error(what) {}
};

/// Variance estimate in the Sobol denominator is numerically zero.
class DegenerateVariance : public std::runtime_error {
public:
    explicit DegenerateVariance(const std::string& what) : std::runtime_error(what) {}
};

/// The guaranteed denominator interval contains zero; sandwich bounds are
/// unbounded.
class DenominatorStraddlesZero : public std::runtime_error {
public:
    explicit DenominatorStraddlesZero(const std::string& what) : std::runtime_error(what) {}
};

/// Precision-model regression found no decay in the metamodel error.
class FitFailed : public std::runtime_error {
public:
    explicit FitFailed(const std::string& what) : std::runtime_error(what) {}
};

/// No integer basis size makes the metamodel error term smaller than the
/// precision target.
class InfeasibleRounding : public std::runtime_error {
public:
    explicit InfeasibleRounding(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed configuration or command-line input.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace certsens

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gpbo {

/// Violated precondition (dimension mismatch, negative distance, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Covariance factorization failed even at the top of the jitter ladder.
/// Carries the diagonal inflations that were attempted, for diagnostics.
class IllConditionedCovariance : public std::runtime_error {
public:
    IllConditionedCovariance(std::string what, std::vector<double> attempted)
        : std::runtime_error(std::move(what)), attempted_jitter(std::move(attempted)) {}

    std::vector<double> attempted_jitter;
};

} // namespace gpbo

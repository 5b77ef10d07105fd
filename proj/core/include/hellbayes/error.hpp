#pragma once

#include <stdexcept>
#include <string>

namespace hellbayes {

/// Parameter vector outside the family's parameter space.
class ParameterDomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration, contract violation on inputs, or malformed input files.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A density evaluator returned a negative or non-finite value.
class EvaluatorContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature range does not cover enough of the densities involved.
class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure inside a sampler or optimizer.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hellbayes

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nsrps {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// The data cannot support the request (k > n, sequence shorter than 2, ...).
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// A substitution rule that is inconsistent with the alphabet bookkeeping.
class InvalidRuleError : public Error {
public:
    using Error::Error;
};

// mu puts mass on a block to which nu assigns probability zero (strict policy).
// Carries the offending block and, when raised inside an NSRPS run, the step.
class DominationError : public Error {
public:
    DominationError(const std::string& what, std::string block, long step = -1)
        : Error(what), block_(std::move(block)), step_(step) {}

    const std::string& block() const noexcept { return block_; }
    long step() const noexcept { return step_; }  // -1 when outside a run

private:
    std::string block_;
    long step_;
};

// Bad model files, non-stochastic rows, reducible chains, non-convergence.
class ModelError : public Error {
public:
    using Error::Error;
};

}  // namespace nsrps

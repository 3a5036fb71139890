#pragma once

#include <stdexcept>
#include <string>

namespace sksv {

/// Invalid argument or precondition violation (bad eps, index out of range, unsorted input).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An edge update with u == v.
class SelfLoopError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A graph stream whose final edge weights are not all nonnegative.
class WellFormednessError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Non-finite input to, or non-convergence of, a dense factorization.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dense materialization would exceed its memory budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Corrupt or truncated persisted state, or a malformed stream record.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two sketch states built from different configurations.
class IncompatibleStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sksv

#pragma once

#include <stdexcept>
#include <string>

namespace abnet {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input documents. The CLI maps these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

class SchemaError : public InputError {
public:
    using InputError::InputError;
};

class ReferenceError : public InputError {
public:
    using InputError::InputError;
};

class DuplicateError : public InputError {
public:
    using InputError::InputError;
};

/// Well-formed input on which a domain operation cannot proceed (exit code 1).
class DomainError : public Error {
public:
    using Error::Error;
};

#define ABNET_DOMAIN_ERROR(Name)          \
    class Name : public DomainError {     \
    public:                               \
        using DomainError::DomainError;   \
    }

ABNET_DOMAIN_ERROR(UnknownRule);
ABNET_DOMAIN_ERROR(EnvironmentError);
ABNET_DOMAIN_ERROR(NonConvergence);
ABNET_DOMAIN_ERROR(MissingDetection);
ABNET_DOMAIN_ERROR(StackExhausted);
ABNET_DOMAIN_ERROR(OdometerMismatch);
ABNET_DOMAIN_ERROR(NotLegal);
ABNET_DOMAIN_ERROR(NotStabilizing);
ABNET_DOMAIN_ERROR(AlreadyStable);
ABNET_DOMAIN_ERROR(ExcursionBudgetExceeded);
ABNET_DOMAIN_ERROR(NotSupercritical);
ABNET_DOMAIN_ERROR(SearchExhausted);
ABNET_DOMAIN_ERROR(InvalidQuantity);

#undef ABNET_DOMAIN_ERROR

/// Environment chain whose transition digraph is not strongly connected.
class ReducibleChain : public EnvironmentError {
public:
    using EnvironmentError::EnvironmentError;
};

/// Irreducible environment chain with period greater than one.
class PeriodicChain : public EnvironmentError {
public:
    using EnvironmentError::EnvironmentError;
};

}  // namespace abnet

#pragma once

#include <stdexcept>
#include <string>

namespace tale {

/// Input outside the domain of an operation (bad point, bad group, violated precondition).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension or configuration the toolkit does not implement.
class UnsupportedError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A numerical certificate (spread, monitor, residual) came out beyond its tolerance.
class CertificateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed command line or spec string.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tale

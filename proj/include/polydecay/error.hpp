#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polydecay {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A configuration document failed schema validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A sample generator produced NaN or infinity.
class NonFiniteSample : public Error {
public:
    NonFiniteSample(std::size_t node, const std::string& what)
        : Error(what), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// A symbol failed the global ellipticity test; carries the frequency where
/// the normalized modulus was smallest.
class NonEllipticError : public PreconditionError {
public:
    NonEllipticError(double witness, double infimum, const std::string& what)
        : PreconditionError(what), witness_(witness), infimum_(infimum) {}
    double witness() const noexcept { return witness_; }
    double infimum() const noexcept { return infimum_; }

private:
    double witness_;
    double infimum_;
};

/// A quantity is undefined for the given input (zero norm, empty window...).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

}  // namespace polydecay

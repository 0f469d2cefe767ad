#pragma once

#include <stdexcept>
#include <string>

namespace hermitia {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mismatched dimensions or truncation orders.
class StructuralError : public Error {
public:
    using Error::Error;
};

// A derivative was requested from a jet of order 0.
class OrderExhausted : public Error {
public:
    using Error::Error;
};

class SingularSeries : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class HermitianConstraintError : public Error {
public:
    using Error::Error;
};

class PositivityError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class IncompatibleFlavor : public Error {
public:
    using Error::Error;
};

}  // namespace hermitia

#pragma once

#include <stdexcept>
#include <string>

namespace mcomp {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON or DSL text that cannot be read at all).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A metamodel document that parses but violates metamodel invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Runtime composition failures. The CLI maps all of these to exit code 2.
class CompositionError : public Error {
public:
    using Error::Error;
};

class AmbiguityError : public CompositionError {
public:
    using CompositionError::CompositionError;
};

class UnresolvedEquivalentError : public CompositionError {
public:
    using CompositionError::CompositionError;
};

class EvaluationError : public CompositionError {
public:
    using CompositionError::CompositionError;
};

class CallError : public CompositionError {
public:
    using CompositionError::CompositionError;
};

/// Raised when an execution log violates an invariant the engine guarantees.
class IntegrityError : public CompositionError {
public:
    using CompositionError::CompositionError;
};

class WeaveError : public Error {
public:
    using Error::Error;
};

class QueryError : public Error {
public:
    using Error::Error;
};

}  // namespace mcomp

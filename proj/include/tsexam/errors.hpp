#pragma once

#include <stdexcept>
#include <string>

namespace tsexam {

// Base class for all errors raised by the library. Subclasses map to the
// distinct failure families surfaced by the CLI exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid generator/fit/run configuration (bad parameters, malformed specs).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A numeric operation produced a non-finite value; message names the stage.
class NumericError : public Error {
public:
    using Error::Error;
};

// Component length mismatch or other composition-tree violation.
class CompositionError : public Error {
public:
    using Error::Error;
};

// Index or window outside the series bounds.
class RangeError : public Error {
public:
    using Error::Error;
};

// Regression design matrix singular or otherwise unusable input.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Template or exam file failed schema/invariant checks on load.
class LoadError : public Error {
public:
    using Error::Error;
};

// Exam assembly could not satisfy the distribution spec.
class AssemblyError : public Error {
public:
    using Error::Error;
};

// Response file import failed (unknown item, duplicate response, bad schema).
class ImportError : public Error {
public:
    using Error::Error;
};

// Refinement loop cannot proceed (dimension mismatch, empty score set).
class RefinementError : public Error {
public:
    using Error::Error;
};

// Requested capability the endpoint does not declare (e.g. image input).
class CapabilityError : public Error {
public:
    using Error::Error;
};

// Credential could not be resolved from the environment.
class CredentialError : public Error {
public:
    using Error::Error;
};

// Filesystem failure, annotated with the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

// Request could not be delivered (connection refused, timeout, retries
// exhausted, non-success HTTP status).
class TransportError : public Error {
public:
    using Error::Error;
};

// The service answered but the reply does not match the documented
// chat-completion shape.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// A command's runtime precondition is unmet (e.g. refinement without enough
// candidates and no simulated population).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace tsexam

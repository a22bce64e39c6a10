#pragma once

#include <stdexcept>
#include <string>

namespace splatgraph {

// Error taxonomy shared by the library and the C boundary. Every failure that
// crosses a module boundary is one of these; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input bytes (PLY/JSON/config). Message carries line/field context.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Structurally well-formed input that violates a documented invariant.
// Message names the invariant and the offending entity.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Lookup of an id (object, gaussian, node) that does not exist.
class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& msg) : Error(msg) {}
};

// View optimization could not produce a usable pose (e.g. object never seen).
class OptimizationError : public Error {
public:
    explicit OptimizationError(const std::string& msg) : Error(msg) {}
};

// Relation-inference backend failed after retries. Carries region context.
class BackendError : public Error {
public:
    explicit BackendError(const std::string& msg) : Error(msg) {}
};

}  // namespace splatgraph

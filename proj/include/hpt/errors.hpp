#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hpt {

/// Coarse failure category, used by the CLI to pick an exit code.
enum class ErrorKind {
    input,       // malformed input: files, labels, preconditions on user data
    math,        // a checked mathematical hypothesis fails, with a witness
    nilpotency,  // a perturbation series does not terminate within the cap
    internal,    // a theorem-backed postcondition failed: implementation bug
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct SpaceMismatch : Error {
    explicit SpaceMismatch(const std::string& w) : Error(ErrorKind::input, w) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& w) : Error(ErrorKind::input, w) {}
};

struct DegreeError : Error {
    explicit DegreeError(const std::string& w) : Error(ErrorKind::input, w) {}
};

struct PreconditionFailed : Error {
    explicit PreconditionFailed(const std::string& w) : Error(ErrorKind::input, w) {}
};

struct MorphismInvalid : Error {
    explicit MorphismInvalid(const std::string& w) : Error(ErrorKind::input, w) {}
};

/// A series (h∂)^n or (∂h)^n failed to vanish within the iteration cap.
/// Carries the basis vector whose orbit did not terminate.
struct NotLocallyNilpotent : Error {
    NotLocallyNilpotent(const std::string& w, std::string witness)
        : Error(ErrorKind::nilpotency, w), witness_(std::move(witness)) {}
    const std::string& witness() const { return witness_; }

private:
    std::string witness_;
};

struct NotAPerturbation : Error {
    NotAPerturbation(const std::string& w, std::string witness)
        : Error(ErrorKind::math, w), witness_(std::move(witness)) {}
    const std::string& witness() const { return witness_; }

private:
    std::string witness_;
};

/// One of the relative-transfer hypotheses broke; `which` names it.
struct HypothesisFailed : Error {
    HypothesisFailed(std::string which, const std::string& w, std::string witness)
        : Error(ErrorKind::math, w), which_(std::move(which)), witness_(std::move(witness)) {}
    const std::string& which() const { return which_; }
    const std::string& witness() const { return witness_; }

private:
    std::string which_;
    std::string witness_;
};

struct NotACodifferential : Error {
    NotACodifferential(const std::string& w, std::string witness)
        : Error(ErrorKind::math, w), witness_(std::move(witness)) {}
    const std::string& witness() const { return witness_; }

private:
    std::string witness_;
};

/// An identity that holds by theorem failed in exact arithmetic.
struct InternalAssertion : Error {
    explicit InternalAssertion(const std::string& w) : Error(ErrorKind::internal, w) {}
};

struct ParseError : Error {
    ParseError(int line, const std::string& w)
        : Error(ErrorKind::input, "line " + std::to_string(line) + ": " + w), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct SemanticError : Error {
    explicit SemanticError(const std::string& w) : Error(ErrorKind::input, w) {}
};

}  // namespace hpt

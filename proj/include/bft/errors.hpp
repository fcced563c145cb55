#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace bft {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Rejected input: malformed frames, mass assignments, specs, or parameters.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Operands live on different frames of discernment, or a subset mask
/// references elements outside the frame.
class FrameMismatchError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

/// A combination rule could not produce a normalized result.
class RuleError : public Error {
  public:
    using Error::Error;
};

/// The rule's normalizer 1 - lambda*K vanished (fully conflicting sources).
class TotalConflictError : public RuleError {
  public:
    explicit TotalConflictError(const std::string& what,
                                std::optional<std::size_t> step = std::nullopt)
        : RuleError(what), step_(step) {}

    /// Index of the source whose fold failed, when raised inside a
    /// sequential fusion; empty for a plain binary combination.
    std::optional<std::size_t> step() const noexcept { return step_; }

  private:
    std::optional<std::size_t> step_;
};

}  // namespace bft

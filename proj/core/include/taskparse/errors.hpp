#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace taskparse {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Raised while reading a linearized parse or a data file.  `position` is a
// character offset into the offending line unless noted otherwise.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " (at offset " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

enum class Severity { kWarning, kError };

// One finding produced while validating a schema bundle or building a
// decoding table.  `subject` names the intent, slot, or file the finding is
// about so callers can report it without string-parsing `message`.
struct Diagnostic {
    Severity severity = Severity::kError;
    std::string subject;
    std::string message;
};

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) {
        if (d.severity == Severity::kError) return true;
    }
    return false;
}

// Raised when a bundle fails validation.  Carries the full diagnostic list.
class BundleError : public Error {
public:
    BundleError(const std::string& message, std::vector<Diagnostic> diags)
        : Error(message + "\n" + format_diagnostics(diags)),
          diagnostics_(std::move(diags)) {}

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace taskparse

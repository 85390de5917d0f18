#pragma once

#include <stdexcept>
#include <string>

namespace segbias {

// Input errors map to CLI exit code 2, internal errors to 1.
enum class ErrorKind { input, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

    static Error input(const std::string& message) { return Error(ErrorKind::input, message); }
    static Error internal(const std::string& message) { return Error(ErrorKind::internal, message); }

private:
    ErrorKind kind_;
};

}  // namespace segbias

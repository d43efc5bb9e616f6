#pragma once

#include <stdexcept>
#include <string>

namespace amput {

enum class ErrorKind {
    invalid_params,
    no_convergence,
    domain_error,
    pole_error,
    degenerate_level,
    out_of_domain,
    io_error,
};

/// Exception carrying a machine-readable category; the CLI maps it to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

}  // namespace amput

#pragma once

#include <stdexcept>
#include <string>

namespace decolab {

// Exit codes used by the command-line front end. Library code throws the
// matching exception type; the CLI maps it back to a status.
enum class ExitCode : int {
    success = 0,
    config_error = 2,
    verification_failure = 3,
    non_convergence = 4,
};

// Bad caller input: dimension mismatches, invalid states, malformed
// configuration. The message names the offending field when one exists.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its stated tolerance (quadrature,
// eigendecomposition, truncation convergence, ill-conditioned fit).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration rejected by the CLI schema. `path` is the dotted field path.
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string path, const std::string& what)
        : InvalidArgument(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace decolab

#pragma once

#include <stdexcept>
#include <string>

namespace fission {

/// Broad failure category. The CLI maps each kind to its own exit code.
enum class ErrorKind { io, validation, algorithm };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Bad input: malformed data, violated preconditions, out-of-range parameters.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// The algorithm itself could not produce a result (e.g. over-denoising).
class AlgorithmError : public Error {
public:
    explicit AlgorithmError(const std::string& what) : Error(ErrorKind::algorithm, what) {}
};

} // namespace fission

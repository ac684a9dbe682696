#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlch {

/// Malformed or invalid configuration. Carries the offending key or line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string key = {}, std::size_t line = 0)
        : std::runtime_error(what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string key_;
    std::size_t line_;
};

/// Failure inside a time step (non-convergence, NaN, broken invariant).
/// `last_iterate` is the most recent nodal phi the solver held.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> last_iterate = {},
                double residual = 0.0)
        : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double residual() const noexcept { return residual_; }

private:
    std::vector<double> last_iterate_;
    double residual_;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::string path)
        : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace nlch

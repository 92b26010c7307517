#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rankdiv {

/// Violated precondition or out-of-range argument on otherwise valid data.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unusable input data (I/O failure, malformed file under strict mode).
/// Carries file/offset context when available.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}

    DataError(const std::string& msg, std::string file, std::size_t line)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_ = 0;
};

/// Numerical optimization failed to converge. Keeps the best iterate so
/// callers can inspect how far the fit got.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& msg, std::vector<double> best_params,
             double best_value, std::size_t iterations)
        : std::runtime_error(msg),
          best_params_(std::move(best_params)),
          best_value_(best_value),
          iterations_(iterations) {}

    const std::vector<double>& best_params() const noexcept { return best_params_; }
    double best_value() const noexcept { return best_value_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::vector<double> best_params_;
    double best_value_;
    std::size_t iterations_;
};

}  // namespace rankdiv

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cayley {

enum class ErrorCategory {
    dimension,
    singular,
    rank_deficient,
    line_search,
    config,
    io,
    invalid_argument,
};

std::string_view category_name(ErrorCategory category) noexcept;

// Every failure raised by the library carries a category so the CLI can print
// a single machine-parseable line.
class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string &message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

  private:
    ErrorCategory category_;
};

class SingularMatrixError : public Error {
  public:
    SingularMatrixError(const std::string &message, double pivot_magnitude)
        : Error(ErrorCategory::singular, message), pivot_magnitude_(pivot_magnitude) {}

    double pivot_magnitude() const noexcept { return pivot_magnitude_; }

  private:
    double pivot_magnitude_;
};

}  // namespace cayley

#pragma once

#include <stdexcept>
#include <string>

namespace supertroesch {

enum class ErrorKind {
    DimensionMismatch,
    Domain,
    Budget,
    Verification,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& what) { throw Error(ErrorKind::Domain, what); }
[[noreturn]] inline void throw_internal(const std::string& what) { throw Error(ErrorKind::Internal, what); }

class BudgetError : public Error {
public:
    BudgetError(const std::string& what, long long dimension, long long budget)
        : Error(ErrorKind::Budget, what), dimension_(dimension), budget_(budget) {}
    long long dimension() const noexcept { return dimension_; }
    long long budget() const noexcept { return budget_; }

private:
    long long dimension_;
    long long budget_;
};

}  // namespace supertroesch

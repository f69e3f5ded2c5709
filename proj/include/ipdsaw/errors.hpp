#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ipdsaw {

// Argument outside the admissible domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Iterative solver stopped without meeting its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A work or memory budget was exceeded.
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, std::uint64_t spent)
        : std::runtime_error(what), spent_(spent) {}
    std::uint64_t spent() const noexcept { return spent_; }

private:
    std::uint64_t spent_;
};

}  // namespace ipdsaw

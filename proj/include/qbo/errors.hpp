#pragma once

#include <stdexcept>
#include <string>

namespace qbo {

// Inputs that violate a documented invariant (bad sums, negative weights,
// malformed permutations, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Two objects of different ambient dimension were combined.
class DimensionMismatch : public std::invalid_argument {
public:
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// A request exceeded an enumeration or iteration budget.
class BudgetError : public std::invalid_argument {
public:
    explicit BudgetError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace qbo

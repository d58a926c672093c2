#pragma once

#include <stdexcept>
#include <string>

namespace polariton {

// Input outside the mathematical domain of an operation (non-positive frequency, length, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed structured input: dimension mismatch, duplicated labels, bad CSV/JSON.
class StructureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The metric-weighted dynamical matrix has complex eigenvalues.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A polariton branch collapsed to (numerically) zero frequency.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Root bracketing of the secular equation failed.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Truncated Fock basis would exceed the size guard.
class BasisSizeError : public std::length_error {
public:
    BasisSizeError(const std::string& what, int suggested_cutoff)
        : std::length_error(what), suggested_cutoff_(suggested_cutoff) {}
    int suggested_cutoff() const noexcept { return suggested_cutoff_; }

private:
    int suggested_cutoff_;
};

// Optimization setup is ill-posed (non-identifiable parameter mask, empty table).
class IdentifiabilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace polariton

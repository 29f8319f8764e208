#pragma once

#include <stdexcept>
#include <string>

namespace vamp {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (files, dimensions, parameters).
class data_error : public error {
public:
    explicit data_error(const std::string& what) : error(what) {}
};

/// Numerical failure: singular matrices, degenerate spectra, diverging
/// simulations.
class numerical_error : public error {
public:
    explicit numerical_error(const std::string& what) : error(what) {}
};

/// Projected test covariance is singular, so the subspace validation score
/// cannot be computed reliably. Reported as its own type so callers (e.g.
/// cross-validation) can score the cell as -inf and continue.
class singular_test_covariance : public numerical_error {
public:
    explicit singular_test_covariance(const std::string& what) : numerical_error(what) {}
};

} // namespace vamp

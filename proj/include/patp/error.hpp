#pragma once

#include <stdexcept>
#include <string>

namespace patp {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required moment diverges for the distribution (e.g. Cauchy).
class non_finite_moment : public error {
public:
    using error::error;
};

/// F2 is singular or its condition number exceeds the cap.
class singular_system : public error {
public:
    using error::error;
};

/// 0/0 in the closed-form g2 ratio (the alpha = 1/2 collapse).
class degenerate_ratio : public error {
public:
    using error::error;
};

class small_sample : public error {
public:
    using error::error;
};

class non_finite_input : public error {
public:
    using error::error;
};

/// Arithmetic failure that is not covered by a more specific type
/// (negative denominators, quadrature non-convergence, bracket failure).
class numeric_error : public error {
public:
    using error::error;
};

/// Bad argument or configuration value.
class invalid_argument : public error {
public:
    using error::error;
};

}  // namespace patp

#pragma once

#include <stdexcept>
#include <string>

namespace shar {

/// An argument violates an operation's precondition (out-of-range K, df <= 0, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The data cannot support the statistic: zero variance, all-zero residuals.
class degenerate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or missing user input (files, columns, flags).
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_domain(const std::string& what) { throw domain_error(what); }

}  // namespace detail

}  // namespace shar

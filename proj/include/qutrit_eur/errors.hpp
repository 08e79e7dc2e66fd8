#pragma once

#include <stdexcept>
#include <string>

namespace qutrit_eur {

// Base for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class non_hermitian_input : public error {
public:
    explicit non_hermitian_input(const std::string& what) : error("non-Hermitian input: " + what) {}
};

class invalid_state : public error {
public:
    explicit invalid_state(const std::string& what) : error("invalid state: " + what) {}
};

// Raised when closed-form eigenvalues are negative or do not sum to one,
// i.e. the (alpha, beta) pair is outside the physically attainable set.
class spectrum_invalid : public error {
public:
    explicit spectrum_invalid(const std::string& what) : error("invalid spectrum: " + what) {}
};

class horizon_exceeded : public error {
public:
    explicit horizon_exceeded(const std::string& what) : error("horizon exceeded: " + what) {}
};

} // namespace qutrit_eur

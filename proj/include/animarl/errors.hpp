#ifndef ANIMARL_ERRORS_HPP
#define ANIMARL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace animarl {

// Caller broke a documented precondition.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Input data was numerically or structurally invalid.
class InvalidStateError : public std::runtime_error {
public:
    explicit InvalidStateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Locomotion parameter estimation could not produce a fit.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A statistical routine received a degenerate sample.
class DegenerateSampleError : public std::runtime_error {
public:
    explicit DegenerateSampleError(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be read, written, or parsed.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// File parsed but does not match the expected schema/version.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Gradient or loss became non-finite.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace animarl

#endif

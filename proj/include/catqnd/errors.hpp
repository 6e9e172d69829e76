#pragma once

#include <stdexcept>
#include <string>

namespace catqnd {

// Base of every error thrown by the library. The CLI maps ValidationError,
// DispersiveRegimeError and ResonanceError to exit code 2, everything else to 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DispersiveRegimeError : public Error {
public:
    using Error::Error;
};

class StiffnessError : public Error {
public:
    using Error::Error;
};

class ResonanceError : public Error {
public:
    ResonanceError(int la, int lb, double detuning)
        : Error("near-resonant term (l_a=" + std::to_string(la) + ", l_b=" + std::to_string(lb) +
                "), |l_a w_a - l_b w_b| = " + std::to_string(detuning) + " rad/s"),
          l_a(la), l_b(lb) {}
    int l_a;
    int l_b;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double res) : Error(what), residual(res) {}
    double residual;
};

class FitQualityError : public Error {
public:
    FitQualityError(const std::string& what, double r_squared) : Error(what), r2(r_squared) {}
    double r2;
};

}  // namespace catqnd

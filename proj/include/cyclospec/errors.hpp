#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cyclospec {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad indices, out-of-range arguments, structurally invalid requests.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Integration/scan failures; carries the spectral parameter and edge involved.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, cplx lambda, int edge)
        : Error(what + " [lambda=(" + std::to_string(lambda.real()) + "," +
                std::to_string(lambda.imag()) + "), edge=" + std::to_string(edge) + "]"),
          lambda_(lambda), edge_(edge) {}
    cplx lambda() const { return lambda_; }
    int edge() const { return edge_; }
private:
    cplx lambda_;
    int edge_;
};

// Evaluation of a Weyl entry at (or too close to) a zero of Delta_skk.
class PoleError : public Error {
public:
    PoleError(const std::string& what, int k) : Error(what), k_(k) {}
    int orderIndex() const { return k_; }
private:
    int k_;
};

class InconsistentDataError : public Error {
public:
    explicit InconsistentDataError(const std::string& what) : Error(what) {}
};

class ReconstructionUnstableError : public Error {
public:
    explicit ReconstructionUnstableError(const std::string& what) : Error(what) {}
};

class IncompleteScanError : public Error {
public:
    explicit IncompleteScanError(const std::string& what) : Error(what) {}
};

class UnsupportedConfigurationError : public Error {
public:
    explicit UnsupportedConfigurationError(const std::string& what) : Error(what) {}
};

class NonConvergenceError : public Error {
public:
    explicit NonConvergenceError(const std::string& what) : Error(what) {}
};

} // namespace cyclospec

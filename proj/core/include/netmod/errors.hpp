#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace netmod {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a domain invariant (e.g. a non-positive weight).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Caller broke a precondition (dimension mismatch, even fixture size, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Request outside the supported domain (p = 1, Laplacian on a directed graph, ...).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Grounded Laplacian is singular, i.e. the graph is disconnected.
class SingularError : public Error {
public:
    using Error::Error;
};

/// The family has no object at all for the requested query (t unreachable, ...).
class NoObjectError : public Error {
public:
    using Error::Error;
};

/// Dual ascent stopped before the duality gap closed.
class IterationLimitError : public Error {
public:
    IterationLimitError(const std::string& what, double gap) : Error(what), gap_(gap) {}
    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

/// The p = 2 active block became numerically singular; `rows()` lists the offending rows.
class DegenerateActiveSetError : public Error {
public:
    DegenerateActiveSetError(const std::string& what, std::vector<std::size_t> rows)
        : Error(what), rows_(std::move(rows)) {}
    const std::vector<std::size_t>& rows() const noexcept { return rows_; }

private:
    std::vector<std::size_t> rows_;
};

/// Outer constraint generation hit its iteration cap. Bounds are those of the last iterate.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double lower, double upper)
        : Error(what), lower_(lower), upper_(upper) {}
    double lower_bound() const noexcept { return lower_; }
    double upper_bound() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

/// Brute-force enumeration refused because the instance exceeds the configured cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

/// A minimal-subfamily certificate could not be established.
class CertificationError : public Error {
public:
    using Error::Error;
};

}  // namespace netmod

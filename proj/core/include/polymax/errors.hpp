#pragma once

#include <stdexcept>
#include <string>

namespace polymax {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Raised when a raw tensor carries a repeated-index entry and dropping is not allowed.
class DiagonalEntryError : public Error {
public:
    using Error::Error;
};

class UnsupportedDegreeError : public Error {
public:
    using Error::Error;
};

// Monomial basis (or SDP block set) exceeds the configured size cap.
class SizeCapError : public Error {
public:
    SizeCapError(const std::string& msg, std::size_t computed_size)
        : Error(msg + " (computed size " + std::to_string(computed_size) + ")"),
          size(computed_size) {}
    std::size_t size;
};

// A monomial cannot be split into two basis elements inside a common PSD block.
class BasisCoverageError : public Error {
public:
    using Error::Error;
};

class DegreeOverflowError : public Error {
public:
    using Error::Error;
};

// pE[r] fell below the reweighting tolerance; caller must fall back.
class DegenerateReweightError : public Error {
public:
    using Error::Error;
};

class InvalidMomentError : public Error {
public:
    using Error::Error;
};

class RoundingError : public Error {
public:
    using Error::Error;
};

class ExtractionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace polymax

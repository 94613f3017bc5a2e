#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aeb {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV content. `line()` is the 1-based data row (header excluded).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public Error { using Error::Error; };
class InsufficientDataError : public Error { using Error::Error; };
class WindowError : public Error { using Error::Error; };
class ArgumentError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class DegenerateDataError : public Error { using Error::Error; };
class InputError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class RankError : public Error { using Error::Error; };

/// Bad bytes on the wire or in a model file.
class FormatError : public Error { using Error::Error; };

class UnsupportedVersionError : public FormatError {
public:
    explicit UnsupportedVersionError(unsigned version);
    unsigned version() const noexcept { return version_; }

private:
    unsigned version_;
};

/// The wire precision cannot represent a residual within the requested bound.
class PrecisionError : public Error { using Error::Error; };

}  // namespace aeb

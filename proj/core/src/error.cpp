#include "aeb/error.hpp"

namespace aeb {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

UnsupportedVersionError::UnsupportedVersionError(unsigned version)
    : FormatError("unsupported model file version " + std::to_string(version)), version_(version)
{
}

}  // namespace aeb

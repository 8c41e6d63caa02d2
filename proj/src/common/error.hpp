#pragma once

#include <stdexcept>
#include <string>

namespace flexmesh {

enum class ErrorCode {
    InvalidArgument,
    ShapeMismatch,
    Io,
    Parse,
    IndexOutOfRange,
    DuplicateKeypoint,
    DegenerateFace,
    SingularSystem,
    NonFinite,
    Divergence,
    Oracle,
    Tolerance,
};

/// Exception carrying a machine-readable category; the C API maps the
/// category to a status code and the message to fm_last_error().
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what)
        , m_code(code)
    {}

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what)
{
    if (!cond) throw Error(code, what);
}

inline const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::ShapeMismatch: return "shape mismatch";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::IndexOutOfRange: return "index out of range";
    case ErrorCode::DuplicateKeypoint: return "duplicate keypoint";
    case ErrorCode::DegenerateFace: return "degenerate face";
    case ErrorCode::SingularSystem: return "singular system";
    case ErrorCode::NonFinite: return "non-finite value";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::Oracle: return "oracle failure";
    case ErrorCode::Tolerance: return "tolerance exceeded";
    }
    return "unknown";
}

} // namespace flexmesh

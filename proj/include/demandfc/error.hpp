#pragma once

#include <stdexcept>
#include <string>

namespace demandfc {

// Mirrors the codes exposed through the C API (dfc_status).
enum class ErrorCode : int {
    InvalidArgument = 1,
    InvalidOrder = 2,
    DegenerateSeries = 3,
    Positivity = 4,
    Inversion = 5,
    InsufficientData = 6,
    Convergence = 7,
    Shape = 8,
    Rank = 9,
    Evaluation = 10,
    Parse = 11,
    Io = 12,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace demandfc

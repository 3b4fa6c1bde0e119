#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcm {

enum class ErrorKind {
    DuplicateToken,
    EmptyVocabulary,
    InvalidContext,
    InvalidStride,
    InvalidKernel,
    InvalidK,
    InvalidConfig,
    Shape,
    ZeroNorm,
    BatchTooSmall,
    TrainingDiverged,
    DatasetTooSmall,
    DuplicateId,
    Parse,
    Format,
    Truncation,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }
    // The message without the "<kind> error: " prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

} // namespace lcm

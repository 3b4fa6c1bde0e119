#include "lcm/error.hpp"

namespace lcm {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::DuplicateToken: return "duplicate-token";
    case ErrorKind::EmptyVocabulary: return "empty-vocabulary";
    case ErrorKind::InvalidContext: return "invalid-context";
    case ErrorKind::InvalidStride: return "invalid-stride";
    case ErrorKind::InvalidKernel: return "invalid-kernel";
    case ErrorKind::InvalidK: return "invalid-k";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::ZeroNorm: return "zero-norm";
    case ErrorKind::BatchTooSmall: return "batch-too-small";
    case ErrorKind::TrainingDiverged: return "training-diverged";
    case ErrorKind::DatasetTooSmall: return "dataset-too-small";
    case ErrorKind::DuplicateId: return "duplicate-id";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Format: return "format";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind), message_(message)
{
}

} // namespace lcm

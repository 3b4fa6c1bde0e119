#pragma once

#include "lcm/encoders/params.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lcm {

/// Checkpoint container:
///   "LCM1"
///   repeated until EOF:
///     u64 name_length, name bytes (UTF-8), u64 rank, rank x u64 dims,
///     prod(dims) x f32 values, row-major
/// All integers and floats little-endian.
struct NamedTensor {
    std::string name;
    std::vector<std::uint64_t> dims;
    std::vector<float> values;

    bool operator==(const NamedTensor&) const = default;
};

void write_tensors(std::ostream& out, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_tensors(std::istream& in);

std::vector<NamedTensor> to_named_tensors(const ModelParams<float>& params);

// Copies tensors into a model shaped by cfg; any missing, extra or
// mis-shaped tensor is a Shape error.
ModelParams<float> params_from_tensors(const std::vector<NamedTensor>& tensors, const EncoderConfig& cfg);

// Writes to a sibling temporary file and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params);
ModelParams<float> load_checkpoint(const std::filesystem::path& path, const EncoderConfig& cfg);

} // namespace lcm

#pragma once

#include "lcm/encoders/tensor.hpp"

#include <cstddef>
#include <filesystem>
#include <vector>

namespace lcm {

/// Raw float image container:
///   "LCI1", u64 height, u64 width, u64 channels (1 or 3),
///   height*width*channels f32 values, row-major with interleaved channels.
/// All little-endian.
void write_raw_image(const std::filesystem::path& path, const Image& image);
void write_ppm(const std::filesystem::path& path, const Image& image);

Image decode_image(const std::vector<unsigned char>& bytes);

// floor-scaled nearest neighbour: dst (y, x) samples src (y*H/t, x*W/t).
Image resize_nearest(const Image& image, std::size_t target);

/// Reads binary PPM (P6) or PGM (P5) with maxval <= 255, or the raw float
/// container. Grayscale becomes three equal channels. Resizes when the image
/// is not already target x target.
Image load_image(const std::filesystem::path& path, std::size_t target);

} // namespace lcm

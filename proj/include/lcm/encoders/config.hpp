#pragma once

#include <cstddef>

namespace lcm {

struct EncoderConfig {
    std::size_t context_len = 77;
    std::size_t vocab_size = 0;

    std::size_t text_layers = 2;
    std::size_t text_heads = 4;
    std::size_t text_width = 128;

    std::size_t image_size = 32;
    std::size_t patch_size = 8;
    std::size_t image_layers = 2;
    std::size_t image_heads = 4;
    std::size_t image_width = 128;

    std::size_t embed_dim = 64;
    // Average-pool kernel along the token axis before end_of_text pooling.
    std::size_t pool_kernel = 1;

    std::size_t patches_per_side() const { return image_size / patch_size; }
    std::size_t patch_count() const { return patches_per_side() * patches_per_side(); }
    std::size_t patch_dim() const { return patch_size * patch_size * 3; }

    // Throws Error(InvalidConfig) naming the offending field.
    void validate() const;
};

} // namespace lcm

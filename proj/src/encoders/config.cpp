#include "lcm/encoders/config.hpp"

#include "lcm/error.hpp"

#include <string>

namespace lcm {

namespace {

void require(bool ok, const char* field, const std::string& why)
{
    if (!ok) throw Error(ErrorKind::InvalidConfig, std::string(field) + ": " + why);
}

} // namespace

void EncoderConfig::validate() const
{
    require(context_len >= 3, "context_len", "must be >= 3");
    require(vocab_size >= 3, "vocab_size", "must hold at least the three special tokens");
    require(text_layers >= 1, "text_layers", "must be >= 1");
    require(text_heads >= 1, "text_heads", "must be >= 1");
    require(text_width >= 1 && text_width % text_heads == 0, "text_width", "must be divisible by text_heads");
    require(image_layers >= 1, "image_layers", "must be >= 1");
    require(image_heads >= 1, "image_heads", "must be >= 1");
    require(image_width >= 1 && image_width % image_heads == 0, "image_width", "must be divisible by image_heads");
    require(patch_size >= 1, "patch_size", "must be >= 1");
    require(image_size >= patch_size && image_size % patch_size == 0, "image_size",
            "must be a multiple of patch_size");
    require(embed_dim >= 1, "embed_dim", "must be >= 1");
    require(pool_kernel >= 1 && pool_kernel % 2 == 1, "pool_kernel", "must be odd and >= 1");
    require(pool_kernel <= context_len, "pool_kernel", "must not exceed context_len");
}

} // namespace lcm

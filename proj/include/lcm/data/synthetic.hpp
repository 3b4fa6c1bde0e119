#pragma once

#include "lcm/data/manifest.hpp"
#include "lcm/textpipe/vocabulary.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lcm {

enum class ShapeKind { Circle, Square, Triangle };

struct ShapeSpec {
    ShapeKind kind = ShapeKind::Circle;
    std::size_t color = 0; // palette index
    std::size_t cell = 0;  // 2x2 grid cell, row-major

    bool operator==(const ShapeSpec&) const = default;
};

/// What was drawn for one synthetic sample.
struct SyntheticAttributes {
    std::size_t background = 0;
    std::vector<ShapeSpec> shapes;

    // Canonical phrases ("background is red", "a blue circle in the top left")
    // that the caption spells out.
    std::vector<std::string> phrases() const;
};

struct SyntheticDataset {
    DatasetManifest manifest;
    std::vector<SyntheticAttributes> attributes;
};

inline constexpr std::size_t kMinSyntheticTokens = 120;
inline constexpr std::size_t kMaxSyntheticTokens = 300;

const std::vector<std::string>& palette_names();
std::string shape_name(ShapeKind kind);
std::string cell_name(std::size_t cell);

// Every word the generator can emit, plus punctuation and single letters.
std::vector<std::string> synthetic_vocabulary_tokens();

Image render_synthetic(const SyntheticAttributes& attrs, std::size_t image_size);

/// Writes out_dir/images/<id>.ppm and out_dir/manifest.jsonl. Attribute sets
/// are distinct across samples, so every caption names exactly one image.
/// Captions are 120-300 tokens under `vocab`.
SyntheticDataset generate_synthetic(std::size_t count, const Vocabulary& vocab, std::uint64_t seed,
                                    std::size_t image_size, const std::filesystem::path& out_dir);

} // namespace lcm

#pragma once

#include "lcm/data/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lcm {

struct ManifestRecord {
    std::string id;
    std::string image_path; // relative to the manifest root
    std::string caption;

    bool operator==(const ManifestRecord&) const = default;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<ManifestRecord> records;

    std::size_t size() const noexcept { return records.size(); }
};

// One JSON object per line with string fields id, image_path, caption.
// Blank lines are skipped; errors name the 1-based line.
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

struct DatasetSplits {
    DatasetManifest train, val, test;
};

/// Seeded shuffle, then val and test each get floor(n * 8 / 81) records and
/// train the remainder, so 81 records split 65/8/8.
DatasetSplits split_dataset(const DatasetManifest& manifest, std::uint64_t seed);

// Decodes every record's image at image_size x image_size.
std::vector<Sample> load_samples(const DatasetManifest& manifest, std::size_t image_size);

} // namespace lcm

#include "lcm/data/manifest.hpp"

#include "lcm/data/image_io.hpp"
#include "lcm/error.hpp"
#include "lcm/util/random.hpp"

#include <json.hpp>

#include <fstream>
#include <unordered_set>

namespace lcm {

DatasetManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + path.string());

    DatasetManifest m;
    m.root = path.parent_path();
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ManifestRecord r;
        try {
            const auto j = nlohmann::json::parse(line);
            r.id = j.at("id").get<std::string>();
            r.image_path = j.at("image_path").get<std::string>();
            r.caption = j.at("caption").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Parse, path.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen.insert(r.id).second)
            throw Error(ErrorKind::DuplicateId, "'" + r.id + "' on line " + std::to_string(lineno));
        m.records.push_back(std::move(r));
    }
    return m;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write manifest " + path.string());
    for (const auto& r : manifest.records)
        out << nlohmann::json{{"id", r.id}, {"image_path", r.image_path}, {"caption", r.caption}}.dump() << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

DatasetSplits split_dataset(const DatasetManifest& manifest, std::uint64_t seed)
{
    const std::size_t n = manifest.size();
    if (n < 3) throw Error(ErrorKind::DatasetTooSmall, "need at least 3 records to split, got " + std::to_string(n));
    const auto order = shuffled_indices(n, seed);
    const std::size_t n_val = n * 8 / 81;
    const std::size_t n_test = n * 8 / 81;
    const std::size_t n_train = n - n_val - n_test;

    DatasetSplits s;
    for (auto* part : {&s.train, &s.val, &s.test}) part->root = manifest.root;
    for (std::size_t i = 0; i < n; ++i) {
        auto& dst = i < n_train ? s.train : (i < n_train + n_val ? s.val : s.test);
        dst.records.push_back(manifest.records[order[i]]);
    }
    return s;
}

std::vector<Sample> load_samples(const DatasetManifest& manifest, std::size_t image_size)
{
    std::vector<Sample> out;
    out.reserve(manifest.size());
    for (const auto& r : manifest.records)
        out.push_back(Sample{r.id, load_image(manifest.root / r.image_path, image_size), r.caption});
    return out;
}

std::vector<PairedSample> tokenize_samples(const std::vector<Sample>& samples, const Vocabulary& vocab)
{
    std::vector<PairedSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(PairedSample{s.id, s.image, tokenize(s.caption, vocab)});
    return out;
}

} // namespace lcm

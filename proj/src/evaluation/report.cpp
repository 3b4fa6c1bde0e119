#include "lcm/evaluation/report.hpp"

#include "lcm/error.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <sstream>

namespace lcm {

namespace {

struct ReferenceRow {
    const char* dataset;
    const char* name;
    std::array<double, 4> mean;  // percent, R@1 R@5 R@10 R@20
    std::array<double, 4> error; // percent
};

// Published fine-tuning results on the full-size medical datasets. Static
// context for reading desk-scale reports; nothing here is recomputed.
constexpr ReferenceRow kReferenceRows[] = {
    {"ROCO", "PubMedCLIP/RN50", {7.1, 21, 32, 45}, {0.11, 0.21, 0.24, 0.15}},
    {"ROCO", "PubMedCLIP/RN50x4", {7.7, 23, 34, 48}, {0.12, 0.25, 0.55, 0.43}},
    {"ROCO", "PubMedCLIP/ViT32", {8.5, 26, 38, 53}, {0.17, 0.32, 0.22, 0.45}},
    {"ROCO", "MedICaT-SciBERT", {7.6, 26, 41, 58}, {0.59, 1.6, 1.6, 1.3}},
    {"ROCO", "sliding-window ViT32", {17, 40, 54, 68}, {0.35, 0.44, 0.37, 0.49}},
    {"MedICaT", "CLIP/ViT32 (no fine-tune)", {3.2, 9, 13, 19}, {0.19, 0.19, 0.11, 0.16}},
    {"MedICaT", "sliding-window ViT32", {29, 57, 69, 79}, {0.43, 0.44, 0.44, 0.58}},
};

std::string pad_right(std::string s, std::size_t width)
{
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s + " ";
}

// Display width of a UTF-8 string (code points).
std::size_t display_width(const std::string& s)
{
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

std::string pad_cell(const std::string& s, std::size_t width)
{
    const std::size_t w = display_width(s);
    return s + std::string(w < width ? width - w : 0, ' ') + " ";
}

std::string render_table(const RecallReport& r)
{
    constexpr std::size_t kName = 38;
    constexpr std::size_t kCell = 11;
    std::ostringstream out;
    out << "Recall@K (" << to_string(r.direction) << ") on " << r.dataset << " [" << r.split << " split, "
        << r.pool_size << " sampled pairs ranked against each other, n=" << r.seeds.size() << " seeds";
    if (r.seeds.size() == 1) out << ", single seed: error reported as 0";
    out << "]\n";
    out << pad_right("Name", kName);
    for (auto k : r.k_values) out << pad_cell("R@" + std::to_string(k), kCell);
    out << "\n" << pad_right(r.model, kName);
    for (const auto& e : r.per_k) out << pad_cell(format_cell(e.mean, e.std_error), kCell);
    out << "\n\nPublished results on the full datasets (reference only, not reproduced at desk scale):\n";
    out << pad_right("Dataset / Name", kName);
    for (const char* h : {"R@1", "R@5", "R@10", "R@20"}) out << pad_cell(h, kCell);
    out << "\n";
    for (const auto& row : kReferenceRows) {
        out << pad_right(std::string(row.dataset) + " / " + row.name, kName);
        for (std::size_t i = 0; i < 4; ++i) out << pad_cell(format_cell(row.mean[i] / 100, row.error[i] / 100), kCell);
        out << "\n";
    }
    return out.str();
}

using nlohmann::json;

json to_json(const RecallReport& r)
{
    json per_k = json::array();
    for (const auto& e : r.per_k)
        per_k.push_back({{"k", e.k}, {"mean", e.mean}, {"stderr", e.std_error}, {"per_seed", e.per_seed}});
    return json{{"dataset", r.dataset},
                {"split", r.split},
                {"model", r.model},
                {"direction", std::string(to_string(r.direction))},
                {"sample_size", r.sample_size},
                {"pool_size", r.pool_size},
                {"candidate_pool", "sampled pairs"},
                {"seeds", r.seeds},
                {"k_values", r.k_values},
                {"single_seed", r.seeds.size() == 1},
                {"per_k", per_k}};
}

} // namespace

std::string format_cell(double mean, double std_error)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f\xC2\xB1%.2f", mean * 100.0, std_error * 100.0);
    return buf;
}

std::string render_report(const RecallReport& report, ReportFormat format)
{
    report.validate();
    if (format == ReportFormat::Json) return to_json(report).dump(2) + "\n";
    return render_table(report);
}

RecallReport report_from_json(const std::string& text)
{
    RecallReport r;
    try {
        const json j = json::parse(text);
        r.dataset = j.at("dataset").get<std::string>();
        r.split = j.at("split").get<std::string>();
        r.model = j.at("model").get<std::string>();
        r.direction = parse_direction(j.at("direction").get<std::string>());
        r.sample_size = j.at("sample_size").get<std::size_t>();
        r.pool_size = j.at("pool_size").get<std::size_t>();
        r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        r.k_values = j.at("k_values").get<std::vector<std::size_t>>();
        for (const auto& e : j.at("per_k")) {
            RecallAtK x;
            x.k = e.at("k").get<std::size_t>();
            x.mean = e.at("mean").get<double>();
            x.std_error = e.at("stderr").get<double>();
            x.per_seed = e.at("per_seed").get<std::vector<double>>();
            r.per_k.push_back(std::move(x));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("report json: ") + e.what());
    }
    r.validate();
    return r;
}

} // namespace lcm

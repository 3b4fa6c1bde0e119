#include "lcm/data/synthetic.hpp"

#include "lcm/data/image_io.hpp"
#include "lcm/error.hpp"
#include "lcm/textpipe/tokenizer.hpp"
#include "lcm/util/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace lcm {

namespace {

constexpr std::array<std::array<float, 3>, 8> kPalette = {{
    {0.90f, 0.10f, 0.10f}, // red
    {0.10f, 0.80f, 0.20f}, // green
    {0.10f, 0.20f, 0.90f}, // blue
    {0.95f, 0.90f, 0.10f}, // yellow
    {0.10f, 0.85f, 0.90f}, // cyan
    {0.85f, 0.10f, 0.80f}, // magenta
    {0.97f, 0.97f, 0.97f}, // white
    {0.05f, 0.05f, 0.05f}, // black
}};

const char* const kCountWords[] = {"zero", "one", "two", "three"};
const char* const kOrdinals[] = {"first", "second", "third"};
// Shapes sit in the cells of a 2x2 grid; each fills most of its quadrant.
constexpr std::size_t kGrid = 2;
const char* const kRows[] = {"top", "bottom"};
const char* const kCols[] = {"left", "right"};

const char* const kFiller[] = {
    "no other objects are visible in this view .",
    "the picture was produced by a deterministic drawing procedure .",
    "edges are sharp and every region is filled with a flat tone .",
    "this description is intentionally long and somewhat repetitive .",
    "nothing overlaps and each shape sits inside its own quadrant .",
};

std::string shape_phrase(const ShapeSpec& s)
{
    return "a " + palette_names()[s.color] + " " + shape_name(s.kind) + " in the " + cell_name(s.cell) + " quadrant";
}

std::string signature(const SyntheticAttributes& a)
{
    auto p = a.phrases();
    std::sort(p.begin(), p.end());
    std::string out;
    for (const auto& s : p) out += s + "|";
    return out;
}

SyntheticAttributes draw_attributes(Rng& rng)
{
    SyntheticAttributes a;
    a.background = rng.below(kPalette.size());
    const auto count = static_cast<std::size_t>(rng.between(1, 3));
    std::vector<std::size_t> cells{0, 1, 2, 3};
    rng.shuffle(std::span<std::size_t>(cells));
    for (std::size_t i = 0; i < count; ++i) {
        ShapeSpec s;
        s.kind = static_cast<ShapeKind>(rng.below(3));
        s.color = rng.below(kPalette.size() - 1);
        if (s.color >= a.background) ++s.color; // never the background colour
        s.cell = cells[i];
        a.shapes.push_back(s);
    }
    return a;
}

std::vector<std::string> caption_sentences(const SyntheticAttributes& a, std::size_t round)
{
    const auto& bg = palette_names()[a.background];
    const std::size_t n = a.shapes.size();
    std::vector<std::string> out;
    if (round == 0) {
        out.push_back(std::string("this synthetic scan shows ") + kCountWords[n] + (n == 1 ? " shape" : " shapes") +
                      " on a " + bg + " background .");
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(std::string("the ") + kOrdinals[i] + " shape is " + shape_phrase(a.shapes[i]) + " .");
        return out;
    }
    out.push_back("the background is " + bg + " .");
    for (std::size_t i = 0; i < n; ++i) out.push_back(shape_phrase(a.shapes[(i + round) % n]) + " .");
    if (round % 4 == 0) out.push_back(kFiller[(round / 4 - 1) % std::size(kFiller)]);
    return out;
}

} // namespace

const std::vector<std::string>& palette_names()
{
    static const std::vector<std::string> names{"red", "green", "blue", "yellow", "cyan", "magenta", "white", "black"};
    return names;
}

std::string shape_name(ShapeKind kind)
{
    switch (kind) {
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Square: return "square";
    case ShapeKind::Triangle: return "triangle";
    }
    return "shape";
}

std::string cell_name(std::size_t cell)
{
    return std::string(kRows[cell / kGrid]) + " " + kCols[cell % kGrid];
}

std::vector<std::string> SyntheticAttributes::phrases() const
{
    std::vector<std::string> out{palette_names()[background] + " background"};
    for (const auto& s : shapes) out.push_back(shape_phrase(s));
    return out;
}

std::vector<std::string> synthetic_vocabulary_tokens()
{
    std::vector<std::string> words;
    std::set<std::string> seen;
    auto add_text = [&](const std::string& text) {
        for (auto& w : pre_tokenize(text))
            if (seen.insert(w).second) words.push_back(w);
    };
    for (const auto& c : palette_names()) add_text(c);
    for (auto k : {ShapeKind::Circle, ShapeKind::Square, ShapeKind::Triangle}) add_text(shape_name(k));
    for (std::size_t c = 0; c < kGrid * kGrid; ++c) add_text(cell_name(c));
    for (auto w : kCountWords) add_text(w);
    for (auto w : kOrdinals) add_text(w);
    for (auto w : kFiller) add_text(w);
    add_text("this synthetic scan shows shape shapes on a background . the is in quadrant");
    for (char c = 'a'; c <= 'z'; ++c) add_text(std::string(1, c));
    for (char c = '0'; c <= '9'; ++c) add_text(std::string(1, c));
    return words;
}

Image render_synthetic(const SyntheticAttributes& attrs, std::size_t image_size)
{
    Image img(image_size, image_size);
    const auto& bg = kPalette[attrs.background];
    for (std::size_t p = 0; p < image_size * image_size; ++p)
        for (std::size_t c = 0; c < 3; ++c) img.pixels[p * 3 + c] = bg[c];

    const double cell = static_cast<double>(image_size) / static_cast<double>(kGrid);
    const double r = 0.48 * cell;
    for (const auto& s : attrs.shapes) {
        const double cx = (static_cast<double>(s.cell % kGrid) + 0.5) * cell;
        const double cy = (static_cast<double>(s.cell / kGrid) + 0.5) * cell;
        for (std::size_t y = 0; y < image_size; ++y)
            for (std::size_t x = 0; x < image_size; ++x) {
                const double dx = static_cast<double>(x) + 0.5 - cx;
                const double dy = static_cast<double>(y) + 0.5 - cy;
                bool inside = false;
                switch (s.kind) {
                case ShapeKind::Circle: inside = dx * dx + dy * dy <= r * r; break;
                case ShapeKind::Square: inside = std::abs(dx) <= r && std::abs(dy) <= r; break;
                case ShapeKind::Triangle: inside = dy >= -r && dy <= r && std::abs(dx) <= (dy + r) / 2.0; break;
                }
                if (inside)
                    for (std::size_t c = 0; c < 3; ++c) img.at(y, x, c) = kPalette[s.color][c];
            }
    }
    return img;
}

SyntheticDataset generate_synthetic(std::size_t count, const Vocabulary& vocab, std::uint64_t seed,
                                    std::size_t image_size, const std::filesystem::path& out_dir)
{
    if (count < 2) throw Error(ErrorKind::InvalidConfig, "count: synthetic datasets need at least 2 samples");
    if (image_size < 3) throw Error(ErrorKind::InvalidConfig, "image_size: must be >= 3");
    std::filesystem::create_directories(out_dir / "images");

    Rng rng(seed);
    SyntheticDataset ds;
    ds.manifest.root = out_dir;
    std::set<std::string> used;
    std::size_t attempts = 0;
    while (ds.attributes.size() < count) {
        if (++attempts > 1000 * count)
            throw Error(ErrorKind::InvalidConfig, "count: cannot draw that many distinct synthetic samples");
        auto attrs = draw_attributes(rng);
        if (!used.insert(signature(attrs)).second) continue;

        const auto target = static_cast<std::size_t>(rng.between(kMinSyntheticTokens, kMinSyntheticTokens + 40));
        std::string caption;
        std::size_t tokens = 0;
        bool full = false;
        for (std::size_t round = 0; tokens < target && !full && round < 256; ++round) {
            for (const auto& sentence : caption_sentences(attrs, round)) {
                const std::string next = caption.empty() ? sentence : caption + " " + sentence;
                const std::size_t n = tokenize(next, vocab).size();
                if (n > kMaxSyntheticTokens) {
                    full = true;
                    break;
                }
                caption = next;
                tokens = n;
                if (tokens >= target) break;
            }
        }
        if (tokens < kMinSyntheticTokens || tokens > kMaxSyntheticTokens)
            throw Error(ErrorKind::InvalidConfig, "vocabulary cannot express a synthetic caption of " +
                                                      std::to_string(kMinSyntheticTokens) + "-" +
                                                      std::to_string(kMaxSyntheticTokens) + " tokens");

        char id[32];
        std::snprintf(id, sizeof id, "syn-%05zu", ds.attributes.size());
        const std::string rel = std::string("images/") + id + ".ppm";
        write_ppm(out_dir / rel, render_synthetic(attrs, image_size));
        ds.manifest.records.push_back(ManifestRecord{id, rel, caption});
        ds.attributes.push_back(std::move(attrs));
    }
    write_manifest(ds.manifest, out_dir / "manifest.jsonl");
    return ds;
}

} // namespace lcm

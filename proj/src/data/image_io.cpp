#include "lcm/data/image_io.hpp"

#include "lcm/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace lcm {

namespace {

constexpr char kRawMagic[4] = {'L', 'C', 'I', '1'};
constexpr std::uint64_t kMaxSide = 1 << 16;

std::uint64_t read_le64(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

void append_le64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

Image from_channels(std::size_t h, std::size_t w, std::size_t channels, const auto& value_at)
{
    Image img(h, w);
    for (std::size_t p = 0; p < h * w; ++p)
        for (std::size_t c = 0; c < 3; ++c) img.pixels[p * 3 + c] = value_at(p * channels + (channels == 1 ? 0 : c));
    return img;
}

Image decode_raw(const std::vector<unsigned char>& b)
{
    if (b.size() < 28) throw Error(ErrorKind::Truncation, "raw image header is incomplete");
    const auto h = read_le64(&b[4]);
    const auto w = read_le64(&b[12]);
    const auto ch = read_le64(&b[20]);
    if (h == 0 || w == 0 || h > kMaxSide || w > kMaxSide) throw Error(ErrorKind::Format, "raw image has bad dimensions");
    if (ch != 1 && ch != 3) throw Error(ErrorKind::Format, "raw image must have 1 or 3 channels");
    const std::size_t count = h * w * ch;
    if (b.size() < 28 + count * 4) throw Error(ErrorKind::Truncation, "raw image data is incomplete");
    return from_channels(h, w, ch, [&](std::size_t i) {
        const unsigned char* p = &b[28 + i * 4];
        const std::uint32_t bits = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                                   std::uint32_t(p[3]) << 24;
        return std::bit_cast<float>(bits);
    });
}

// Netpbm header token, skipping whitespace and '#' comments.
std::uint64_t pnm_number(const std::vector<unsigned char>& b, std::size_t& pos)
{
    while (pos < b.size()) {
        if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else if (std::isspace(b[pos])) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= b.size()) throw Error(ErrorKind::Truncation, "PNM header is incomplete");
    if (!std::isdigit(b[pos])) throw Error(ErrorKind::Format, "PNM header has a non-numeric field");
    std::uint64_t v = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
        v = v * 10 + (b[pos] - '0');
        if (v > (1u << 20)) throw Error(ErrorKind::Format, "PNM header value too large");
        ++pos;
    }
    return v;
}

Image decode_pnm(const std::vector<unsigned char>& b)
{
    const std::size_t channels = b[1] == '6' ? 3 : 1;
    std::size_t pos = 2;
    const auto w = pnm_number(b, pos);
    const auto h = pnm_number(b, pos);
    const auto maxval = pnm_number(b, pos);
    if (w == 0 || h == 0 || w > kMaxSide || h > kMaxSide) throw Error(ErrorKind::Format, "PNM has bad dimensions");
    if (maxval == 0 || maxval > 255) throw Error(ErrorKind::Format, "only 8-bit PNM is supported");
    if (pos >= b.size() || !std::isspace(b[pos])) throw Error(ErrorKind::Truncation, "PNM header is incomplete");
    ++pos;
    const std::size_t count = w * h * channels;
    if (b.size() - pos < count) throw Error(ErrorKind::Truncation, "PNM pixel data is incomplete");
    const auto denom = static_cast<float>(maxval);
    return from_channels(h, w, channels, [&](std::size_t i) { return static_cast<float>(b[pos + i]) / denom; });
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

} // namespace

void write_raw_image(const std::filesystem::path& path, const Image& image)
{
    std::string bytes(kRawMagic, sizeof kRawMagic);
    append_le64(bytes, image.height);
    append_le64(bytes, image.width);
    append_le64(bytes, 3);
    for (float f : image.pixels) {
        const auto bits = std::bit_cast<std::uint32_t>(f);
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
    }
    write_bytes(path, bytes);
}

void write_ppm(const std::filesystem::path& path, const Image& image)
{
    std::string bytes = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    for (float f : image.pixels) {
        const float c = std::clamp(f, 0.0f, 1.0f);
        bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0f))));
    }
    write_bytes(path, bytes);
}

Image decode_image(const std::vector<unsigned char>& bytes)
{
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kRawMagic, 4) == 0) return decode_raw(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '5')) return decode_pnm(bytes);
    throw Error(ErrorKind::Format, "unsupported image format (expected P6/P5 PNM or LCI1 raw)");
}

Image resize_nearest(const Image& image, std::size_t target)
{
    if (image.height == target && image.width == target) return image;
    Image out(target, target);
    for (std::size_t y = 0; y < target; ++y) {
        const std::size_t sy = y * image.height / target;
        for (std::size_t x = 0; x < target; ++x) {
            const std::size_t sx = x * image.width / target;
            for (std::size_t c = 0; c < 3; ++c) out.at(y, x, c) = image.at(sy, sx, c);
        }
    }
    return out;
}

Image load_image(const std::filesystem::path& path, std::size_t target)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open image " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return resize_nearest(decode_image(bytes), target);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

} // namespace lcm

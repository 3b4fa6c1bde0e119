#include "lcm/encoders/checkpoint.hpp"

#include "lcm/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace lcm {

namespace {

constexpr char kMagic[4] = {'L', 'C', 'M', '1'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class U>
U to_little(U v)
{
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(U)];
        std::memcpy(b, &v, sizeof(U));
        for (std::size_t i = 0; i < sizeof(U) / 2; ++i) std::swap(b[i], b[sizeof(U) - 1 - i]);
        std::memcpy(&v, b, sizeof(U));
    }
    return v;
}

void put_u64(std::ostream& out, std::uint64_t v)
{
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f32(std::ostream& out, float f)
{
    auto bits = to_little(std::bit_cast<std::uint32_t>(f));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what)
{
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw Error(ErrorKind::Truncation, std::string("checkpoint ends inside ") + what);
}

std::uint64_t get_u64(std::istream& in, const char* what)
{
    std::uint64_t v;
    read_exact(in, reinterpret_cast<char*>(&v), sizeof v, what);
    return to_little(v);
}

constexpr std::uint64_t kMaxNameBytes = 1 << 16;
constexpr std::uint64_t kMaxRank = 8;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

} // namespace

void write_tensors(std::ostream& out, const std::vector<NamedTensor>& tensors)
{
    out.write(kMagic, sizeof kMagic);
    for (const auto& t : tensors) {
        put_u64(out, t.name.size());
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put_u64(out, t.dims.size());
        for (auto d : t.dims) put_u64(out, d);
        for (float f : t.values) put_f32(out, f);
    }
    if (!out) throw Error(ErrorKind::Io, "checkpoint write failed");
}

std::vector<NamedTensor> read_tensors(std::istream& in)
{
    char magic[4];
    read_exact(in, magic, sizeof magic, "magic");
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error(ErrorKind::Format, "bad checkpoint magic");

    std::vector<NamedTensor> tensors;
    while (in.peek() != std::char_traits<char>::eof()) {
        NamedTensor t;
        const auto name_len = get_u64(in, "name length");
        if (name_len > kMaxNameBytes) throw Error(ErrorKind::Format, "tensor name too long");
        t.name.resize(name_len);
        read_exact(in, t.name.data(), name_len, "tensor name");
        const auto rank = get_u64(in, "rank");
        if (rank > kMaxRank) throw Error(ErrorKind::Format, "tensor '" + t.name + "' has rank " + std::to_string(rank));
        std::uint64_t count = 1;
        for (std::uint64_t i = 0; i < rank; ++i) {
            t.dims.push_back(get_u64(in, "dims"));
            count *= t.dims.back();
            if (count > kMaxElements) throw Error(ErrorKind::Format, "tensor '" + t.name + "' is implausibly large");
        }
        t.values.resize(count);
        for (auto& v : t.values) {
            std::uint32_t bits;
            read_exact(in, reinterpret_cast<char*>(&bits), sizeof bits, "tensor data");
            v = std::bit_cast<float>(to_little(bits));
        }
        tensors.push_back(std::move(t));
    }
    return tensors;
}

std::vector<NamedTensor> to_named_tensors(const ModelParams<float>& params)
{
    std::vector<NamedTensor> out;
    for (const auto& ref : params.tensors()) {
        const auto& m = *ref.value;
        NamedTensor t;
        t.name = ref.name;
        if (ref.rank == 2) t.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
        else if (ref.rank == 1) t.dims = {static_cast<std::uint64_t>(m.size())};
        t.values.assign(m.data(), m.data() + m.size());
        out.push_back(std::move(t));
    }
    return out;
}

ModelParams<float> params_from_tensors(const std::vector<NamedTensor>& tensors, const EncoderConfig& cfg)
{
    ModelParams<float> params = shaped_params<float>(cfg);
    std::map<std::string, const NamedTensor*> by_name;
    for (const auto& t : tensors)
        if (!by_name.emplace(t.name, &t).second) throw Error(ErrorKind::Format, "duplicate tensor '" + t.name + "'");

    auto expected = to_named_tensors(params);
    if (expected.size() != tensors.size())
        throw Error(ErrorKind::Shape, "checkpoint holds " + std::to_string(tensors.size()) + " tensors, config implies " +
                                          std::to_string(expected.size()));
    auto refs = params.tensors();
    for (std::size_t i = 0; i < refs.size(); ++i) {
        auto it = by_name.find(refs[i].name);
        if (it == by_name.end()) throw Error(ErrorKind::Shape, "checkpoint lacks tensor '" + refs[i].name + "'");
        const NamedTensor& t = *it->second;
        if (t.dims != expected[i].dims) {
            std::string got, want;
            for (auto d : t.dims) got += std::to_string(d) + " ";
            for (auto d : expected[i].dims) want += std::to_string(d) + " ";
            throw Error(ErrorKind::Shape, "tensor '" + t.name + "' has dims [ " + got + "], config implies [ " + want + "]");
        }
        std::copy(t.values.begin(), t.values.end(), refs[i].value->data());
    }
    return params;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        write_tensors(out, to_named_tensors(params));
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

ModelParams<float> load_checkpoint(const std::filesystem::path& path, const EncoderConfig& cfg)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open checkpoint " + path.string());
    return params_from_tensors(read_tensors(in), cfg);
}

} // namespace lcm

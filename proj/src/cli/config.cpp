#include "lcm/cli/config.hpp"

#include "lcm/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace lcm {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why)
{
    throw Error(ErrorKind::InvalidConfig, key + ": " + why);
}

std::uint64_t to_u64(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad(key, "expected a non-negative integer, got '" + v + "'");
    return out;
}

double to_double(const std::string& key, const std::string& v)
{
    std::istringstream in(v);
    in.imbue(std::locale::classic());
    double out = 0;
    in >> out;
    if (in.fail() || !in.eof()) bad(key, "expected a number, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "expected true or false, got '" + v + "'");
}

template <class T>
std::vector<T> to_list(const std::string& key, const std::string& v)
{
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) bad(key, "empty list element");
        out.push_back(static_cast<T>(to_u64(key, item)));
    }
    if (out.empty()) bad(key, "list must not be empty");
    return out;
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in)
{
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second) bad(key, "set more than once");
    }
    return kv;
}

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir)
{
    RunConfig c;
    bool stride_set = false;
    auto path_of = [&](const std::string& v) {
        std::filesystem::path p(v);
        return (p.is_absolute() ? p : base_dir / p).lexically_normal();
    };
    auto size = [](std::size_t& dst) {
        return [&dst](const std::string& k, const std::string& v) { dst = static_cast<std::size_t>(to_u64(k, v)); };
    };
    auto real = [](double& dst) { return [&dst](const std::string& k, const std::string& v) { dst = to_double(k, v); }; };

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters{
        {"vocab_path", [&](auto&, auto& v) { c.vocab_path = path_of(v); }},
        {"manifest_path", [&](auto&, auto& v) { c.manifest_path = path_of(v); }},
        {"output_dir", [&](auto&, auto& v) { c.output_dir = path_of(v); }},
        {"dataset_name", [&](auto&, auto& v) { c.eval.dataset_name = v; }},
        {"model_name", [&](auto&, auto& v) { c.eval.model_name = v; }},
        {"train_on", [&](auto& k, auto& v) {
             if (v != "train" && v != "all") bad(k, "expected train or all");
             c.train_on = v;
         }},
        {"eval_on", [&](auto& k, auto& v) {
             if (v != "train" && v != "val" && v != "test" && v != "all") bad(k, "expected train, val, test or all");
             c.eval_on = v;
         }},
        {"split_seed", [&](auto& k, auto& v) { c.split_seed = to_u64(k, v); }},
        {"context_len", size(c.encoder.context_len)},
        {"stride", [&](auto& k, auto& v) {
             c.long_text.stride = static_cast<std::size_t>(to_u64(k, v));
             stride_set = true;
         }},
        {"normalize_before_mean", [&](auto& k, auto& v) { c.long_text.normalize_before_mean = to_bool(k, v); }},
        {"text_layers", size(c.encoder.text_layers)},
        {"text_heads", size(c.encoder.text_heads)},
        {"text_width", size(c.encoder.text_width)},
        {"image_size", size(c.encoder.image_size)},
        {"patch_size", size(c.encoder.patch_size)},
        {"image_layers", size(c.encoder.image_layers)},
        {"image_heads", size(c.encoder.image_heads)},
        {"image_width", size(c.encoder.image_width)},
        {"embed_dim", size(c.encoder.embed_dim)},
        {"pool_kernel", size(c.encoder.pool_kernel)},
        {"learning_rate", real(c.train.learning_rate)},
        {"epochs", size(c.train.epochs)},
        {"batch_size", size(c.train.batch_size)},
        {"seed", [&](auto& k, auto& v) { c.train.seed = to_u64(k, v); }},
        {"adam_beta1", real(c.train.adam_beta1)},
        {"adam_beta2", real(c.train.adam_beta2)},
        {"adam_eps", real(c.train.adam_eps)},
        {"sample_size", size(c.eval.sample_size)},
        {"eval_seeds", [&](auto& k, auto& v) { c.eval.seeds = to_list<std::uint64_t>(k, v); }},
        {"k_values", [&](auto& k, auto& v) { c.eval.k_values = to_list<std::size_t>(k, v); }},
        {"direction", [&](auto& k, auto& v) {
             if (v == "both") c.directions = {Direction::ImageToText, Direction::TextToImage};
             else {
                 try {
                     c.directions = {parse_direction(v)};
                 } catch (const Error&) {
                     bad(k, "expected image-to-text, text-to-image or both");
                 }
             }
         }},
    };

    const auto kv = parse_key_values(in);
    const bool split_seed_set = kv.contains("split_seed");
    for (const auto& [key, value] : kv) {
        auto it = setters.find(key);
        if (it == setters.end()) bad(key, "unknown key");
        it->second(key, value);
    }
    c.long_text.context_len = c.encoder.context_len;
    if (!stride_set && c.encoder.context_len >= 3) c.long_text.stride = default_stride(c.encoder.context_len);
    if (!split_seed_set) c.split_seed = c.train.seed;
    c.eval.direction = c.directions.front();
    c.validate();
    return c;
}

void RunConfig::validate() const
{
    if (encoder.context_len < 3) bad("context_len", "must be >= 3");
    if (long_text.stride < 1 || long_text.stride > encoder.context_len - 2)
        bad("stride", "must be within [1, context_len - 2]");
    train.validate();
    if (eval.seeds.empty()) bad("eval_seeds", "must not be empty");
    if (eval.k_values.empty()) bad("k_values", "must not be empty");
    for (auto k : eval.k_values)
        if (k == 0 || k > eval.sample_size) bad("k_values", "every k must be within [1, sample_size]");
    if (!vocab_path.empty() && !std::filesystem::exists(vocab_path))
        bad("vocab_path", "'" + vocab_path.string() + "' does not exist");
    if (!manifest_path.empty() && !std::filesystem::exists(manifest_path))
        bad("manifest_path", "'" + manifest_path.string() + "' does not exist");
    // vocab_size is only known once the vocabulary is read; check the rest.
    EncoderConfig probe = encoder;
    probe.vocab_size = std::max<std::size_t>(probe.vocab_size, 3);
    probe.validate();
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
    return parse_run_config(in, path.parent_path());
}

} // namespace lcm

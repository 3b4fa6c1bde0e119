#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lcm {

using TokenId = std::int32_t;

inline constexpr std::string_view kStartOfText = "<|startoftext|>";
inline constexpr std::string_view kEndOfText = "<|endoftext|>";
inline constexpr std::string_view kPad = "<|pad|>";

struct SpecialTokens {
    TokenId start_of_text = -1;
    TokenId end_of_text = -1;
    TokenId pad = -1;
};

/// Line-ordered token table. Line index is the token id; the three special
/// tokens are appended (start_of_text, end_of_text, pad) when the source
/// does not already list them.
class Vocabulary {
public:
    static Vocabulary load(std::istream& in);
    static Vocabulary load_file(const std::filesystem::path& path);
    static Vocabulary from_tokens(const std::vector<std::string>& tokens);

    std::size_t size() const noexcept { return id_to_token_.size(); }

    std::optional<TokenId> find(std::string_view token) const;
    const std::string& token(TokenId id) const;
    bool contains(TokenId id) const noexcept { return id >= 0 && static_cast<std::size_t>(id) < size(); }

    const SpecialTokens& specials() const noexcept { return specials_; }
    bool is_special(TokenId id) const noexcept
    {
        return id == specials_.start_of_text || id == specials_.end_of_text || id == specials_.pad;
    }

    // Longest token in bytes; bounds the greedy matcher's search.
    std::size_t max_token_bytes() const noexcept { return max_token_bytes_; }

    void write(std::ostream& out) const;

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };

    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> token_to_id_;
    SpecialTokens specials_;
    std::size_t max_token_bytes_ = 0;

    void add(std::string token, std::size_t line);
};

} // namespace lcm

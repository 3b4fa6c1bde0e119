#include "lcm/textpipe/tokenizer.hpp"

#include <algorithm>

namespace lcm {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_punct(unsigned char c)
{
    return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126);
}

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Byte length of the code point starting at word[pos]; malformed lead bytes
// count as one byte.
std::size_t code_point_length(std::string_view word, std::size_t pos)
{
    std::size_t n = 1;
    while (pos + n < word.size() && is_continuation(static_cast<unsigned char>(word[pos + n]))) ++n;
    return n;
}

} // namespace

std::vector<std::string> pre_tokenize(std::string_view text)
{
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) words.push_back(std::move(cur));
        cur.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_space(c)) {
            flush();
        } else if (is_punct(c)) {
            flush();
            words.emplace_back(1, ch);
        } else {
            cur.push_back(c < 128 ? static_cast<char>(std::tolower(c)) : ch);
        }
    }
    flush();
    return words;
}

TokenSequence tokenize(std::string_view text, const Vocabulary& vocab)
{
    TokenSequence seq;
    seq.source_text = std::string(text);
    seq.specials = vocab.specials();

    for (const auto& word : pre_tokenize(text)) {
        std::size_t pos = 0;
        while (pos < word.size()) {
            const std::string_view rest(word.data() + pos, word.size() - pos);
            std::size_t end = std::min(rest.size(), vocab.max_token_bytes());
            bool matched = false;
            while (end > 0) {
                // Only cut at code point boundaries.
                if (end < rest.size() && is_continuation(static_cast<unsigned char>(rest[end]))) {
                    --end;
                    continue;
                }
                auto id = vocab.find(rest.substr(0, end));
                if (id && !vocab.is_special(*id)) {
                    seq.ids.push_back(*id);
                    pos += end;
                    matched = true;
                    break;
                }
                --end;
            }
            if (!matched) {
                pos += code_point_length(word, pos);
                ++seq.dropped;
            }
        }
    }
    return seq;
}

} // namespace lcm

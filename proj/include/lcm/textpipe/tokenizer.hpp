#pragma once

#include "lcm/textpipe/vocabulary.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lcm {

/// Content tokens of one caption. Never holds special ids; the window
/// builder adds start/end/pad itself.
struct TokenSequence {
    std::vector<TokenId> ids;
    std::string source_text;
    SpecialTokens specials;
    // Characters that could not be matched to any vocabulary entry.
    std::size_t dropped = 0;

    std::size_t size() const noexcept { return ids.size(); }
};

// Lowercase (ASCII), split on whitespace, isolate ASCII punctuation.
std::vector<std::string> pre_tokenize(std::string_view text);

// Greedy longest-match over the vocabulary at UTF-8 code point boundaries.
// Unmatchable code points are dropped and counted.
TokenSequence tokenize(std::string_view text, const Vocabulary& vocab);

} // namespace lcm

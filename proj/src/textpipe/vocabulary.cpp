#include "lcm/textpipe/vocabulary.hpp"

#include "lcm/error.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace lcm {

void Vocabulary::add(std::string token, std::size_t line)
{
    if (token.empty())
        throw Error(ErrorKind::Parse, "empty token on line " + std::to_string(line));
    if (token_to_id_.contains(token))
        throw Error(ErrorKind::DuplicateToken, "'" + token + "' on line " + std::to_string(line));
    const auto id = static_cast<TokenId>(id_to_token_.size());
    max_token_bytes_ = std::max(max_token_bytes_, token.size());
    token_to_id_.emplace(token, id);
    id_to_token_.push_back(std::move(token));
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens)
{
    if (tokens.empty()) throw Error(ErrorKind::EmptyVocabulary, "no tokens");
    Vocabulary v;
    for (std::size_t i = 0; i < tokens.size(); ++i) v.add(tokens[i], i + 1);
    for (auto special : {kStartOfText, kEndOfText, kPad})
        if (!v.find(special)) v.add(std::string(special), v.size() + 1);
    v.specials_ = {*v.find(kStartOfText), *v.find(kEndOfText), *v.find(kPad)};
    return v;
}

Vocabulary Vocabulary::load(std::istream& in)
{
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        tokens.push_back(std::move(line));
    }
    if (tokens.empty()) throw Error(ErrorKind::EmptyVocabulary, "vocabulary stream has no lines");
    return from_tokens(tokens);
}

Vocabulary Vocabulary::load_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open vocabulary " + path.string());
    return load(in);
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const
{
    auto it = token_to_id_.find(token);
    if (it == token_to_id_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocabulary::token(TokenId id) const
{
    if (!contains(id)) throw Error(ErrorKind::Shape, "token id " + std::to_string(id) + " out of range");
    return id_to_token_[static_cast<std::size_t>(id)];
}

void Vocabulary::write(std::ostream& out) const
{
    for (const auto& t : id_to_token_) out << t << '\n';
}

} // namespace lcm

/*
   Copyright 2026 The oomiss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "oomiss/alphabet.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace oomiss {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) {
        throw std::invalid_argument("alphabet must not be empty");
    }
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        const std::string &s = symbols_[i];
        if (s.empty()) {
            throw std::invalid_argument("alphabet symbols must be nonempty");
        }
        if (s == kMissingToken) {
            throw std::invalid_argument("alphabet must not contain the missing token '_'");
        }
        if (std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); })) {
            throw std::invalid_argument("alphabet symbol '" + s + "' contains whitespace");
        }
        if (!index_.emplace(s, static_cast<SymbolId>(i)).second) {
            throw std::invalid_argument("duplicate alphabet symbol '" + s + "'");
        }
    }
}

Alphabet Alphabet::numbered(std::size_t count, std::string_view prefix) {
    std::vector<std::string> symbols;
    symbols.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        symbols.push_back(std::string(prefix) + std::to_string(i));
    }
    return Alphabet(std::move(symbols));
}

const std::string &Alphabet::symbol(SymbolId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= symbols_.size()) {
        throw std::domain_error("symbol id " + std::to_string(id) + " is outside the alphabet");
    }
    return symbols_[static_cast<std::size_t>(id)];
}

SymbolId Alphabet::index(std::string_view symbol) const {
    auto it = index_.find(std::string(symbol));
    if (it == index_.end()) {
        throw std::domain_error("unknown symbol '" + std::string(symbol) + "'");
    }
    return it->second;
}

bool Alphabet::contains(std::string_view symbol) const {
    return index_.count(std::string(symbol)) != 0;
}

MissObsSeq::MissObsSeq(const std::vector<std::uint8_t> &miss, std::vector<ObsToken> obs)
    : obs_(std::move(obs)) {
    if (miss.size() != obs_.size()) {
        throw std::invalid_argument("missingness and observation sequences differ in length");
    }
    for (std::size_t t = 0; t < miss.size(); ++t) {
        if ((miss[t] != 0) != obs_[t].is_missing()) {
            throw std::invalid_argument("missingness bit disagrees with observation at position " +
                                        std::to_string(t));
        }
    }
}

MissObsSeq MissObsSeq::from_word(const Word &word) {
    std::vector<ObsToken> obs;
    obs.reserve(word.size());
    for (SymbolId s : word) {
        obs.push_back(ObsToken::concrete(s));
    }
    return MissObsSeq(std::move(obs));
}

std::vector<std::uint8_t> MissObsSeq::miss() const {
    std::vector<std::uint8_t> m(obs_.size());
    std::transform(obs_.begin(), obs_.end(), m.begin(),
                   [](const ObsToken &o) { return static_cast<std::uint8_t>(o.is_missing()); });
    return m;
}

std::size_t MissObsSeq::missing_count() const {
    return static_cast<std::size_t>(
        std::count_if(obs_.begin(), obs_.end(), [](const ObsToken &o) { return o.is_missing(); }));
}

MissObsSeq MissObsSeq::prefix(std::size_t length) const {
    length = std::min(length, obs_.size());
    return MissObsSeq(std::vector<ObsToken>(obs_.begin(), obs_.begin() + static_cast<long>(length)));
}

std::vector<ObsToken> parse_tokens(const Alphabet &alphabet, std::string_view text) {
    std::vector<ObsToken> out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
        out.push_back(tok == kMissingToken ? ObsToken::missing()
                                           : ObsToken::concrete(alphabet.index(tok)));
    }
    return out;
}

Word parse_word(const Alphabet &alphabet, std::string_view text) {
    Word out;
    for (const ObsToken &tok : parse_tokens(alphabet, text)) {
        if (tok.is_missing()) {
            throw std::invalid_argument("missing token not allowed in a plain word");
        }
        out.push_back(tok.symbol());
    }
    return out;
}

std::string format_tokens(const Alphabet &alphabet, std::span<const ObsToken> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i].is_missing() ? std::string(kMissingToken) : alphabet.symbol(tokens[i].symbol());
    }
    return out;
}

std::string format_word(const Alphabet &alphabet, const Word &word) {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) out += ' ';
        out += alphabet.symbol(word[i]);
    }
    return out;
}

} // namespace oomiss

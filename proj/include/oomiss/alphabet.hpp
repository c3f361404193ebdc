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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace oomiss {

using SymbolId = std::int32_t;

/// Wire representation of a missing value. Never a member of any Alphabet.
inline constexpr std::string_view kMissingToken = "_";

/**
 * Ordered finite set of observation symbols. Symbol ids are positions in
 * the construction order, so the id map is a bijection onto [0, size()).
 */
class Alphabet {
  public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> symbols);

    /// "x0", "x1", ... used by the generators.
    static Alphabet numbered(std::size_t count, std::string_view prefix = "x");

    std::size_t size() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    const std::string &symbol(SymbolId id) const;
    const std::vector<std::string> &symbols() const { return symbols_; }

    /// Throws std::domain_error naming the symbol if it is not a member.
    SymbolId index(std::string_view symbol) const;
    bool contains(std::string_view symbol) const;

    bool operator==(const Alphabet &other) const { return symbols_ == other.symbols_; }

  private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, SymbolId> index_;
};

/// Either a concrete symbol of some Alphabet or the missing value.
class ObsToken {
  public:
    constexpr ObsToken() = default;

    static constexpr ObsToken missing() { return ObsToken{}; }
    static constexpr ObsToken concrete(SymbolId id) { return ObsToken{id}; }

    constexpr bool is_missing() const { return id_ < 0; }
    constexpr SymbolId symbol() const { return id_; }

    constexpr bool operator==(const ObsToken &) const = default;

  private:
    constexpr explicit ObsToken(SymbolId id) : id_(id) {}
    SymbolId id_ = -1;
};

/// A missing-free word over an alphabet, by symbol id.
using Word = std::vector<SymbolId>;

/**
 * Paired missingness/observation sequence. The missingness bit is derived
 * from the token, so m_t = 1 exactly when o_t is missing.
 */
class MissObsSeq {
  public:
    MissObsSeq() = default;
    explicit MissObsSeq(std::vector<ObsToken> obs) : obs_(std::move(obs)) {}

    /// Validates that miss[t] == 1 iff obs[t] is missing.
    MissObsSeq(const std::vector<std::uint8_t> &miss, std::vector<ObsToken> obs);

    static MissObsSeq from_word(const Word &word);

    std::size_t size() const { return obs_.size(); }
    bool empty() const { return obs_.empty(); }
    std::span<const ObsToken> obs() const { return obs_; }
    const ObsToken &operator[](std::size_t t) const { return obs_[t]; }
    bool missing(std::size_t t) const { return obs_[t].is_missing(); }
    std::vector<std::uint8_t> miss() const;
    std::size_t missing_count() const;

    /// Leading `length` positions.
    MissObsSeq prefix(std::size_t length) const;

    bool operator==(const MissObsSeq &) const = default;

  private:
    std::vector<ObsToken> obs_;
};

/// Parses whitespace-separated tokens; "_" becomes Missing.
std::vector<ObsToken> parse_tokens(const Alphabet &alphabet, std::string_view text);
Word parse_word(const Alphabet &alphabet, std::string_view text);
std::string format_tokens(const Alphabet &alphabet, std::span<const ObsToken> tokens);
std::string format_word(const Alphabet &alphabet, const Word &word);

} // namespace oomiss

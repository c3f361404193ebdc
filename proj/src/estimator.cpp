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

#include "oomiss/estimator.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace oomiss {

namespace {

struct WordHash {
    std::size_t operator()(const Word &w) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (SymbolId s : w) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(s));
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

using WordCounts = std::unordered_map<Word, std::uint64_t, WordHash>;

// Counts every missing-free window of `length`, and the total number of
// windows of that length (missing or not).
std::uint64_t scan_windows(std::span<const MissObsSeq> data, std::size_t length, WordCounts &counts) {
    std::uint64_t windows = 0;
    Word buffer(length);
    for (const MissObsSeq &seq : data) {
        const std::size_t n = seq.size();
        if (n < length) continue;
        windows += n - length + 1;
        // `run` is the number of consecutive observed values ending at t.
        std::size_t run = 0;
        for (std::size_t t = 0; t < n; ++t) {
            run = seq.missing(t) ? 0 : run + 1;
            if (run < length) continue;
            const std::size_t start = t + 1 - length;
            for (std::size_t i = 0; i < length; ++i) buffer[i] = seq[start + i].symbol();
            auto it = counts.find(buffer);
            if (it == counts.end()) {
                counts.emplace(buffer, 1);
            } else {
                ++it->second;
            }
        }
    }
    return windows;
}

void check_plain_words(const std::vector<Word> &words, const Alphabet &alphabet, const char *name) {
    if (words.empty()) {
        throw std::invalid_argument(std::string(name) + " word list must not be empty");
    }
    for (const Word &w : words) {
        for (SymbolId s : w) {
            if (s < 0) {
                throw std::invalid_argument(std::string(name) +
                                            " words must not contain the missing token");
            }
            if (static_cast<std::size_t>(s) >= alphabet.size()) {
                throw std::invalid_argument(std::string(name) + " word uses a symbol outside the alphabet");
            }
        }
    }
}

Word concat(const Word &a, const Word &b) {
    Word out(a);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Word concat(const Word &a, SymbolId x, const Word &b) {
    Word out(a);
    out.push_back(x);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

std::size_t longest(std::span<const MissObsSeq> data) {
    std::size_t n = 0;
    for (const auto &seq : data) n = std::max(n, seq.size());
    return n;
}

void check_fits(std::span<const MissObsSeq> data, const std::vector<Word> &q_words,
                const std::vector<Word> &c_words) {
    std::size_t max_q = 0;
    std::size_t max_c = 0;
    for (const auto &q : q_words) max_q = std::max(max_q, q.size());
    for (const auto &c : c_words) max_c = std::max(max_c, c.size());
    if (longest(data) < max_q + max_c + 1) {
        throw std::invalid_argument("no trajectory is long enough for the Hankel queries (need " +
                                    std::to_string(max_q + max_c + 1) + ")");
    }
}

} // namespace

QueryWord to_query(const Word &word) {
    QueryWord q;
    q.reserve(word.size());
    for (SymbolId s : word) q.push_back(ObsToken::concrete(s));
    return q;
}

bool indicator(std::span<const ObsToken> query, std::span<const ObsToken> window) {
    if (window.size() < query.size()) {
        throw std::invalid_argument("indicator window is shorter than the query");
    }
    for (std::size_t i = 0; i < query.size(); ++i) {
        if (query[i].is_missing()) continue;
        if (window[i] != query[i]) return false;
    }
    return true;
}

std::uint64_t count_obs(std::span<const ObsToken> query, std::span<const ObsToken> traj) {
    const std::size_t k = query.size();
    const std::size_t n = traj.size();
    if (n < k) {
        throw std::invalid_argument("trajectory of length " + std::to_string(n) +
                                    " is shorter than query of length " + std::to_string(k));
    }
    std::uint64_t count = 0;
    for (std::size_t i = 0; i + k <= n; ++i) {
        count += indicator(query, traj.subspan(i, k)) ? 1 : 0;
    }
    return count;
}

double freq_estimate(std::span<const ObsToken> query, std::span<const MissObsSeq> data) {
    if (query.empty()) return 1.0;
    if (data.empty()) throw std::invalid_argument("frequency estimate needs at least one trajectory");
    const std::size_t k = query.size();
    std::uint64_t matches = 0;
    std::uint64_t windows = 0;
    for (const MissObsSeq &seq : data) {
        if (seq.size() < k) continue;
        matches += count_obs(query, seq.obs());
        windows += seq.size() - k + 1;
    }
    if (windows == 0) {
        throw std::invalid_argument("all trajectories are shorter than the query length " +
                                    std::to_string(k));
    }
    return static_cast<double>(matches) / static_cast<double>(windows);
}

std::map<Word, std::uint64_t> count_words(std::span<const MissObsSeq> data, std::size_t length) {
    WordCounts counts;
    scan_windows(data, length, counts);
    return {counts.begin(), counts.end()};
}

HankelSet<double> assemble_hankel(std::span<const MissObsSeq> data, const std::vector<Word> &q_words,
                                  const std::vector<Word> &c_words, const Alphabet &alphabet,
                                  WindowStats *stats) {
    check_plain_words(q_words, alphabet, "indicative");
    check_plain_words(c_words, alphabet, "characteristic");
    if (data.empty()) throw std::invalid_argument("Hankel assembly needs at least one trajectory");
    check_fits(data, q_words, c_words);

    std::set<std::size_t> lengths;
    for (const auto &q : q_words) {
        lengths.insert(q.size());
        for (const auto &c : c_words) {
            lengths.insert(q.size() + c.size());
            lengths.insert(q.size() + c.size() + 1);
        }
    }
    for (const auto &c : c_words) lengths.insert(c.size());

    std::map<std::size_t, std::pair<WordCounts, std::uint64_t>> tables;
    for (std::size_t len : lengths) {
        if (len == 0) continue;
        auto &[counts, windows] = tables[len];
        windows = scan_windows(data, len, counts);
        if (stats) stats->windows_by_length[len] = windows;
    }

    auto freq = [&tables](const Word &w) -> double {
        if (w.empty()) return 1.0;
        const auto &[counts, windows] = tables.at(w.size());
        if (windows == 0) return 0.0;
        auto it = counts.find(w);
        const std::uint64_t c = it == counts.end() ? 0 : it->second;
        return static_cast<double>(c) / static_cast<double>(windows);
    };

    const auto nq = static_cast<Index>(q_words.size());
    const auto nc = static_cast<Index>(c_words.size());
    HankelSet<double> h;
    h.alphabet = alphabet;
    h.q_words = q_words;
    h.c_words = c_words;
    h.f_q.resize(nq);
    h.f_c.resize(nc);
    h.f_cq.resize(nc, nq);
    h.f_xcq.assign(alphabet.size(), Matrix<double>(nc, nq));
    for (Index j = 0; j < nq; ++j) h.f_q(j) = freq(q_words[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < nc; ++i) h.f_c(i) = freq(c_words[static_cast<std::size_t>(i)]);
    for (Index i = 0; i < nc; ++i) {
        const Word &c = c_words[static_cast<std::size_t>(i)];
        for (Index j = 0; j < nq; ++j) {
            const Word &q = q_words[static_cast<std::size_t>(j)];
            h.f_cq(i, j) = freq(concat(q, c));
            for (std::size_t x = 0; x < alphabet.size(); ++x) {
                h.f_xcq[x](i, j) = freq(concat(q, static_cast<SymbolId>(x), c));
            }
        }
    }
    return h;
}

HankelSet<double> assemble_hankel_naive(std::span<const MissObsSeq> data,
                                        const std::vector<Word> &q_words,
                                        const std::vector<Word> &c_words, const Alphabet &alphabet) {
    check_plain_words(q_words, alphabet, "indicative");
    check_plain_words(c_words, alphabet, "characteristic");
    if (data.empty()) throw std::invalid_argument("Hankel assembly needs at least one trajectory");
    check_fits(data, q_words, c_words);

    auto freq = [&data](const Word &w) { return freq_estimate(to_query(w), data); };

    const auto nq = static_cast<Index>(q_words.size());
    const auto nc = static_cast<Index>(c_words.size());
    HankelSet<double> h;
    h.alphabet = alphabet;
    h.q_words = q_words;
    h.c_words = c_words;
    h.f_q.resize(nq);
    h.f_c.resize(nc);
    h.f_cq.resize(nc, nq);
    h.f_xcq.assign(alphabet.size(), Matrix<double>(nc, nq));
    for (Index j = 0; j < nq; ++j) h.f_q(j) = freq(q_words[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < nc; ++i) h.f_c(i) = freq(c_words[static_cast<std::size_t>(i)]);
    for (Index i = 0; i < nc; ++i) {
        for (Index j = 0; j < nq; ++j) {
            const Word &q = q_words[static_cast<std::size_t>(j)];
            const Word &c = c_words[static_cast<std::size_t>(i)];
            h.f_cq(i, j) = freq(concat(q, c));
            for (std::size_t x = 0; x < alphabet.size(); ++x) {
                h.f_xcq[x](i, j) = freq(concat(q, static_cast<SymbolId>(x), c));
            }
        }
    }
    return h;
}

std::vector<Word> select_words(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                               std::size_t length, std::optional<std::size_t> top_k) {
    if (length == 0) throw std::invalid_argument("word length must be at least 1");
    const auto counts = count_words(data, length);
    if (counts.empty()) {
        throw std::invalid_argument("no missing-free window of length " + std::to_string(length) +
                                    " in the data");
    }

    auto lex_less = [&alphabet](const Word &a, const Word &b) {
        return std::lexicographical_compare(
            a.begin(), a.end(), b.begin(), b.end(),
            [&alphabet](SymbolId x, SymbolId y) { return alphabet.symbol(x) < alphabet.symbol(y); });
    };

    std::vector<Word> words;
    if (!top_k) {
        // Every word of Sigma^length.
        Word w(length, 0);
        const auto base = static_cast<SymbolId>(alphabet.size());
        bool done = false;
        while (!done) {
            words.push_back(w);
            done = true;
            for (std::size_t pos = length; pos-- > 0;) {
                if (++w[pos] < base) {
                    done = false;
                    break;
                }
                w[pos] = 0;
            }
        }
        std::sort(words.begin(), words.end(), lex_less);
        return words;
    }

    std::vector<std::pair<Word, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [&lex_less](const auto &a, const auto &b) {
        if (a.second != b.second) return a.second > b.second;
        return lex_less(a.first, b.first);
    });
    const std::size_t keep = std::min(*top_k, ranked.size());
    words.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) words.push_back(ranked[i].first);
    return words;
}

} // namespace oomiss

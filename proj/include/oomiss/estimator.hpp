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
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "oomiss/alphabet.hpp"
#include "oomiss/oom.hpp"

namespace oomiss {

/// Query for the wildcard counter: Missing tokens match anything.
using QueryWord = std::vector<ObsToken>;

QueryWord to_query(const Word &word);

/**
 * 1 iff window[i] == query[i] at every position where the query is not
 * Missing. A Missing window value never matches a concrete query token.
 */
bool indicator(std::span<const ObsToken> query, std::span<const ObsToken> window);

/// Number of the n-k+1 windows of `traj` accepted by indicator().
std::uint64_t count_obs(std::span<const ObsToken> query, std::span<const ObsToken> traj);

/**
 * Pooled sliding-window frequency: total matches over total windows, with
 * windows confined to single trajectories. Trajectories shorter than the
 * query are skipped; an empty query returns 1.
 */
double freq_estimate(std::span<const ObsToken> query, std::span<const MissObsSeq> data);

/// Hankel blocks indexed [characteristic row, indicative column].
template <typename Scalar = double>
struct HankelSet {
    RowVector<Scalar> f_q;                  // f(q_j)
    RowVector<Scalar> f_c;                  // f(c_i)
    Matrix<Scalar> f_cq;                    // f(q_j c_i)
    std::vector<Matrix<Scalar>> f_xcq;      // per symbol x: f(q_j x c_i)
    std::vector<Word> q_words;
    std::vector<Word> c_words;
    Alphabet alphabet;

    template <typename Other>
    HankelSet<Other> cast() const {
        HankelSet<Other> out;
        out.f_q = f_q.template cast<Other>();
        out.f_c = f_c.template cast<Other>();
        out.f_cq = f_cq.template cast<Other>();
        for (const auto &m : f_xcq) out.f_xcq.push_back(m.template cast<Other>());
        out.q_words = q_words;
        out.c_words = c_words;
        out.alphabet = alphabet;
        return out;
    }
};

/// Window totals by word length, reported alongside a Hankel estimate.
struct WindowStats {
    std::map<std::size_t, std::uint64_t> windows_by_length;
};

/**
 * Frequency estimates for every concatenation q c and q x c. Queries are
 * missing-free, so all of them are counted in one pass per word length.
 */
HankelSet<double> assemble_hankel(std::span<const MissObsSeq> data, const std::vector<Word> &q_words,
                                  const std::vector<Word> &c_words, const Alphabet &alphabet,
                                  WindowStats *stats = nullptr);

/// Same contract, one naive freq_estimate() per entry.
HankelSet<double> assemble_hankel_naive(std::span<const MissObsSeq> data,
                                        const std::vector<Word> &q_words,
                                        const std::vector<Word> &c_words, const Alphabet &alphabet);

/**
 * Top `top_k` most frequent missing-free words of length `length`, ties
 * broken by lexicographic order of symbol names; all of Sigma^length when
 * `top_k` is empty.
 */
std::vector<Word> select_words(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                               std::size_t length, std::optional<std::size_t> top_k);

/// Missing-free window counts of one length; keys are words.
std::map<Word, std::uint64_t> count_words(std::span<const MissObsSeq> data, std::size_t length);

} // namespace oomiss

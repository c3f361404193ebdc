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

#include "doctest.h"

#include <algorithm>

#include "oomiss/estimator.hpp"
#include "oomiss/simulate.hpp"
#include "test_support.hpp"

using namespace oomiss;

namespace {

std::vector<MissObsSeq> scatter_data(Rng &rng, std::size_t k, std::size_t count, std::size_t max_len,
                                    double miss_rate) {
    std::vector<MissObsSeq> out;
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t len = rng.below(max_len + 1);
        std::vector<ObsToken> toks;
        for (std::size_t t = 0; t < len; ++t) {
            toks.push_back(rng.uniform() < miss_rate ? ObsToken::missing()
                                                     : ObsToken::concrete(SymbolId(rng.below(k))));
        }
        out.emplace_back(std::move(toks));
    }
    return out;
}

std::vector<ObsToken> random_query(Rng &rng, std::size_t k, std::size_t len) {
    std::vector<ObsToken> q;
    for (std::size_t i = 0; i < len; ++i) {
        q.push_back(rng.below(3) == 0 ? ObsToken::missing() : ObsToken::concrete(SymbolId(rng.below(k))));
    }
    return q;
}

} // namespace

TEST_CASE("worked counting example") {
    Alphabet a({"a", "b"});
    auto traj = oracle::tokens(a, "_bab_");
    auto query = oracle::tokens(a, "_b");
    CHECK(count_obs(query, traj) == 2);
    std::vector<MissObsSeq> data{MissObsSeq(traj)};
    CHECK(freq_estimate(query, data) == 0.5);
}

TEST_CASE("a missing window value never matches a concrete query token") {
    Alphabet a({"a", "b"});
    CHECK_FALSE(indicator(oracle::tokens(a, "a"), oracle::tokens(a, "_")));
    CHECK(indicator(oracle::tokens(a, "_"), oracle::tokens(a, "_")));
    CHECK(indicator(oracle::tokens(a, "_a"), oracle::tokens(a, "ba")));
    CHECK_THROWS_AS(indicator(oracle::tokens(a, "ab"), oracle::tokens(a, "a")), std::invalid_argument);
    CHECK_THROWS_AS(count_obs(oracle::tokens(a, "ab"), oracle::tokens(a, "a")), std::invalid_argument);
}

TEST_CASE("window counts agree with a direct scan") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + rng.below(3);
        auto data = scatter_data(rng, k, 1, 30, 0.2);
        const auto &traj = data[0];
        std::vector<ObsToken> tv(traj.obs().begin(), traj.obs().end());
        auto q = random_query(rng, k, rng.below(4));
        if (tv.size() < q.size()) continue;
        CHECK(count_obs(q, traj.obs()) == oracle::naive_count(q, tv));
    }
}

TEST_CASE("pooled frequency divides pooled matches by pooled windows") {
    Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 1 + rng.below(3);
        auto data = scatter_data(rng, k, 1 + rng.below(5), 12, 0.25);
        auto q = random_query(rng, k, 1 + rng.below(3));
        std::size_t hits = 0, windows = 0;
        for (const auto &seq : data) {
            if (seq.size() < q.size()) continue;
            std::vector<ObsToken> tv(seq.obs().begin(), seq.obs().end());
            hits += oracle::naive_count(q, tv);
            windows += seq.size() - q.size() + 1;
        }
        if (windows == 0) {
            CHECK_THROWS_AS(freq_estimate(q, data), std::invalid_argument);
        } else {
            CHECK(freq_estimate(q, data) == double(hits) / double(windows));
        }
    }
}

TEST_CASE("windows never cross trajectory boundaries") {
    Alphabet a({"a", "b"});
    std::vector<MissObsSeq> split{MissObsSeq(oracle::tokens(a, "aa")), MissObsSeq(oracle::tokens(a, "bb"))};
    CHECK(freq_estimate(oracle::tokens(a, "ab"), split) == 0.0);
    std::vector<MissObsSeq> joined{MissObsSeq(oracle::tokens(a, "aabb"))};
    CHECK(freq_estimate(oracle::tokens(a, "ab"), joined) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("empty query has frequency one and empty data is rejected") {
    std::vector<MissObsSeq> none;
    CHECK(freq_estimate(std::vector<ObsToken>{}, none) == 1.0);
    CHECK_THROWS_AS(freq_estimate(std::vector<ObsToken>{ObsToken::concrete(0)}, none),
                    std::invalid_argument);
}

TEST_CASE("one-pass Hankel assembly equals the per-entry estimate") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = 2 + rng.below(2);
        Alphabet a = Alphabet::numbered(k);
        auto data = scatter_data(rng, k, 3, 200, 0.15);
        data.push_back(MissObsSeq(std::vector<ObsToken>(50, ObsToken::concrete(0))));
        auto q = oracle::words_of_length(k, 1 + rng.below(2));
        auto c = oracle::words_of_length(k, 1 + rng.below(2));
        WindowStats stats;
        HankelSet<double> fast = assemble_hankel(data, q, c, a, &stats);
        HankelSet<double> slow = assemble_hankel_naive(data, q, c, a);
        CHECK(fast.f_q == slow.f_q);
        CHECK(fast.f_c == slow.f_c);
        CHECK(fast.f_cq == slow.f_cq);
        for (std::size_t x = 0; x < k; ++x) CHECK(fast.f_xcq[x] == slow.f_xcq[x]);
        CHECK(stats.windows_by_length.count(q[0].size() + c[0].size() + 1) == 1);
    }
}

TEST_CASE("Hankel entries are indexed by characteristic row and indicative column") {
    Alphabet a({"a", "b"});
    std::vector<MissObsSeq> data{MissObsSeq(oracle::tokens(a, "aabab_bbaab"))};
    std::vector<Word> q{{0}, {1}};
    std::vector<Word> c{{0, 0}, {1, 1}, {0, 1}};
    HankelSet<double> h = assemble_hankel(data, q, c, a);
    REQUIRE(h.f_cq.rows() == 3);
    REQUIRE(h.f_cq.cols() == 2);
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < q.size(); ++j) {
            Word qc = q[j];
            qc.insert(qc.end(), c[i].begin(), c[i].end());
            CHECK(h.f_cq(Index(i), Index(j)) == freq_estimate(to_query(qc), data));
            for (SymbolId x = 0; x < 2; ++x) {
                Word qxc = q[j];
                qxc.push_back(x);
                qxc.insert(qxc.end(), c[i].begin(), c[i].end());
                CHECK(h.f_xcq[std::size_t(x)](Index(i), Index(j)) == freq_estimate(to_query(qxc), data));
            }
        }
        CHECK(h.f_c(Index(i)) == freq_estimate(to_query(c[i]), data));
    }
}

TEST_CASE("Hankel assembly validates its inputs") {
    Alphabet a({"a", "b"});
    std::vector<MissObsSeq> data{MissObsSeq(oracle::tokens(a, "abab"))};
    std::vector<Word> one{{0}};
    CHECK_THROWS_AS(assemble_hankel(data, {}, one, a), std::invalid_argument);
    CHECK_THROWS_AS(assemble_hankel(data, {{-1}}, one, a), std::invalid_argument);
    CHECK_THROWS_AS(assemble_hankel(data, {{2}}, one, a), std::invalid_argument);
    CHECK_THROWS_AS(assemble_hankel(data, {{0, 0}}, {{0, 0}}, a), std::invalid_argument);
    CHECK_THROWS_AS(assemble_hankel({}, one, one, a), std::invalid_argument);
}

TEST_CASE("word selection ranks by count then by symbol names") {
    Rng rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 2 + rng.below(3);
        Alphabet a = Alphabet::numbered(k);
        auto data = scatter_data(rng, k, 2, 60, 0.1);
        data.push_back(MissObsSeq::from_word(Word{0, 1, 0}));
        const std::size_t len = 1 + rng.below(2);
        const std::size_t top = 1 + rng.below(6);
        auto counts = count_words(data, len);
        std::vector<std::pair<Word, std::uint64_t>> ranked(counts.begin(), counts.end());
        auto names = [&](const Word &w) {
            std::vector<std::string> s;
            for (SymbolId x : w) s.push_back(a.symbol(x));
            return s;
        };
        std::stable_sort(ranked.begin(), ranked.end(), [&](const auto &l, const auto &r) {
            if (l.second != r.second) return l.second > r.second;
            return names(l.first) < names(r.first);
        });
        auto got = select_words(data, a, len, top);
        REQUIRE(got.size() == std::min(top, ranked.size()));
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == ranked[i].first);
    }
}

TEST_CASE("word selection without a cap returns every word") {
    Alphabet a({"b", "a"});
    std::vector<MissObsSeq> data{MissObsSeq::from_word(Word{0, 0, 0})};
    auto all = select_words(data, a, 2, std::nullopt);
    CHECK(all.size() == 4);
    // Sorted by names: "a" (id 1) before "b" (id 0).
    CHECK(all.front() == Word{1, 1});
    CHECK(all.back() == Word{0, 0});
    std::vector<MissObsSeq> gaps{MissObsSeq(std::vector<ObsToken>(5, ObsToken::missing()))};
    CHECK_THROWS(select_words(gaps, a, 2, 3));
}

TEST_CASE("estimates converge to the long-run window frequency under trigger missingness") {
    // The limit is taken on the joint chain of hidden state and trigger flag,
    // so it includes the probability of the window being observed.
    Hmm h;
    h.alphabet = Alphabet({"0", "1"});
    h.transition.resize(2, 2);
    h.transition << 0.9, 0.1, 0.2, 0.8;
    h.emission = Matrix<double>::Identity(2, 2);
    h.initial = Vector<double>::Constant(2, 0.5);
    AmsarTriggerPolicy policy{{1}, 0.3};
    Word w = sample_hmm(h, 200000, 1, 1000, 5)[0];
    std::vector<MissObsSeq> data{corrupt_amsar(w, policy, 6)};
    for (std::size_t len = 1; len <= 2; ++len) {
        for (const MissObsSeq &q : oracle::queries_of_length(2, len, len)) {
            const double limit = oracle::trigger_window_limit(h, policy.triggers, policy.miss_prob, q);
            CHECK(std::abs(freq_estimate(q.obs(), data) - limit) <= 0.01);
        }
    }
}

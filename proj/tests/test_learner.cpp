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

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "oomiss/learner.hpp"
#include "oomiss/simulate.hpp"
#include "test_support.hpp"

using namespace oomiss;

TEST_CASE("truncated SVD has orthonormal factors and descending values") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const Index r = 1 + Index(rng.below(7)), c = 1 + Index(rng.below(7));
        Matrix<double> m = oracle::random_matrix(rng, r, c);
        const Index d = 1 + Index(rng.below(std::uint64_t(std::min(r, c))));
        auto svd = truncated_svd(m, d);
        CHECK((svd.u.transpose() * svd.u - Matrix<double>::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((svd.v.transpose() * svd.v - Matrix<double>::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
        for (Index i = 1; i < d; ++i) CHECK(svd.s(i - 1) >= svd.s(i));

        // Singular values are square roots of the eigenvalues of m^T m.
        Eigen::SelfAdjointEigenSolver<Matrix<double>> es(m.transpose() * m);
        Vector<double> ev = es.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
        for (Index i = 0; i < d; ++i) CHECK(std::abs(svd.s(i) - ev(i)) < 1e-10);
        // Eckart-Young: residual energy is the discarded spectrum.
        const double tail = ev.tail(ev.size() - d).squaredNorm();
        CHECK(std::abs((m - svd.reconstruct()).squaredNorm() - tail) < 1e-9);
    }
    CHECK_THROWS_AS(truncated_svd(Matrix<double>::Identity(2, 3).eval(), 3), std::invalid_argument);
    CHECK_THROWS_AS(truncated_svd(Matrix<double>::Identity(2, 3).eval(), 0), std::invalid_argument);
}

TEST_CASE("pseudo-inverse satisfies the Moore-Penrose identities") {
    Rng rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const Index r = 1 + Index(rng.below(6)), c = 1 + Index(rng.below(6));
        const Index rank = 1 + Index(rng.below(std::uint64_t(std::min(r, c))));
        Matrix<double> a = oracle::random_matrix(rng, r, rank) * oracle::random_matrix(rng, rank, c);
        Matrix<double> p = pseudo_inverse(a);
        CHECK((a * p * a - a).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((p * a * p - p).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(((a * p).transpose() - a * p).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(((p * a).transpose() - p * a).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(numerical_rank(a) == rank);
    }
}

TEST_CASE("pseudo-inverse of a full-rank matrix matches the normal equations") {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const Index r = 1 + Index(rng.below(5)), c = 1 + Index(rng.below(5));
        Matrix<double> a = oracle::random_matrix(rng, r, c);
        if (numerical_rank(a) < std::min(r, c)) continue;
        CHECK((pseudo_inverse(a) - oracle::normal_equations_pinv(a)).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(pseudo_inverse(Matrix<double>::Zero(2, 3).eval()).isZero());
    CHECK(pseudo_inverse(Matrix<double>(0, 3)).rows() == 3);
}

TEST_CASE("exact Hankel blocks recover the stationary process") {
    Rng rng(34);
    for (int trial = 0; trial < 5; ++trial) {
        const Index n = 2 + Index(rng.below(2));
        const Index k = 2 + Index(rng.below(2));
        Hmm h = oracle::random_hmm(rng, n, k);
        Oom<double> truth = hmm_to_oom(stationary_hmm(h));
        auto words = oracle::words_of_length(std::size_t(k), 2);
        auto fit = spectral_fit(oracle::exact_hankel(truth, words, words), n);
        CHECK(fit.warnings.empty());
        CHECK(fit.projected_rank == n);
        Oom<double> learned = reduce_to_oom(fit.model);
        for (const Word &w : oracle::words_up_to(std::size_t(k), 4)) {
            CHECK(std::abs(external_fn(learned, w) - external_fn(truth, w)) < 1e-8);
        }
        // The learned omega is already the stationary state.
        Vector<double> ws = stationary_state(learned);
        CHECK((ws - learned.omega()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("learned IO-OOM follows the augmentation pattern") {
    Rng rng(35);
    Hmm h = oracle::random_hmm(rng, 2, 2);
    Oom<double> truth = hmm_to_oom(stationary_hmm(h));
    auto words = oracle::words_of_length(2, 2);
    IoOom<double> io = spectral_learn(oracle::exact_hankel(truth, words, words), 2);
    CHECK(io.tau(IoSymbol{false, ObsToken::missing()}).isZero());
    CHECK(io.tau(IoSymbol{true, ObsToken::concrete(0)}).isZero());
    CHECK(io.tau(IoSymbol::missing()).isApprox(io.tau(IoSymbol::observed(0)) + io.tau(IoSymbol::observed(1))));
}

TEST_CASE("overestimated dimension warns instead of failing") {
    Rng rng(36);
    Hmm h = oracle::random_hmm(rng, 2, 3);
    Oom<double> truth = hmm_to_oom(stationary_hmm(h));
    auto words = oracle::words_of_length(3, 2);
    auto fit = spectral_fit(oracle::exact_hankel(truth, words, words), 4);
    CHECK(fit.projected_rank == 2);
    REQUIRE(fit.warnings.size() == 1);
    CHECK(fit.warnings[0].find("rank") != std::string::npos);
    CHECK_THROWS_AS(spectral_fit(oracle::exact_hankel(truth, words, words), 10), std::invalid_argument);
}

TEST_CASE("missing-free segments split at every missing value") {
    Alphabet a({"a", "b"});
    std::vector<MissObsSeq> data{MissObsSeq(oracle::tokens(a, "ab_ba__a")), MissObsSeq(oracle::tokens(a, "_"))};
    auto segs = segment_missing_free(data);
    REQUIRE(segs.size() == 3);
    CHECK(segs[0] == MissObsSeq(oracle::tokens(a, "ab")));
    CHECK(segs[1] == MissObsSeq(oracle::tokens(a, "ba")));
    CHECK(segs[2] == MissObsSeq(oracle::tokens(a, "a")));
}

TEST_CASE("short-trajectory learner drops segments below 2l+1") {
    Alphabet a({"a", "b"});
    std::vector<MissObsSeq> data{MissObsSeq(oracle::tokens(a, "abba_ab_abbabaa"))};
    LearnParams params;
    params.dim = 1;
    params.word_length = 2;
    params.top_k = std::nullopt;
    params.mode = LearnMode::ShortTrajectory;
    LearnReport report;
    learn_oom(data, a, params, &report);
    CHECK(report.segments_kept == 1);
    CHECK(report.segments_dropped == 2);
    CHECK(report.missing_values == 2);
    CHECK(format_report(report).find("segments_dropped: 2") != std::string::npos);

    std::vector<MissObsSeq> chopped{MissObsSeq(oracle::tokens(a, "ab_ab_ba"))};
    CHECK_THROWS_WITH_AS(learn_oom(chopped, a, params), doctest::Contains("usable length 5"),
                         std::invalid_argument);
    params.mode = LearnMode::MissingValue;
    CHECK_NOTHROW(learn_oom(chopped, a, params));
}

TEST_CASE("learning from sampled data approaches the truth") {
    Hmm h = gen_ring_hmm(3, 3, 2, 41);
    Oom<double> truth = hmm_to_oom(stationary_hmm(h));
    auto words = sample_hmm(h, 200000, 1, 1000, 42);
    std::vector<MissObsSeq> data{MissObsSeq::from_word(words[0])};
    LearnParams params;
    params.dim = 3;
    params.word_length = 2;
    LearnReport report;
    Oom<double> learned = learn_missing_value_oom(data, h.alphabet, params, &report);
    CHECK(report.total_length == 200000);
    CHECK(report.q_words == report.c_words);
    for (const Word &w : oracle::words_up_to(3, 3)) {
        CHECK(std::abs(external_fn(learned, w) - external_fn(truth, w)) < 0.01);
    }
}

TEST_CASE("learn mode names") {
    CHECK(parse_learn_mode("missing") == LearnMode::MissingValue);
    CHECK(parse_learn_mode("short") == LearnMode::ShortTrajectory);
    CHECK(to_string(LearnMode::ShortTrajectory) == "short");
    CHECK_THROWS_AS(parse_learn_mode("long"), std::invalid_argument);
}

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

#include "oomiss/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oomiss {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

std::size_t Rng::categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("categorical weights must have positive sum");
    const double u = uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last = i;
        if (u < acc) return i;
    }
    return last;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void Hmm::validate() const {
    const Index n = transition.rows();
    if (n < 1 || transition.cols() != n) throw std::invalid_argument("transition must be square");
    if (emission.rows() != n || emission.cols() != static_cast<Index>(alphabet.size())) {
        throw std::invalid_argument("emission must be n_states x |alphabet|");
    }
    if (initial.size() != n) throw std::invalid_argument("initial must have n_states entries");
    auto check_rows = [](const Matrix<double> &m, const char *name) {
        for (Index i = 0; i < m.rows(); ++i) {
            if ((m.row(i).array() < 0.0).any()) {
                throw std::invalid_argument(std::string(name) + " has a negative entry");
            }
            if (std::abs(m.row(i).sum() - 1.0) > 1e-12) {
                throw std::invalid_argument(std::string(name) + " row " + std::to_string(i) +
                                            " does not sum to 1");
            }
        }
    };
    check_rows(transition, "transition");
    check_rows(emission, "emission");
    if ((initial.array() < 0.0).any() || std::abs(initial.sum() - 1.0) > 1e-12) {
        throw std::invalid_argument("initial is not a probability vector");
    }
}

Hmm gen_ring_hmm(Index n_states, Index n_obs, Index max_obs_per_state, std::uint64_t seed) {
    if (n_states < 2 || n_obs < 1 || max_obs_per_state < 1) {
        throw std::invalid_argument("ring HMM needs n_states >= 2, n_obs >= 1, max_obs_per_state >= 1");
    }
    Rng rng(seed);
    Hmm hmm;
    hmm.alphabet = Alphabet::numbered(static_cast<std::size_t>(n_obs));

    hmm.transition = Matrix<double>::Zero(n_states, n_states);
    for (Index i = 0; i < n_states; ++i) {
        for (Index offset : {n_states - 1, Index{0}, Index{1}}) {
            // Assignment, not +=: for n_states == 2 the two neighbours coincide.
            hmm.transition(i, (i + offset) % n_states) = rng.uniform();
        }
    }

    hmm.emission = Matrix<double>::Zero(n_states, n_obs);
    const Index support = std::min(max_obs_per_state, n_obs);
    std::vector<Index> symbols(static_cast<std::size_t>(n_obs));
    for (Index i = 0; i < n_states; ++i) {
        // Resample until the row has some mass.
        do {
            std::iota(symbols.begin(), symbols.end(), Index{0});
            hmm.emission.row(i).setZero();
            for (Index k = 0; k < support; ++k) {
                const auto pick = static_cast<std::size_t>(k) +
                                  static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_obs - k)));
                std::swap(symbols[static_cast<std::size_t>(k)], symbols[pick]);
                hmm.emission(i, symbols[static_cast<std::size_t>(k)]) = rng.uniform();
            }
        } while (!(hmm.emission.row(i).sum() > 0.0));
    }

    hmm.initial.resize(n_states);
    do {
        for (Index i = 0; i < n_states; ++i) hmm.initial(i) = rng.uniform();
    } while (!(hmm.initial.sum() > 0.0));

    for (Index i = 0; i < n_states; ++i) {
        while (!(hmm.transition.row(i).sum() > 0.0)) {
            for (Index offset : {n_states - 1, Index{0}, Index{1}}) {
                hmm.transition(i, (i + offset) % n_states) = rng.uniform();
            }
        }
        hmm.transition.row(i) /= hmm.transition.row(i).sum();
        hmm.emission.row(i) /= hmm.emission.row(i).sum();
    }
    hmm.initial /= hmm.initial.sum();
    return hmm;
}

namespace {

Index draw(Rng &rng, const auto &probs) {
    double acc = 0.0;
    const double u = rng.uniform();
    Index last = 0;
    for (Index i = 0; i < probs.size(); ++i) {
        if (probs(i) <= 0.0) continue;
        acc += probs(i);
        last = i;
        if (u < acc) return i;
    }
    return last;
}

} // namespace

std::vector<Word> sample_hmm(const Hmm &hmm, std::size_t length, std::size_t count,
                             std::size_t burn_in, std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("sample length must be at least 1");
    hmm.validate();
    std::vector<Word> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        Rng rng(derive_seed(seed, j));
        Word traj;
        traj.reserve(length);
        Index state = draw(rng, hmm.initial);
        for (std::size_t t = 0; t < burn_in + length; ++t) {
            const auto symbol = static_cast<SymbolId>(draw(rng, hmm.emission.row(state)));
            if (t >= burn_in) traj.push_back(symbol);
            state = draw(rng, hmm.transition.row(state));
        }
        out.push_back(std::move(traj));
    }
    return out;
}

Vector<double> hmm_stationary(const Hmm &hmm) {
    // Solve (T^T - I) pi = 0 with sum(pi) = 1 by replacing one equation.
    const Index n = hmm.n_states();
    Matrix<double> a = hmm.transition.transpose() - Matrix<double>::Identity(n, n);
    a.row(n - 1).setOnes();
    Vector<double> b = Vector<double>::Zero(n);
    b(n - 1) = 1.0;
    Vector<double> pi = a.fullPivLu().solve(b);
    return pi;
}

Hmm stationary_hmm(const Hmm &hmm) {
    Hmm out = hmm;
    out.initial = hmm_stationary(hmm);
    return out;
}

Oom<double> hmm_to_oom(const Hmm &hmm) {
    const Index n = hmm.n_states();
    std::vector<Matrix<double>> tau;
    tau.reserve(hmm.alphabet.size());
    const Matrix<double> tt = hmm.transition.transpose();
    for (Index x = 0; x < hmm.emission.cols(); ++x) {
        tau.push_back(tt * hmm.emission.col(x).asDiagonal());
    }
    return Oom<double>(hmm.alphabet, RowVector<double>::Ones(n), std::move(tau), hmm.initial);
}

namespace {

void check_word(const Hmm &hmm, const Word &word) {
    for (SymbolId s : word) {
        if (s < 0 || static_cast<std::size_t>(s) >= hmm.alphabet.size()) {
            throw std::domain_error("symbol id " + std::to_string(s) + " is not in the HMM alphabet");
        }
    }
}

// alpha(i) = P(prefix, S_t = i) after the last emission, before transition.
RowVector<double> forward(const Hmm &hmm, const Word &word) {
    RowVector<double> alpha = hmm.initial.transpose();
    for (std::size_t t = 0; t < word.size(); ++t) {
        if (t > 0) alpha = alpha * hmm.transition;
        alpha = alpha.cwiseProduct(hmm.emission.col(word[t]).transpose());
    }
    return alpha;
}

} // namespace

double forward_prob(const Hmm &hmm, const Word &word) {
    check_word(hmm, word);
    return forward(hmm, word).sum();
}

Vector<double> hmm_conditional(const Hmm &hmm, const Word &prefix) {
    check_word(hmm, prefix);
    RowVector<double> state;
    if (prefix.empty()) {
        state = hmm.initial.transpose();
    } else {
        RowVector<double> alpha = forward(hmm, prefix);
        const double total = alpha.sum();
        if (!(total > 0.0)) throw std::domain_error("conditioning prefix has zero probability");
        state = (alpha / total) * hmm.transition;
    }
    Vector<double> next = (state * hmm.emission).transpose();
    return next / next.sum();
}

void AmsarTriggerPolicy::validate(const Alphabet &alphabet) const {
    if (!(miss_prob >= 0.0 && miss_prob <= 1.0)) {
        throw std::invalid_argument("miss probability must lie in [0, 1]");
    }
    for (SymbolId s : triggers) {
        if (s < 0 || static_cast<std::size_t>(s) >= alphabet.size()) {
            throw std::invalid_argument("trigger symbol outside the alphabet");
        }
    }
}

double AmsarTriggerPolicy::miss_probability(std::span<const ObsToken> observed_prefix) const {
    if (observed_prefix.empty()) return 0.0;
    const ObsToken &last = observed_prefix.back();
    if (last.is_missing()) return 0.0;
    return triggers.count(last.symbol()) ? miss_prob : 0.0;
}

MissObsSeq corrupt_amsar(const Word &traj, const AmsarTriggerPolicy &policy, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ObsToken> obs;
    obs.reserve(traj.size());
    for (SymbolId x : traj) {
        const double p = policy.miss_probability(obs);
        const bool miss = p > 0.0 && rng.uniform() < p;
        obs.push_back(miss ? ObsToken::missing() : ObsToken::concrete(x));
    }
    return MissObsSeq(std::move(obs));
}

AmsarTriggerPolicy trigger_policy(const Alphabet &alphabet, std::size_t n_triggers, double miss_prob,
                                  std::uint64_t seed) {
    if (alphabet.size() < n_triggers) {
        throw std::invalid_argument("alphabet of size " + std::to_string(alphabet.size()) +
                                    " cannot supply " + std::to_string(n_triggers) + " triggers");
    }
    Rng rng(seed);
    std::vector<SymbolId> symbols(alphabet.size());
    std::iota(symbols.begin(), symbols.end(), SymbolId{0});
    AmsarTriggerPolicy policy;
    policy.miss_prob = miss_prob;
    for (std::size_t k = 0; k < n_triggers; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.below(symbols.size() - k));
        std::swap(symbols[k], symbols[pick]);
        policy.triggers.insert(symbols[k]);
    }
    policy.validate(alphabet);
    return policy;
}

AmsarTriggerPolicy mild_policy(const Alphabet &alphabet, std::uint64_t seed) {
    return trigger_policy(alphabet, 5, 0.3, seed);
}

AmsarTriggerPolicy severe_policy(const Alphabet &alphabet, std::uint64_t seed) {
    return trigger_policy(alphabet, 10, 0.5, seed);
}

} // namespace oomiss

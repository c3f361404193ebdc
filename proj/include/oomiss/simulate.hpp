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
#include <random>
#include <set>
#include <span>
#include <vector>

#include "oomiss/alphabet.hpp"
#include "oomiss/oom.hpp"

namespace oomiss {

/**
 * Seeded generator. The engine is std::mt19937_64, whose output sequence is
 * fixed by the C++ standard; uniform doubles are built from the top 53 bits
 * directly instead of going through <random> distributions, whose outputs
 * are implementation-defined. Same seed, same stream, on every platform.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n);
    /// Index drawn with probability proportional to `weights` (must sum > 0).
    std::size_t categorical(std::span<const double> weights);

  private:
    std::mt19937_64 engine_;
};

/// splitmix64 finaliser of seed ^ stream; used to derive independent seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct Hmm {
    Alphabet alphabet;
    Matrix<double> transition; // n x n, row-stochastic
    Matrix<double> emission;   // n x |Sigma|, row-stochastic
    Vector<double> initial;    // n

    Index n_states() const { return transition.rows(); }
    /// Throws std::invalid_argument on shape or stochasticity violations.
    void validate() const;
};

/**
 * Ring-topology HMM: state i moves only to i-1, i, i+1 (mod n); each state
 * emits at most `max_obs_per_state` randomly chosen symbols. Nonzero entries
 * are uniform [0,1) and then row-normalised.
 */
Hmm gen_ring_hmm(Index n_states, Index n_obs, Index max_obs_per_state, std::uint64_t seed);

/// `count` trajectories of `length` after discarding `burn_in` emissions.
std::vector<Word> sample_hmm(const Hmm &hmm, std::size_t length, std::size_t count,
                             std::size_t burn_in, std::uint64_t seed);

/// Stationary distribution of the transition matrix (pi T = pi).
Vector<double> hmm_stationary(const Hmm &hmm);

/// The same HMM started from its stationary distribution.
Hmm stationary_hmm(const Hmm &hmm);

/**
 * OOM whose state is the joint distribution of the current hidden state and
 * the emitted prefix: sigma = 1^T, omega = initial, tau_x = T^T diag(B[:, x]).
 */
Oom<double> hmm_to_oom(const Hmm &hmm);

/// P(X_1..n = word) by the forward recursion.
double forward_prob(const Hmm &hmm, const Word &word);

/// P(X_{t+1} = . | X_1..t = prefix).
Vector<double> hmm_conditional(const Hmm &hmm, const Word &prefix);

/**
 * Missingness that reads only the observed history: after an observed
 * trigger symbol the next value goes missing with probability miss_prob.
 */
struct AmsarTriggerPolicy {
    std::set<SymbolId> triggers;
    double miss_prob = 0.0;

    void validate(const Alphabet &alphabet) const;

    /// Probability that the next position is missing, given the observed
    /// prefix. The interface admits nothing else.
    double miss_probability(std::span<const ObsToken> observed_prefix) const;
};

/// Corrupts one trajectory; true values at missing positions are dropped.
MissObsSeq corrupt_amsar(const Word &traj, const AmsarTriggerPolicy &policy, std::uint64_t seed);

/// `n_triggers` distinct symbols drawn uniformly, fixed miss probability.
AmsarTriggerPolicy trigger_policy(const Alphabet &alphabet, std::size_t n_triggers, double miss_prob,
                                  std::uint64_t seed);
/// 5 triggers, probability 0.3.
AmsarTriggerPolicy mild_policy(const Alphabet &alphabet, std::uint64_t seed);
/// 10 triggers, probability 0.5.
AmsarTriggerPolicy severe_policy(const Alphabet &alphabet, std::uint64_t seed);

} // namespace oomiss

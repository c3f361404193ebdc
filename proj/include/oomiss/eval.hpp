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

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "oomiss/oom.hpp"
#include "oomiss/simulate.hpp"

namespace oomiss {

struct RobustEvalConfig {
    double floor = 1e-6; // replaces negative predictions; must be < 1/|Sigma|
    bool renormalize = true;

    void validate(std::size_t alphabet_size) const;
};

struct RobustStats {
    std::size_t clamps = 0; // negative predictions replaced by the floor
    std::size_t resets = 0; // state re-initialisations after a nonpositive normaliser

    RobustStats &operator+=(const RobustStats &o) {
        clamps += o.clamps;
        resets += o.resets;
        return *this;
    }
};

/**
 * One-step predictor over an OOM that always yields a distribution.
 *
 * The state w is kept at sigma w = 1. Predictions sigma tau_x w that come
 * out negative are replaced by the floor and the vector is renormalised. If
 * sigma tau_o w <= 0 for the realised symbol o, w is reset to the reset
 * state: the stationary state when the model has one, else the start state.
 * On an exact model none of this triggers and the output is the exact
 * conditional distribution.
 */
class RobustPredictor {
  public:
    RobustPredictor(const Oom<double> &model, RobustEvalConfig cfg,
                    std::optional<Vector<double>> start = std::nullopt);

    Vector<double> predict();
    void observe(SymbolId symbol);
    /// Rewinds to the start state; stats are kept.
    void restart();

    const RobustStats &stats() const { return stats_; }

  private:
    const Oom<double> *model_;
    RobustEvalConfig cfg_;
    Vector<double> start_;
    Vector<double> reset_;
    Vector<double> state_;
    RobustStats stats_;
};

/// Distribution of the next symbol after `prefix`, from the model's omega.
Vector<double> oom_conditional_robust(const Oom<double> &model, const Word &prefix,
                                      const RobustEvalConfig &cfg = {}, RobustStats *stats = nullptr);

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/**
 * log2 of the mean squared difference between predicted and true one-step
 * conditionals, averaged over symbols, steps and trajectories. Returns
 * kNegInf when every difference is exactly zero.
 *
 * The HMM overload starts the true model from its stationary distribution;
 * the OOM overload uses the true model's omega as given.
 */
double laospe(const Oom<double> &model, const Hmm &truth, std::span<const Word> test,
              const RobustEvalConfig &cfg = {}, RobustStats *stats = nullptr);
double laospe(const Oom<double> &model, const Oom<double> &truth, std::span<const Word> test,
              const RobustEvalConfig &cfg = {}, RobustStats *stats = nullptr);

/// -mean over trajectories of log2 P(x) / |x|, P from robust conditionals.
double anll(const Oom<double> &model, std::span<const Word> test, const RobustEvalConfig &cfg = {},
            RobustStats *stats = nullptr);

/// Rejects test data with missing values and returns the plain words.
std::vector<Word> require_missing_free(std::span<const MissObsSeq> data);

/// d = 1 model predicting `probs` at every step.
Oom<double> iid_oom(const Alphabet &alphabet, const Vector<double> &probs);

} // namespace oomiss

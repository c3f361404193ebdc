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

#include "oomiss/eval.hpp"

#include <stdexcept>
#include <string>

namespace oomiss {

void RobustEvalConfig::validate(std::size_t alphabet_size) const {
    if (!(floor > 0.0) || !(floor < 1.0 / static_cast<double>(alphabet_size))) {
        throw std::invalid_argument("probability floor must lie in (0, 1/|alphabet|)");
    }
}

namespace {

// Scales w to sigma w = 1; false if that is impossible.
bool normalise(const RowVector<double> &sigma, Vector<double> &w) {
    const double mass = sigma.dot(w.transpose());
    if (!(mass > 0.0) || !std::isfinite(mass)) return false;
    if (mass != 1.0) w /= mass;
    return true;
}

} // namespace

RobustPredictor::RobustPredictor(const Oom<double> &model, RobustEvalConfig cfg,
                                 std::optional<Vector<double>> start)
    : model_(&model), cfg_(cfg) {
    cfg_.validate(model.alphabet().size());
    start_ = start ? *start : model.omega();
    if (start_.size() != model.dim()) throw std::invalid_argument("start state has the wrong length");

    bool have_reset = false;
    try {
        reset_ = stationary_state(model);
        have_reset = normalise(model.sigma(), reset_);
    } catch (const std::exception &) {
        have_reset = false;
    }
    if (!have_reset) reset_ = start_;

    if (!normalise(model.sigma(), start_)) {
        // Degenerate start; fall back to the reset state, or a state with
        // sigma w = 1 along sigma itself.
        if (normalise(model.sigma(), reset_)) {
            start_ = reset_;
        } else {
            const double n2 = model.sigma().squaredNorm();
            if (!(n2 > 0.0)) throw std::invalid_argument("model has a zero evaluation row");
            start_ = model.sigma().transpose() / n2;
            reset_ = start_;
        }
        ++stats_.resets;
    }
    if (!normalise(model.sigma(), reset_)) reset_ = start_;
    state_ = start_;
}

void RobustPredictor::restart() { state_ = start_; }

Vector<double> RobustPredictor::predict() {
    const Oom<double> &m = *model_;
    const auto k = static_cast<Index>(m.alphabet().size());
    Vector<double> p(k);
    for (Index x = 0; x < k; ++x) {
        double v = m.sigma().dot((m.tau(static_cast<SymbolId>(x)) * state_).transpose());
        if (!(v >= 0.0)) {
            v = cfg_.floor;
            ++stats_.clamps;
        }
        p(x) = v;
    }
    const double total = p.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
        ++stats_.clamps;
        return Vector<double>::Constant(k, 1.0 / static_cast<double>(k));
    }
    if (cfg_.renormalize) p /= total;
    return p;
}

void RobustPredictor::observe(SymbolId symbol) {
    Vector<double> next = model_->tau(symbol) * state_;
    if (normalise(model_->sigma(), next)) {
        state_ = std::move(next);
    } else {
        state_ = reset_;
        ++stats_.resets;
    }
}

Vector<double> oom_conditional_robust(const Oom<double> &model, const Word &prefix,
                                      const RobustEvalConfig &cfg, RobustStats *stats) {
    RobustPredictor pred(model, cfg);
    for (SymbolId x : prefix) pred.observe(x);
    Vector<double> p = pred.predict();
    if (stats) *stats += pred.stats();
    return p;
}

namespace {

void check_test(std::span<const Word> test, const Alphabet &alphabet) {
    if (test.empty()) throw std::invalid_argument("test set is empty");
    for (const Word &w : test) {
        if (w.empty()) throw std::invalid_argument("test trajectory is empty");
        for (SymbolId s : w) {
            if (s < 0) throw std::invalid_argument("test data must not contain missing values");
            if (static_cast<std::size_t>(s) >= alphabet.size()) {
                throw std::domain_error("test symbol id outside the model alphabet");
            }
        }
    }
}

double laospe_impl(const Oom<double> &model, const Oom<double> &truth, std::span<const Word> test,
                   const RobustEvalConfig &cfg, RobustStats *stats) {
    check_test(test, model.alphabet());
    if (truth.alphabet().size() != model.alphabet().size()) {
        throw std::invalid_argument("model and true model alphabets differ in size");
    }
    RobustPredictor learned(model, cfg);
    RobustPredictor exact(truth, cfg);
    const double k = static_cast<double>(model.alphabet().size());
    double outer = 0.0;
    for (const Word &traj : test) {
        learned.restart();
        exact.restart();
        double inner = 0.0;
        for (SymbolId x : traj) {
            inner += (learned.predict() - exact.predict()).squaredNorm() / k;
            learned.observe(x);
            exact.observe(x);
        }
        outer += inner / static_cast<double>(traj.size());
    }
    if (stats) *stats += learned.stats();
    const double mean = outer / static_cast<double>(test.size());
    if (mean == 0.0) return kNegInf;
    return std::log2(mean);
}

} // namespace

double laospe(const Oom<double> &model, const Hmm &truth, std::span<const Word> test,
              const RobustEvalConfig &cfg, RobustStats *stats) {
    const Oom<double> exact = hmm_to_oom(stationary_hmm(truth));
    return laospe_impl(model, exact, test, cfg, stats);
}

double laospe(const Oom<double> &model, const Oom<double> &truth, std::span<const Word> test,
              const RobustEvalConfig &cfg, RobustStats *stats) {
    return laospe_impl(model, truth, test, cfg, stats);
}

double anll(const Oom<double> &model, std::span<const Word> test, const RobustEvalConfig &cfg,
            RobustStats *stats) {
    check_test(test, model.alphabet());
    RobustPredictor pred(model, cfg);
    double total = 0.0;
    for (const Word &traj : test) {
        pred.restart();
        double log_p = 0.0;
        for (SymbolId x : traj) {
            log_p += std::log2(pred.predict()(x));
            pred.observe(x);
        }
        total += log_p / static_cast<double>(traj.size());
    }
    if (stats) *stats += pred.stats();
    return -total / static_cast<double>(test.size());
}

std::vector<Word> require_missing_free(std::span<const MissObsSeq> data) {
    std::vector<Word> out;
    out.reserve(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        Word w;
        w.reserve(data[j].size());
        for (const ObsToken &o : data[j].obs()) {
            if (o.is_missing()) {
                throw std::invalid_argument("test trajectory " + std::to_string(j + 1) +
                                            " contains missing values");
            }
            w.push_back(o.symbol());
        }
        out.push_back(std::move(w));
    }
    return out;
}

Oom<double> iid_oom(const Alphabet &alphabet, const Vector<double> &probs) {
    if (probs.size() != static_cast<Index>(alphabet.size())) {
        throw std::invalid_argument("one probability per symbol required");
    }
    std::vector<Matrix<double>> tau;
    for (Index x = 0; x < probs.size(); ++x) tau.push_back(Matrix<double>::Constant(1, 1, probs(x)));
    return Oom<double>(alphabet, RowVector<double>::Ones(1), std::move(tau), Vector<double>::Ones(1));
}

} // namespace oomiss

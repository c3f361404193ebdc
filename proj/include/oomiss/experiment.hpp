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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oomiss/eval.hpp"
#include "oomiss/learner.hpp"
#include "oomiss/simulate.hpp"

namespace oomiss {

/**
 * Flat `key = value` text: one pair per line, '#' comments, values are
 * numbers, bare words, "quoted strings" or [comma, separated, lists].
 * Every value is kept as a list of strings; scalars have one element.
 */
class FlatConfig {
  public:
    static FlatConfig parse(const std::string &text);

    bool has(const std::string &key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string &key) const;
    long long get_int(const std::string &key) const;
    double get_double(const std::string &key) const;
    std::vector<std::string> get_list(const std::string &key) const;
    std::vector<long long> get_int_list(const std::string &key) const;

    std::vector<std::string> keys() const;

  private:
    const std::vector<std::string> &raw(const std::string &key) const;
    std::map<std::string, std::vector<std::string>> values_;
    std::map<std::string, std::size_t> lines_;
};

enum class PolicyKind { Mild, Severe, Custom };

struct ExperimentConfig {
    // Ground truth: a file, or a generated ring HMM.
    std::optional<std::filesystem::path> hmm_path;
    Index n_states = 10;
    Index n_obs = 10;
    Index max_obs_per_state = 2;

    PolicyKind policy = PolicyKind::Severe;
    std::optional<std::size_t> n_triggers; // overrides 5 / 10 for mild / severe
    std::optional<double> miss_prob;       // overrides 0.3 / 0.5
    std::vector<std::string> triggers;     // custom only

    std::vector<std::size_t> train_lengths; // ascending; shorter sets are prefixes
    std::size_t train_burn_in = 1000;
    std::size_t test_count = 500;
    std::size_t test_length = 100;
    std::size_t test_burn_in = 1000;

    std::map<LearnMode, LearnParams> models;
    std::vector<std::string> metrics{"laospe"};
    std::vector<std::uint64_t> seeds;
    RobustEvalConfig robust;
    std::optional<std::filesystem::path> output;

    void validate() const;
};

/// Throws FormatError naming the key for unknown keys or bad values.
ExperimentConfig parse_experiment_config(const std::string &text);
ExperimentConfig read_experiment_config(const std::filesystem::path &path);

struct CurvePoint {
    std::string model;
    std::size_t train_len = 0;
    std::size_t missing_count = 0;
    std::string metric;
    std::optional<double> value; // empty when learning failed
    std::uint64_t seed = 0;
    std::string reason;
};

/**
 * For each seed: build the truth, sample one burned-in training trajectory
 * of the largest length, corrupt it, and learn every model kind on each
 * prefix. Test trajectories are burned in and missing-free.
 */
std::vector<CurvePoint> learning_curve(const ExperimentConfig &config);

/// Header `model,train_len,missing_count,metric,value,seed`; failed runs leave value empty.
std::string format_curve_csv(const std::vector<CurvePoint> &points);

} // namespace oomiss

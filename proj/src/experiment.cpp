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

#include "oomiss/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "oomiss/io.hpp"

namespace oomiss {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string &s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

// Drops a trailing comment that is not inside quotes.
std::string strip_comment(const std::string &line) {
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

} // namespace

FlatConfig FlatConfig::parse(const std::string &text) {
    FlatConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("config line " + std::to_string(number) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw FormatError("config line " + std::to_string(number) + ": empty key or value");
        }
        if (cfg.values_.count(key)) {
            throw FormatError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
        }
        std::vector<std::string> items;
        if (value.front() == '[') {
            if (value.back() != ']') {
                throw FormatError("config line " + std::to_string(number) + ": unterminated list");
            }
            const std::string body = value.substr(1, value.size() - 2);
            std::size_t pos = 0;
            while (pos <= body.size()) {
                const auto comma = body.find(',', pos);
                const std::string item =
                    trim(body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
                if (!item.empty()) items.push_back(unquote(item));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        } else {
            items.push_back(unquote(value));
        }
        cfg.values_[key] = std::move(items);
        cfg.lines_[key] = number;
    }
    return cfg;
}

const std::vector<std::string> &FlatConfig::raw(const std::string &key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw FormatError("config: missing key '" + key + "'");
    return it->second;
}

std::string FlatConfig::get_string(const std::string &key) const {
    const auto &v = raw(key);
    if (v.size() != 1) throw FormatError("config key '" + key + "' must be a single value");
    return v[0];
}

namespace {

long long to_int(const std::string &key, const std::string &s) {
    long long out = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw FormatError("config key '" + key + "': '" + s + "' is not an integer");
    }
    return out;
}

double to_double(const std::string &key, const std::string &s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw FormatError("config key '" + key + "': '" + s + "' is not a number");
    }
}

} // namespace

long long FlatConfig::get_int(const std::string &key) const { return to_int(key, get_string(key)); }

double FlatConfig::get_double(const std::string &key) const {
    return to_double(key, get_string(key));
}

std::vector<std::string> FlatConfig::get_list(const std::string &key) const { return raw(key); }

std::vector<long long> FlatConfig::get_int_list(const std::string &key) const {
    std::vector<long long> out;
    for (const auto &s : raw(key)) out.push_back(to_int(key, s));
    return out;
}

std::vector<std::string> FlatConfig::keys() const {
    std::vector<std::string> out;
    for (const auto &[k, v] : values_) out.push_back(k);
    return out;
}

void ExperimentConfig::validate() const {
    if (train_lengths.empty()) throw FormatError("config: train_lengths must not be empty");
    for (std::size_t i = 0; i < train_lengths.size(); ++i) {
        if (train_lengths[i] == 0) throw FormatError("config: train_lengths must be positive");
        if (i && train_lengths[i] <= train_lengths[i - 1]) {
            throw FormatError("config: train_lengths must be strictly ascending");
        }
    }
    if (models.empty()) throw FormatError("config: models must not be empty");
    if (seeds.empty()) throw FormatError("config: seeds must not be empty");
    if (test_count == 0 || test_length == 0) throw FormatError("config: empty test set");
    for (const auto &m : metrics) {
        if (m != "laospe" && m != "anll") throw FormatError("config: unknown metric '" + m + "'");
    }
    if (policy == PolicyKind::Custom && triggers.empty()) {
        throw FormatError("config: policy custom needs triggers");
    }
    if (miss_prob && !(*miss_prob >= 0.0 && *miss_prob <= 1.0)) {
        throw FormatError("config: miss_prob must lie in [0, 1]");
    }
}

ExperimentConfig parse_experiment_config(const std::string &text) {
    const FlatConfig flat = FlatConfig::parse(text);
    static const std::set<std::string> known = {
        "hmm",          "n_states",     "n_obs",       "max_obs_per_state", "policy",
        "n_triggers",   "miss_prob",    "triggers",    "train_lengths",     "train_burn_in",
        "test_count",   "test_length",  "test_burn_in", "models",           "dim",
        "word_len",     "top_k",        "metrics",     "seeds",             "output",
        "floor"};
    for (const auto &key : flat.keys()) {
        const auto dot = key.find('.');
        if (dot != std::string::npos) {
            const std::string kind = key.substr(0, dot);
            const std::string leaf = key.substr(dot + 1);
            if ((kind != "missing" && kind != "short") ||
                (leaf != "dim" && leaf != "word_len" && leaf != "top_k")) {
                throw FormatError("config: unknown key '" + key + "'");
            }
        } else if (!known.count(key)) {
            throw FormatError("config: unknown key '" + key + "'");
        }
    }

    auto non_negative = [&flat](const std::string &key) {
        const long long v = flat.get_int(key);
        if (v < 0) throw FormatError("config key '" + key + "' must be nonnegative");
        return v;
    };

    ExperimentConfig cfg;
    if (flat.has("hmm")) cfg.hmm_path = flat.get_string("hmm");
    if (flat.has("n_states")) cfg.n_states = static_cast<Index>(non_negative("n_states"));
    if (flat.has("n_obs")) cfg.n_obs = static_cast<Index>(non_negative("n_obs"));
    if (flat.has("max_obs_per_state")) {
        cfg.max_obs_per_state = static_cast<Index>(non_negative("max_obs_per_state"));
    }
    if (flat.has("policy")) {
        const std::string p = flat.get_string("policy");
        if (p == "mild") cfg.policy = PolicyKind::Mild;
        else if (p == "severe") cfg.policy = PolicyKind::Severe;
        else if (p == "custom") cfg.policy = PolicyKind::Custom;
        else throw FormatError("config key 'policy': expected mild, severe or custom");
    }
    if (flat.has("n_triggers")) cfg.n_triggers = static_cast<std::size_t>(non_negative("n_triggers"));
    if (flat.has("miss_prob")) cfg.miss_prob = flat.get_double("miss_prob");
    if (flat.has("triggers")) cfg.triggers = flat.get_list("triggers");
    if (flat.has("train_lengths")) {
        for (long long v : flat.get_int_list("train_lengths")) {
            if (v <= 0) throw FormatError("config key 'train_lengths' must be positive");
            cfg.train_lengths.push_back(static_cast<std::size_t>(v));
        }
    }
    if (flat.has("train_burn_in")) cfg.train_burn_in = static_cast<std::size_t>(non_negative("train_burn_in"));
    if (flat.has("test_count")) cfg.test_count = static_cast<std::size_t>(non_negative("test_count"));
    if (flat.has("test_length")) cfg.test_length = static_cast<std::size_t>(non_negative("test_length"));
    if (flat.has("test_burn_in")) cfg.test_burn_in = static_cast<std::size_t>(non_negative("test_burn_in"));

    LearnParams base;
    base.dim = cfg.n_states;
    if (flat.has("dim")) base.dim = static_cast<Index>(non_negative("dim"));
    if (flat.has("word_len")) base.word_length = static_cast<std::size_t>(non_negative("word_len"));
    auto parse_top_k = [&flat](const std::string &key) -> std::optional<std::size_t> {
        const std::string v = flat.get_string(key);
        if (v == "all") return std::nullopt;
        const long long k = to_int(key, v);
        if (k <= 0) throw FormatError("config key '" + key + "' must be positive or all");
        return static_cast<std::size_t>(k);
    };
    if (flat.has("top_k")) base.top_k = parse_top_k("top_k");

    std::vector<std::string> kinds{"missing", "short"};
    if (flat.has("models")) kinds = flat.get_list("models");
    for (const auto &kind : kinds) {
        LearnParams p = base;
        try {
            p.mode = parse_learn_mode(kind);
        } catch (const std::invalid_argument &e) {
            throw FormatError(std::string("config key 'models': ") + e.what());
        }
        if (flat.has(kind + ".dim")) p.dim = static_cast<Index>(non_negative(kind + ".dim"));
        if (flat.has(kind + ".word_len")) {
            p.word_length = static_cast<std::size_t>(non_negative(kind + ".word_len"));
        }
        if (flat.has(kind + ".top_k")) p.top_k = parse_top_k(kind + ".top_k");
        cfg.models[p.mode] = p;
    }

    if (flat.has("metrics")) cfg.metrics = flat.get_list("metrics");
    if (flat.has("seeds")) {
        for (long long s : flat.get_int_list("seeds")) {
            if (s < 0) throw FormatError("config key 'seeds' must be nonnegative");
            cfg.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }
    if (flat.has("output")) cfg.output = flat.get_string("output");
    if (flat.has("floor")) cfg.robust.floor = flat.get_double("floor");
    cfg.validate();
    return cfg;
}

ExperimentConfig read_experiment_config(const std::filesystem::path &path) {
    try {
        return parse_experiment_config(read_text(path));
    } catch (const FormatError &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

namespace {

// Stream ids for derive_seed.
enum : std::uint64_t { kHmmStream = 1, kPolicyStream, kTrainStream, kCorruptStream, kTestStream };

AmsarTriggerPolicy make_policy(const ExperimentConfig &cfg, const Alphabet &alphabet,
                               std::uint64_t seed) {
    switch (cfg.policy) {
    case PolicyKind::Mild:
        return trigger_policy(alphabet, cfg.n_triggers.value_or(5), cfg.miss_prob.value_or(0.3), seed);
    case PolicyKind::Severe:
        return trigger_policy(alphabet, cfg.n_triggers.value_or(10), cfg.miss_prob.value_or(0.5), seed);
    case PolicyKind::Custom: {
        AmsarTriggerPolicy p;
        for (const auto &s : cfg.triggers) p.triggers.insert(alphabet.index(s));
        p.miss_prob = cfg.miss_prob.value_or(0.5);
        p.validate(alphabet);
        return p;
    }
    }
    throw std::logic_error("unhandled policy kind");
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

std::vector<CurvePoint> learning_curve(const ExperimentConfig &config) {
    config.validate();
    std::vector<CurvePoint> points;
    const std::size_t longest = config.train_lengths.back();

    for (std::uint64_t seed : config.seeds) {
        const Hmm hmm = config.hmm_path ? read_hmm(*config.hmm_path)
                                        : gen_ring_hmm(config.n_states, config.n_obs,
                                                       config.max_obs_per_state,
                                                       derive_seed(seed, kHmmStream));
        const AmsarTriggerPolicy policy =
            make_policy(config, hmm.alphabet, derive_seed(seed, kPolicyStream));
        const Word train =
            sample_hmm(hmm, longest, 1, config.train_burn_in, derive_seed(seed, kTrainStream)).front();
        const MissObsSeq corrupted = corrupt_amsar(train, policy, derive_seed(seed, kCorruptStream));
        const std::vector<Word> test = sample_hmm(hmm, config.test_length, config.test_count,
                                                  config.test_burn_in, derive_seed(seed, kTestStream));

        for (std::size_t len : config.train_lengths) {
            const std::vector<MissObsSeq> data{corrupted.prefix(len)};
            const std::size_t missing = data.front().missing_count();
            for (const auto &[mode, params] : config.models) {
                std::optional<Oom<double>> model;
                std::string reason;
                try {
                    model = learn_oom(data, hmm.alphabet, params);
                } catch (const std::exception &e) {
                    reason = sanitize(e.what());
                }
                for (const auto &metric : config.metrics) {
                    CurvePoint pt;
                    pt.model = to_string(mode);
                    pt.train_len = len;
                    pt.missing_count = missing;
                    pt.metric = metric;
                    pt.seed = seed;
                    pt.reason = reason;
                    if (model) {
                        pt.value = metric == "laospe" ? laospe(*model, hmm, test, config.robust)
                                                      : anll(*model, test, config.robust);
                    }
                    points.push_back(std::move(pt));
                }
            }
        }
    }
    return points;
}

std::string format_curve_csv(const std::vector<CurvePoint> &points) {
    std::string out = "model,train_len,missing_count,metric,value,seed\n";
    for (const auto &p : points) {
        out += p.model + ',' + std::to_string(p.train_len) + ',' + std::to_string(p.missing_count) +
               ',' + p.metric + ',' + (p.value ? format_double(*p.value) : std::string()) + ',' +
               std::to_string(p.seed) + '\n';
    }
    return out;
}

} // namespace oomiss

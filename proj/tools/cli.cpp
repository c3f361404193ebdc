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

#include "oomiss/cli.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "oomiss/eval.hpp"
#include "oomiss/experiment.hpp"
#include "oomiss/io.hpp"
#include "oomiss/learner.hpp"
#include "oomiss/simulate.hpp"

namespace oomiss {

namespace {

struct GenHmmArgs {
    long long states = 20;
    long long obs = 20;
    long long max_obs = 2;
    std::uint64_t seed = 0;
    std::string out;
};

struct SampleArgs {
    std::string hmm;
    std::size_t length = 0;
    std::size_t count = 1;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 0;
    std::string out;
};

struct CorruptArgs {
    std::string data;
    std::string hmm;
    std::string policy = "mild";
    std::vector<std::string> triggers;
    std::optional<std::size_t> n_triggers;
    std::optional<double> miss_prob;
    std::uint64_t seed = 0;
    std::string out;
};

struct LearnArgs {
    std::string data;
    std::string hmm;
    long long dim = 0;
    std::size_t word_len = 3;
    std::string top_k = "512";
    std::string mode = "missing";
    std::string out;
    std::string report;
};

struct EvalArgs {
    std::string model;
    std::string data;
    std::string truth;
    std::string metric = "anll";
    double floor = 1e-6;
};

struct PredictArgs {
    std::string model;
    std::string prefix;
    double floor = 1e-6;
};

struct ExperimentArgs {
    std::string config;
    std::string out;
};

// Alphabet of an HMM file when given, else inferred from the data.
TrajectoryFile load_data(const std::string &data, const std::string &hmm_path) {
    if (!hmm_path.empty()) {
        const Hmm hmm = read_hmm(hmm_path);
        return read_trajectories(data, &hmm.alphabet);
    }
    return read_trajectories(data);
}

int cmd_gen_hmm(const GenHmmArgs &a, std::ostream &out) {
    const Hmm hmm = gen_ring_hmm(a.states, a.obs, a.max_obs, a.seed);
    write_atomic(a.out, hmm_to_json(hmm));
    out << "wrote " << a.out << '\n';
    return 0;
}

int cmd_sample(const SampleArgs &a, std::ostream &out) {
    const Hmm hmm = read_hmm(a.hmm);
    const auto trajs = sample_hmm(hmm, a.length, a.count, a.burn_in, a.seed);
    write_atomic(a.out, format_trajectories(hmm.alphabet, trajs));
    out << "wrote " << trajs.size() << " trajectories to " << a.out << '\n';
    return 0;
}

int cmd_corrupt(const CorruptArgs &a, std::ostream &out) {
    const TrajectoryFile file = load_data(a.data, a.hmm);
    AmsarTriggerPolicy policy;
    if (a.policy == "mild") {
        policy = trigger_policy(file.alphabet, a.n_triggers.value_or(5), a.miss_prob.value_or(0.3),
                                derive_seed(a.seed, 0));
    } else if (a.policy == "severe") {
        policy = trigger_policy(file.alphabet, a.n_triggers.value_or(10), a.miss_prob.value_or(0.5),
                                derive_seed(a.seed, 0));
    } else {
        if (a.triggers.empty() || !a.miss_prob) {
            throw std::invalid_argument("policy custom needs --triggers and --miss-prob");
        }
        for (const auto &t : a.triggers) policy.triggers.insert(file.alphabet.index(t));
        policy.miss_prob = *a.miss_prob;
        policy.validate(file.alphabet);
    }

    std::vector<MissObsSeq> corrupted;
    std::size_t missing = 0;
    for (std::size_t j = 0; j < file.trajectories.size(); ++j) {
        Word w;
        for (const ObsToken &o : file.trajectories[j].obs()) {
            if (o.is_missing()) {
                throw std::invalid_argument("input trajectory " + std::to_string(j + 1) +
                                            " already has missing values");
            }
            w.push_back(o.symbol());
        }
        corrupted.push_back(corrupt_amsar(w, policy, derive_seed(a.seed, j + 1)));
        missing += corrupted.back().missing_count();
    }
    write_atomic(a.out, format_trajectories(file.alphabet, corrupted));
    out << "triggers:";
    for (SymbolId s : policy.triggers) out << ' ' << file.alphabet.symbol(s);
    out << "\nmiss_prob: " << policy.miss_prob << "\nmissing_values: " << missing << '\n';
    return 0;
}

int cmd_learn(const LearnArgs &a, std::ostream &out) {
    const TrajectoryFile file = load_data(a.data, a.hmm);
    LearnParams params;
    params.dim = static_cast<Index>(a.dim);
    params.word_length = a.word_len;
    if (a.top_k == "all") {
        params.top_k = std::nullopt;
    } else {
        const long long k = std::stoll(a.top_k);
        if (k <= 0) throw std::invalid_argument("--top-k must be positive or 'all'");
        params.top_k = static_cast<std::size_t>(k);
    }
    params.mode = parse_learn_mode(a.mode);
    LearnReport report;
    const Oom<double> model = learn_oom(file.trajectories, file.alphabet, params, &report);
    write_atomic(a.out, model_to_json(model));
    const std::string text = format_report(report);
    if (!a.report.empty()) {
        write_atomic(a.report, text);
    } else {
        out << text;
    }
    return 0;
}

int cmd_eval(const EvalArgs &a, std::ostream &out) {
    const Oom<double> model = read_oom(a.model);
    const TrajectoryFile file = read_trajectories(a.data, &model.alphabet());
    const auto test = require_missing_free(file.trajectories);
    RobustEvalConfig cfg;
    cfg.floor = a.floor;
    RobustStats stats;
    double value = 0.0;
    if (a.metric == "anll") {
        value = anll(model, test, cfg, &stats);
    } else {
        if (a.truth.empty()) throw std::invalid_argument("metric laospe needs --true");
        const Hmm hmm = read_hmm(a.truth);
        if (!(hmm.alphabet == model.alphabet())) {
            throw std::invalid_argument("model and true HMM alphabets differ");
        }
        value = laospe(model, hmm, test, cfg, &stats);
    }
    out << a.metric << ' ' << format_double(value) << '\n';
    out << "clamps " << stats.clamps << "\nresets " << stats.resets << '\n';
    return 0;
}

int cmd_predict(const PredictArgs &a, std::ostream &out) {
    const Oom<double> model = read_oom(a.model);
    const Word prefix = parse_word(model.alphabet(), a.prefix);
    RobustEvalConfig cfg;
    cfg.floor = a.floor;
    const Vector<double> p = oom_conditional_robust(model, prefix, cfg);
    for (Index x = 0; x < p.size(); ++x) {
        out << model.alphabet().symbol(static_cast<SymbolId>(x)) << ' ' << format_double(p(x)) << '\n';
    }
    return 0;
}

int cmd_experiment(const ExperimentArgs &a, std::ostream &out, std::ostream &err) {
    ExperimentConfig cfg = read_experiment_config(a.config);
    if (!a.out.empty()) cfg.output = a.out;
    const auto points = learning_curve(cfg);
    for (const auto &p : points) {
        if (!p.value) {
            err << "warning: " << p.model << " at train_len " << p.train_len << " seed " << p.seed
                << ": " << p.reason << '\n';
        }
    }
    const std::string csv = format_curve_csv(points);
    if (cfg.output) {
        write_atomic(*cfg.output, csv);
        out << "wrote " << cfg.output->string() << '\n';
    } else {
        out << csv;
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Learn observable operator models from sequences with missing values", "oomiss"};
    app.require_subcommand(1);

    GenHmmArgs gen;
    auto *gen_cmd = app.add_subcommand("gen-hmm", "Generate a ring-topology HMM");
    gen_cmd->add_option("--states", gen.states, "number of hidden states")->capture_default_str();
    gen_cmd->add_option("--obs", gen.obs, "number of observation symbols")->capture_default_str();
    gen_cmd->add_option("--max-obs-per-state", gen.max_obs, "emission support per state")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "random seed")->required();
    gen_cmd->add_option("--out", gen.out, "HMM JSON output")->required();

    SampleArgs sample;
    auto *sample_cmd = app.add_subcommand("sample", "Sample trajectories from an HMM");
    sample_cmd->add_option("--hmm", sample.hmm, "HMM JSON")->required();
    sample_cmd->add_option("--length", sample.length, "trajectory length")->required();
    sample_cmd->add_option("--count", sample.count, "number of trajectories")->capture_default_str();
    sample_cmd->add_option("--burn-in", sample.burn_in, "emissions discarded first")->capture_default_str();
    sample_cmd->add_option("--seed", sample.seed, "random seed")->required();
    sample_cmd->add_option("--out", sample.out, "trajectory file output")->required();

    CorruptArgs corrupt;
    auto *corrupt_cmd = app.add_subcommand("corrupt", "Insert trigger-driven missing values");
    corrupt_cmd->add_option("--data", corrupt.data, "missing-free trajectory file")->required();
    corrupt_cmd->add_option("--hmm", corrupt.hmm, "HMM JSON fixing the alphabet (optional)");
    corrupt_cmd->add_option("--policy", corrupt.policy, "mild, severe or custom")
        ->check(CLI::IsMember({"mild", "severe", "custom"}))
        ->capture_default_str();
    corrupt_cmd->add_option("--triggers", corrupt.triggers, "trigger symbols (custom)")->delimiter(',');
    corrupt_cmd->add_option("--n-triggers", corrupt.n_triggers, "trigger count override");
    corrupt_cmd->add_option("--miss-prob", corrupt.miss_prob, "miss probability override")
        ->check(CLI::Range(0.0, 1.0));
    corrupt_cmd->add_option("--seed", corrupt.seed, "random seed")->required();
    corrupt_cmd->add_option("--out", corrupt.out, "trajectory file output")->required();

    LearnArgs learn;
    auto *learn_cmd = app.add_subcommand("learn", "Learn an OOM from trajectories");
    learn_cmd->add_option("--data", learn.data, "trajectory file")->required();
    learn_cmd->add_option("--hmm", learn.hmm, "HMM JSON fixing the alphabet (optional)");
    learn_cmd->add_option("--dim", learn.dim, "model dimension")->required()->check(CLI::PositiveNumber);
    learn_cmd->add_option("--word-len", learn.word_len, "length of indicative/characteristic words")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    learn_cmd->add_option("--top-k", learn.top_k, "number of words kept, or 'all'")->capture_default_str();
    learn_cmd->add_option("--mode", learn.mode, "missing or short")
        ->check(CLI::IsMember({"missing", "short"}))
        ->capture_default_str();
    learn_cmd->add_option("--out", learn.out, "model JSON output")->required();
    learn_cmd->add_option("--report", learn.report, "diagnostics output (default stdout)");

    EvalArgs eval;
    auto *eval_cmd = app.add_subcommand("eval", "Score a model on missing-free test data");
    eval_cmd->add_option("--model", eval.model, "model JSON")->required();
    eval_cmd->add_option("--data", eval.data, "test trajectory file")->required();
    eval_cmd->add_option("--metric", eval.metric, "anll or laospe")
        ->check(CLI::IsMember({"anll", "laospe"}))
        ->capture_default_str();
    eval_cmd->add_option("--true", eval.truth, "true HMM JSON (laospe)");
    eval_cmd->add_option("--floor", eval.floor, "probability floor")->capture_default_str();

    PredictArgs predict;
    auto *predict_cmd = app.add_subcommand("predict", "Print the next-symbol distribution");
    predict_cmd->add_option("--model", predict.model, "model JSON")->required();
    predict_cmd->add_option("--prefix", predict.prefix, "space-separated prefix")->capture_default_str();
    predict_cmd->add_option("--floor", predict.floor, "probability floor")->capture_default_str();

    ExperimentArgs experiment;
    auto *exp_cmd = app.add_subcommand("experiment", "Run a learning-curve experiment");
    exp_cmd->add_option("--config", experiment.config, "experiment config file")->required();
    exp_cmd->add_option("--out", experiment.out, "CSV output (overrides config)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen_hmm(gen, out);
        if (sample_cmd->parsed()) return cmd_sample(sample, out);
        if (corrupt_cmd->parsed()) return cmd_corrupt(corrupt, out);
        if (learn_cmd->parsed()) return cmd_learn(learn, out);
        if (eval_cmd->parsed()) return cmd_eval(eval, out);
        if (predict_cmd->parsed()) return cmd_predict(predict, out);
        if (exp_cmd->parsed()) return cmd_experiment(experiment, out, err);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace oomiss

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

#include "oomiss/learner.hpp"

#include <cstdio>
#include <sstream>

namespace oomiss {

std::string to_string(LearnMode mode) {
    return mode == LearnMode::MissingValue ? "missing" : "short";
}

LearnMode parse_learn_mode(std::string_view text) {
    if (text == "missing") return LearnMode::MissingValue;
    if (text == "short") return LearnMode::ShortTrajectory;
    throw std::invalid_argument("unknown learn mode '" + std::string(text) +
                                "' (expected missing or short)");
}

std::vector<MissObsSeq> segment_missing_free(std::span<const MissObsSeq> data) {
    std::vector<MissObsSeq> out;
    for (const MissObsSeq &seq : data) {
        std::vector<ObsToken> run;
        for (const ObsToken &o : seq.obs()) {
            if (o.is_missing()) {
                if (!run.empty()) out.emplace_back(std::move(run));
                run.clear();
            } else {
                run.push_back(o);
            }
        }
        if (!run.empty()) out.emplace_back(std::move(run));
    }
    return out;
}

namespace {

Oom<double> run_pipeline(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                         const LearnParams &params, LearnReport *report) {
    const auto words = select_words(data, alphabet, params.word_length, params.top_k);
    WindowStats stats;
    const HankelSet<double> h = assemble_hankel(data, words, words, alphabet, &stats);
    const SpectralFit<double> fit = spectral_fit(h, params.dim);
    if (report) {
        report->q_words = words.size();
        report->c_words = words.size();
        report->windows = stats;
        report->singular_values = fit.hankel_singular_values;
        report->projected_rank = fit.projected_rank;
        report->warnings.insert(report->warnings.end(), fit.warnings.begin(), fit.warnings.end());
    }
    return reduce_to_oom(fit.model);
}

void describe_input(std::span<const MissObsSeq> data, LearnReport &report) {
    report.trajectories = data.size();
    report.total_length = 0;
    report.missing_values = 0;
    for (const auto &seq : data) {
        report.total_length += seq.size();
        report.missing_values += seq.missing_count();
    }
}

} // namespace

Oom<double> learn_missing_value_oom(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                                    const LearnParams &params, LearnReport *report) {
    if (data.empty()) throw std::invalid_argument("no training trajectories");
    if (report) {
        *report = LearnReport{};
        report->mode = LearnMode::MissingValue;
        describe_input(data, *report);
    }
    return run_pipeline(data, alphabet, params, report);
}

Oom<double> learn_short_trajectory_oom(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                                       const LearnParams &params, LearnReport *report) {
    if (data.empty()) throw std::invalid_argument("no training trajectories");
    const std::size_t min_len = 2 * params.word_length + 1;
    std::vector<MissObsSeq> usable;
    std::size_t dropped = 0;
    for (auto &seg : segment_missing_free(data)) {
        if (seg.size() >= min_len) {
            usable.push_back(std::move(seg));
        } else {
            ++dropped;
        }
    }
    if (report) {
        *report = LearnReport{};
        report->mode = LearnMode::ShortTrajectory;
        describe_input(data, *report);
        report->segments_kept = usable.size();
        report->segments_dropped = dropped;
    }
    if (usable.empty()) {
        throw std::invalid_argument("no missing-free segment of usable length " +
                                    std::to_string(min_len));
    }
    return run_pipeline(usable, alphabet, params, report);
}

Oom<double> learn_oom(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                      const LearnParams &params, LearnReport *report) {
    return params.mode == LearnMode::MissingValue
               ? learn_missing_value_oom(data, alphabet, params, report)
               : learn_short_trajectory_oom(data, alphabet, params, report);
}

std::string format_report(const LearnReport &r) {
    std::ostringstream out;
    out << "mode: " << to_string(r.mode) << '\n';
    out << "trajectories: " << r.trajectories << '\n';
    out << "total_length: " << r.total_length << '\n';
    out << "missing_values: " << r.missing_values << '\n';
    if (r.mode == LearnMode::ShortTrajectory) {
        out << "segments_kept: " << r.segments_kept << '\n';
        out << "segments_dropped: " << r.segments_dropped << '\n';
    }
    out << "indicative_words: " << r.q_words << '\n';
    out << "characteristic_words: " << r.c_words << '\n';
    for (const auto &[len, windows] : r.windows.windows_by_length) {
        out << "windows[length=" << len << "]: " << windows << '\n';
    }
    out << "singular_values:";
    char buf[32];
    for (Index i = 0; i < r.singular_values.size(); ++i) {
        std::snprintf(buf, sizeof buf, " %.6e", r.singular_values(i));
        out << buf;
    }
    out << '\n';
    out << "projected_rank: " << r.projected_rank << '\n';
    for (const auto &w : r.warnings) out << "warning: " << w << '\n';
    return out.str();
}

} // namespace oomiss

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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "oomiss/alphabet.hpp"
#include "oomiss/oom.hpp"
#include "oomiss/simulate.hpp"

// File formats:
//
//   model JSON  {"kind":"oom"|"ioom","dim":d,"alphabet":[...],"sigma":[...],
//                "omega":[...],"tau":{"<symbol>":[[row-major]], ...}}
//               IO-OOM operator keys are "0:<symbol>", "0:_", "1:_", "1:<symbol>".
//   HMM JSON    {"n_states":n,"alphabet":[...],"transition":[[...]],
//                "emission":[[...]],"initial":[...]}
//   trajectories  one per line, tokens separated by single spaces, "_" for a
//                 missing value, lines starting with '#' ignored.
namespace oomiss {

/// Parse failure carrying the offending line or field.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string model_to_json(const Oom<double> &model);
std::string model_to_json(const IoOom<double> &model);
std::variant<Oom<double>, IoOom<double>> model_from_json(const std::string &text);
/// Reads a model file that must hold kind "oom".
Oom<double> read_oom(const std::filesystem::path &path);

std::string hmm_to_json(const Hmm &hmm);
Hmm hmm_from_json(const std::string &text);
Hmm read_hmm(const std::filesystem::path &path);

/// Trajectory file contents. The alphabet is whatever the caller supplies,
/// or, when inferring, the distinct tokens in order of first appearance.
struct TrajectoryFile {
    Alphabet alphabet;
    std::vector<MissObsSeq> trajectories;
};

TrajectoryFile parse_trajectories(const std::string &text, const Alphabet *alphabet = nullptr);
TrajectoryFile read_trajectories(const std::filesystem::path &path, const Alphabet *alphabet = nullptr);
std::string format_trajectories(const Alphabet &alphabet, const std::vector<MissObsSeq> &data);
std::string format_trajectories(const Alphabet &alphabet, const std::vector<Word> &data);

std::string read_text(const std::filesystem::path &path);
/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path &path, const std::string &contents);

/// %.17g, or "-inf"/"inf"/"nan".
std::string format_double(double value);

} // namespace oomiss

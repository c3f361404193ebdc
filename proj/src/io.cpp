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

#include "oomiss/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace oomiss {

using nlohmann::json;

namespace {

json row_major(const Matrix<double> &m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename Vec>
json flat(const Vec &v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

const json &field(const json &doc, const char *name) {
    if (!doc.is_object() || !doc.contains(name)) {
        throw FormatError(std::string("missing field '") + name + "'");
    }
    return doc.at(name);
}

std::vector<double> numbers(const json &v, const std::string &name) {
    if (!v.is_array()) throw FormatError("field '" + name + "' must be an array");
    std::vector<double> out;
    for (const auto &x : v) {
        if (!x.is_number()) throw FormatError("field '" + name + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Vector<double> vector_field(const json &v, const std::string &name, Index expected) {
    const auto xs = numbers(v, name);
    if (static_cast<Index>(xs.size()) != expected) {
        throw FormatError("field '" + name + "' must have " + std::to_string(expected) + " entries");
    }
    return Eigen::Map<const Vector<double>>(xs.data(), expected);
}

Matrix<double> matrix_field(const json &v, const std::string &name, Index rows, Index cols) {
    if (!v.is_array() || static_cast<Index>(v.size()) != rows) {
        throw FormatError("field '" + name + "' must have " + std::to_string(rows) + " rows");
    }
    Matrix<double> m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const auto row = numbers(v[static_cast<std::size_t>(i)], name);
        if (static_cast<Index>(row.size()) != cols) {
            throw FormatError("field '" + name + "' row " + std::to_string(i) + " must have " +
                              std::to_string(cols) + " entries");
        }
        for (Index j = 0; j < cols; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
}

Alphabet alphabet_field(const json &doc) {
    const json &a = field(doc, "alphabet");
    if (!a.is_array()) throw FormatError("field 'alphabet' must be an array of strings");
    std::vector<std::string> symbols;
    for (const auto &s : a) {
        if (!s.is_string()) throw FormatError("field 'alphabet' must be an array of strings");
        symbols.push_back(s.get<std::string>());
    }
    try {
        return Alphabet(std::move(symbols));
    } catch (const std::invalid_argument &e) {
        throw FormatError(std::string("field 'alphabet': ") + e.what());
    }
}

std::string io_key(const Alphabet &alphabet, const IoSymbol &z) {
    const std::string obs =
        z.obs.is_missing() ? std::string(kMissingToken) : alphabet.symbol(z.obs.symbol());
    return std::string(z.miss ? "1:" : "0:") + obs;
}

IoSymbol parse_io_key(const Alphabet &alphabet, const std::string &key) {
    if (key.size() < 3 || (key[0] != '0' && key[0] != '1') || key[1] != ':') {
        throw FormatError("IO-OOM operator key '" + key + "' is not of the form m:symbol");
    }
    const std::string obs = key.substr(2);
    IoSymbol z;
    z.miss = key[0] == '1';
    if (obs == kMissingToken) {
        z.obs = ObsToken::missing();
    } else if (alphabet.contains(obs)) {
        z.obs = ObsToken::concrete(alphabet.index(obs));
    } else {
        throw FormatError("IO-OOM operator key '" + key + "' names an unknown symbol");
    }
    return z;
}

} // namespace

std::string model_to_json(const Oom<double> &model) {
    json doc;
    doc["kind"] = "oom";
    doc["dim"] = model.dim();
    doc["alphabet"] = model.alphabet().symbols();
    doc["sigma"] = flat(model.sigma());
    doc["omega"] = flat(model.omega());
    json tau = json::object();
    for (std::size_t x = 0; x < model.alphabet().size(); ++x) {
        tau[model.alphabet().symbol(static_cast<SymbolId>(x))] = row_major(model.tau()[x]);
    }
    doc["tau"] = std::move(tau);
    return doc.dump(1) + "\n";
}

std::string model_to_json(const IoOom<double> &model) {
    json doc;
    doc["kind"] = "ioom";
    doc["dim"] = model.dim();
    doc["alphabet"] = model.alphabet().symbols();
    doc["sigma"] = flat(model.sigma());
    doc["omega"] = flat(model.omega());
    json tau = json::object();
    for (const auto &[key, m] : model.operators()) tau[io_key(model.alphabet(), key)] = row_major(m);
    doc["tau"] = std::move(tau);
    return doc.dump(1) + "\n";
}

std::variant<Oom<double>, IoOom<double>> model_from_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw FormatError(std::string("model JSON: ") + e.what());
    }
    const json &kind = field(doc, "kind");
    if (!kind.is_string()) throw FormatError("field 'kind' must be a string");
    const json &dim_field = field(doc, "dim");
    if (!dim_field.is_number_integer() || dim_field.get<long long>() < 1) {
        throw FormatError("field 'dim' must be a positive integer");
    }
    const auto d = static_cast<Index>(dim_field.get<long long>());
    Alphabet alphabet = alphabet_field(doc);
    const RowVector<double> sigma = vector_field(field(doc, "sigma"), "sigma", d).transpose();
    const Vector<double> omega = vector_field(field(doc, "omega"), "omega", d);
    const json &tau = field(doc, "tau");
    if (!tau.is_object()) throw FormatError("field 'tau' must be an object");

    const std::string k = kind.get<std::string>();
    if (k == "oom") {
        std::vector<Matrix<double>> ops(alphabet.size());
        std::vector<bool> seen(alphabet.size(), false);
        for (const auto &[name, m] : tau.items()) {
            if (!alphabet.contains(name)) throw FormatError("tau names unknown symbol '" + name + "'");
            const auto x = static_cast<std::size_t>(alphabet.index(name));
            ops[x] = matrix_field(m, "tau." + name, d, d);
            seen[x] = true;
        }
        for (std::size_t x = 0; x < seen.size(); ++x) {
            if (!seen[x]) {
                throw FormatError("tau lacks operator for symbol '" +
                                  alphabet.symbol(static_cast<SymbolId>(x)) + "'");
            }
        }
        return Oom<double>(std::move(alphabet), sigma, std::move(ops), omega);
    }
    if (k == "ioom") {
        IoOom<double>::OperatorMap ops;
        for (const auto &[name, m] : tau.items()) {
            ops.emplace(parse_io_key(alphabet, name), matrix_field(m, "tau." + name, d, d));
        }
        return IoOom<double>(std::move(alphabet), sigma, std::move(ops), omega);
    }
    throw FormatError("field 'kind' must be \"oom\" or \"ioom\", got \"" + k + "\"");
}

Oom<double> read_oom(const std::filesystem::path &path) {
    auto model = model_from_json(read_text(path));
    if (auto *oom = std::get_if<Oom<double>>(&model)) return std::move(*oom);
    throw FormatError(path.string() + ": expected a model of kind \"oom\"");
}

std::string hmm_to_json(const Hmm &hmm) {
    json doc;
    doc["n_states"] = hmm.n_states();
    doc["alphabet"] = hmm.alphabet.symbols();
    doc["transition"] = row_major(hmm.transition);
    doc["emission"] = row_major(hmm.emission);
    doc["initial"] = flat(hmm.initial);
    return doc.dump(1) + "\n";
}

Hmm hmm_from_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw FormatError(std::string("HMM JSON: ") + e.what());
    }
    const json &n_field = field(doc, "n_states");
    if (!n_field.is_number_integer() || n_field.get<long long>() < 1) {
        throw FormatError("field 'n_states' must be a positive integer");
    }
    const auto n = static_cast<Index>(n_field.get<long long>());
    Hmm hmm;
    hmm.alphabet = alphabet_field(doc);
    const auto k = static_cast<Index>(hmm.alphabet.size());
    hmm.transition = matrix_field(field(doc, "transition"), "transition", n, n);
    hmm.emission = matrix_field(field(doc, "emission"), "emission", n, k);
    hmm.initial = vector_field(field(doc, "initial"), "initial", n);
    try {
        hmm.validate();
    } catch (const std::invalid_argument &e) {
        throw FormatError(std::string("HMM JSON: ") + e.what());
    }
    return hmm;
}

Hmm read_hmm(const std::filesystem::path &path) { return hmm_from_json(read_text(path)); }

TrajectoryFile parse_trajectories(const std::string &text, const Alphabet *alphabet) {
    std::vector<std::vector<std::string>> lines;
    std::vector<std::size_t> line_numbers;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> tokens;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t next = line.find(' ', pos);
            const std::size_t end = next == std::string::npos ? line.size() : next;
            if (end == pos) {
                throw FormatError("line " + std::to_string(number) +
                                  ": tokens must be separated by single spaces");
            }
            tokens.push_back(line.substr(pos, end - pos));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        lines.push_back(std::move(tokens));
        line_numbers.push_back(number);
    }

    TrajectoryFile out;
    if (alphabet) {
        out.alphabet = *alphabet;
    } else {
        std::vector<std::string> symbols;
        std::set<std::string> seen;
        for (const auto &tokens : lines) {
            for (const auto &t : tokens) {
                if (t != kMissingToken && seen.insert(t).second) symbols.push_back(t);
            }
        }
        if (symbols.empty()) throw FormatError("trajectory file holds no observed symbol");
        try {
            out.alphabet = Alphabet(std::move(symbols));
        } catch (const std::invalid_argument &e) {
            throw FormatError(std::string("trajectory file: ") + e.what());
        }
    }

    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::vector<ObsToken> obs;
        obs.reserve(lines[i].size());
        for (const auto &t : lines[i]) {
            if (t == kMissingToken) {
                obs.push_back(ObsToken::missing());
            } else if (out.alphabet.contains(t)) {
                obs.push_back(ObsToken::concrete(out.alphabet.index(t)));
            } else {
                throw FormatError("line " + std::to_string(line_numbers[i]) + ": unknown symbol '" +
                                  t + "'");
            }
        }
        out.trajectories.emplace_back(std::move(obs));
    }
    return out;
}

std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TrajectoryFile read_trajectories(const std::filesystem::path &path, const Alphabet *alphabet) {
    try {
        return parse_trajectories(read_text(path), alphabet);
    } catch (const FormatError &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::string format_trajectories(const Alphabet &alphabet, const std::vector<MissObsSeq> &data) {
    std::string out;
    for (const auto &seq : data) {
        out += format_tokens(alphabet, seq.obs());
        out += '\n';
    }
    return out;
}

std::string format_trajectories(const Alphabet &alphabet, const std::vector<Word> &data) {
    std::string out;
    for (const auto &w : data) {
        out += format_word(alphabet, w);
        out += '\n';
    }
    return out;
}

void write_atomic(const std::filesystem::path &path, const std::string &contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " +
                                 ec.message());
    }
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace oomiss

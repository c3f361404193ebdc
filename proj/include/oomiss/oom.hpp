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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oomiss/alphabet.hpp"

/**
 * Observable operator models and their input-output counterpart for
 * missingness-observation pairs.
 *
 * A model is the triple (sigma, {tau_z}, omega). The value it assigns to a
 * word z_1 ... z_n is
 *
 *     f(z_1 ... z_n) = sigma * tau_{z_n} * ... * tau_{z_1} * omega
 *
 * i.e. the state is multiplied by the operator of the earliest symbol first.
 * Every evaluation in the library goes through apply_word() so that this
 * ordering lives in exactly one place.
 */
namespace oomiss {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Reciprocal condition number below which a similarity matrix is rejected.
inline constexpr double kSingularRcond = 1e-12;
/// |lambda - 1| window for picking the stationary eigenvalue.
inline constexpr double kStationaryEigenTol = 1e-6;

/// Input-output symbol (m, o): missingness bit and observation token.
struct IoSymbol {
    bool miss = false;
    ObsToken obs;

    static IoSymbol observed(SymbolId x) { return {false, ObsToken::concrete(x)}; }
    static IoSymbol missing() { return {true, ObsToken::missing()}; }

    bool operator==(const IoSymbol &) const = default;
    bool operator<(const IoSymbol &o) const {
        return std::pair(miss, obs.symbol()) < std::pair(o.miss, o.obs.symbol());
    }
};

/// The io-word 0x / 1_ corresponding to a missingness-observation sequence.
std::vector<IoSymbol> to_io_word(const MissObsSeq &seq);

namespace detail {

/// State after feeding `word` to `state`, earliest symbol first.
template <typename Scalar, typename Range, typename Lookup>
Vector<Scalar> apply_word(Vector<Scalar> state, const Range &word, Lookup &&op) {
    for (const auto &z : word) {
        state = op(z) * state;
    }
    return state;
}

template <typename Scalar>
void check_square(const Matrix<Scalar> &m, Index d, const char *what) {
    if (m.rows() != d || m.cols() != d) {
        throw std::invalid_argument(std::string(what) + " must be " + std::to_string(d) + "x" +
                                    std::to_string(d));
    }
}

} // namespace detail

/**
 * Observable operator model of an uncontrolled process over `alphabet`.
 * One d x d operator per symbol, indexed by SymbolId.
 */
template <typename Scalar = double>
class Oom {
  public:
    using MatrixType = Matrix<Scalar>;
    using VectorType = Vector<Scalar>;
    using RowVectorType = RowVector<Scalar>;

    Oom() = default;
    Oom(Alphabet alphabet, RowVectorType sigma, std::vector<MatrixType> tau, VectorType omega)
        : alphabet_(std::move(alphabet)), sigma_(std::move(sigma)), tau_(std::move(tau)),
          omega_(std::move(omega)) {
        const Index d = sigma_.size();
        if (d <= 0) throw std::invalid_argument("OOM dimension must be positive");
        if (omega_.size() != d) throw std::invalid_argument("omega length differs from sigma length");
        if (tau_.size() != alphabet_.size()) {
            throw std::invalid_argument("OOM needs exactly one operator per alphabet symbol");
        }
        for (const auto &t : tau_) detail::check_square(t, d, "observable operator");
    }

    Index dim() const { return sigma_.size(); }
    const Alphabet &alphabet() const { return alphabet_; }
    const RowVectorType &sigma() const { return sigma_; }
    const VectorType &omega() const { return omega_; }
    const std::vector<MatrixType> &tau() const { return tau_; }

    const MatrixType &tau(SymbolId x) const {
        if (x < 0 || static_cast<std::size_t>(x) >= tau_.size()) {
            throw std::domain_error("no operator for symbol id " + std::to_string(x));
        }
        return tau_[static_cast<std::size_t>(x)];
    }

    /// Sum of all observable operators.
    MatrixType tau_sum() const {
        MatrixType s = MatrixType::Zero(dim(), dim());
        for (const auto &t : tau_) s += t;
        return s;
    }

    /// Same operators and evaluation row, different initial state.
    Oom with_state(VectorType omega) const {
        return Oom(alphabet_, sigma_, tau_, std::move(omega));
    }

    template <typename Range>
    VectorType state_after(const Range &word, VectorType from) const {
        return detail::apply_word<Scalar>(std::move(from), word,
                                          [this](SymbolId x) -> const MatrixType & { return tau(x); });
    }

    template <typename Range>
    VectorType state_after(const Range &word) const {
        return state_after(word, omega_);
    }

  private:
    Alphabet alphabet_;
    RowVectorType sigma_;
    std::vector<MatrixType> tau_;
    VectorType omega_;
};

/**
 * Sequential system over {0,1} x (alphabet + missing). Operators are keyed
 * by IoSymbol and may be partial (a model read from disk need not carry all
 * of them); evaluating or reducing against an absent operator throws.
 */
template <typename Scalar = double>
class IoOom {
  public:
    using MatrixType = Matrix<Scalar>;
    using VectorType = Vector<Scalar>;
    using RowVectorType = RowVector<Scalar>;
    using OperatorMap = std::map<IoSymbol, MatrixType>;

    IoOom() = default;
    IoOom(Alphabet alphabet, RowVectorType sigma, OperatorMap tau, VectorType omega)
        : alphabet_(std::move(alphabet)), sigma_(std::move(sigma)), tau_(std::move(tau)),
          omega_(std::move(omega)) {
        const Index d = sigma_.size();
        if (d <= 0) throw std::invalid_argument("IO-OOM dimension must be positive");
        if (omega_.size() != d) throw std::invalid_argument("omega length differs from sigma length");
        for (const auto &[key, t] : tau_) {
            if (!key.obs.is_missing() &&
                static_cast<std::size_t>(key.obs.symbol()) >= alphabet_.size()) {
                throw std::invalid_argument("IO-OOM operator key outside the alphabet");
            }
            detail::check_square(t, d, "IO-OOM operator");
        }
    }

    Index dim() const { return sigma_.size(); }
    const Alphabet &alphabet() const { return alphabet_; }
    const RowVectorType &sigma() const { return sigma_; }
    const VectorType &omega() const { return omega_; }
    const OperatorMap &operators() const { return tau_; }

    bool has(const IoSymbol &z) const { return tau_.count(z) != 0; }

    const MatrixType &tau(const IoSymbol &z) const {
        auto it = tau_.find(z);
        if (it == tau_.end()) {
            std::string name = z.obs.is_missing() ? std::string(kMissingToken)
                                                  : alphabet_.symbol(z.obs.symbol());
            throw std::domain_error("no operator for (" + std::to_string(int(z.miss)) + "," + name +
                                    ")");
        }
        return it->second;
    }

    template <typename Range>
    VectorType state_after(const Range &word) const {
        return detail::apply_word<Scalar>(omega_, word,
                                          [this](const IoSymbol &z) -> const MatrixType & { return tau(z); });
    }

  private:
    Alphabet alphabet_;
    RowVectorType sigma_;
    OperatorMap tau_;
    VectorType omega_;
};

/// f(word) = sigma * tau_{w_n} ... tau_{w_1} * omega.
template <typename Scalar>
Scalar external_fn(const Oom<Scalar> &model, std::span<const SymbolId> word) {
    return model.sigma().dot(model.state_after(word).transpose());
}

template <typename Scalar>
Scalar external_fn(const Oom<Scalar> &model, const Word &word) {
    return external_fn(model, std::span<const SymbolId>(word));
}

/// Word given by symbol names; unknown names raise std::domain_error.
template <typename Scalar>
Scalar external_fn(const Oom<Scalar> &model, const std::vector<std::string> &word) {
    Word ids;
    ids.reserve(word.size());
    for (const auto &s : word) ids.push_back(model.alphabet().index(s));
    return external_fn(model, ids);
}

template <typename Scalar>
Scalar external_fn(const IoOom<Scalar> &model, std::span<const IoSymbol> word) {
    return model.sigma().dot(model.state_after(word).transpose());
}

template <typename Scalar>
Scalar external_fn(const IoOom<Scalar> &model, const std::vector<IoSymbol> &word) {
    return external_fn(model, std::span<const IoSymbol>(word));
}

namespace detail {

template <typename Scalar>
Matrix<Scalar> checked_inverse(const Matrix<Scalar> &rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        throw std::invalid_argument("similarity matrix must be square and nonempty");
    }
    Eigen::JacobiSVD<Matrix<Scalar>> svd(rho);
    const auto &s = svd.singularValues();
    const Scalar smax = s(0);
    const Scalar smin = s(s.size() - 1);
    if (!(smax > Scalar(0)) || smin / smax < Scalar(kSingularRcond)) {
        throw std::domain_error("similarity matrix is numerically singular");
    }
    return rho.inverse();
}

} // namespace detail

/// (sigma rho^-1, {rho tau rho^-1}, rho omega). External function is unchanged.
template <typename Scalar>
Oom<Scalar> similarity_transform(const Oom<Scalar> &model, const Matrix<Scalar> &rho) {
    detail::check_square(rho, model.dim(), "similarity matrix");
    const Matrix<Scalar> inv = detail::checked_inverse(rho);
    std::vector<Matrix<Scalar>> tau;
    tau.reserve(model.tau().size());
    for (const auto &t : model.tau()) tau.push_back(rho * t * inv);
    return Oom<Scalar>(model.alphabet(), model.sigma() * inv, std::move(tau), rho * model.omega());
}

template <typename Scalar>
IoOom<Scalar> similarity_transform(const IoOom<Scalar> &model, const Matrix<Scalar> &rho) {
    detail::check_square(rho, model.dim(), "similarity matrix");
    const Matrix<Scalar> inv = detail::checked_inverse(rho);
    typename IoOom<Scalar>::OperatorMap tau;
    for (const auto &[key, t] : model.operators()) tau.emplace(key, rho * t * inv);
    return IoOom<Scalar>(model.alphabet(), model.sigma() * inv, std::move(tau), rho * model.omega());
}

/**
 * IO-OOM describing the observation process of `oom` under any missingness
 * mechanism: tau'_{0,x} = tau_x, tau'_{1,_} = sum_x tau_x, tau'_{0,_} = 0,
 * tau'_{1,x} = 0.
 */
template <typename Scalar>
IoOom<Scalar> augment_to_ioom(const Oom<Scalar> &oom) {
    const Index d = oom.dim();
    typename IoOom<Scalar>::OperatorMap tau;
    const Matrix<Scalar> zero = Matrix<Scalar>::Zero(d, d);
    for (std::size_t x = 0; x < oom.alphabet().size(); ++x) {
        const auto id = static_cast<SymbolId>(x);
        tau.emplace(IoSymbol::observed(id), oom.tau(id));
        tau.emplace(IoSymbol{true, ObsToken::concrete(id)}, zero);
    }
    tau.emplace(IoSymbol{false, ObsToken::missing()}, zero);
    tau.emplace(IoSymbol::missing(), oom.tau_sum());
    return IoOom<Scalar>(oom.alphabet(), oom.sigma(), std::move(tau), oom.omega());
}

/// Keeps sigma, omega and the (0, x) operators; everything else is dropped.
template <typename Scalar>
Oom<Scalar> reduce_to_oom(const IoOom<Scalar> &ioom) {
    std::vector<Matrix<Scalar>> tau;
    tau.reserve(ioom.alphabet().size());
    for (std::size_t x = 0; x < ioom.alphabet().size(); ++x) {
        const auto key = IoSymbol::observed(static_cast<SymbolId>(x));
        if (!ioom.has(key)) {
            throw std::invalid_argument("cannot reduce: IO-OOM lacks operator (0," +
                                        ioom.alphabet().symbol(static_cast<SymbolId>(x)) + ")");
        }
        tau.push_back(ioom.tau(key));
    }
    return Oom<Scalar>(ioom.alphabet(), ioom.sigma(), std::move(tau), ioom.omega());
}

/**
 * Eigenvector w of sum_x tau_x for the eigenvalue nearest 1 (within
 * kStationaryEigenTol, ties to the largest real part), scaled so sigma w = 1.
 */
template <typename Scalar>
Vector<Scalar> stationary_state(const Oom<Scalar> &oom) {
    using Complex = std::complex<Scalar>;
    const Matrix<Scalar> total = oom.tau_sum();
    Eigen::EigenSolver<Matrix<Scalar>> es(total, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eigen decomposition of the summed operator failed");
    }
    const auto &values = es.eigenvalues();
    Index best = -1;
    for (Index i = 0; i < values.size(); ++i) {
        const Scalar gap = std::abs(values(i) - Complex(1));
        if (gap > Scalar(kStationaryEigenTol)) continue;
        if (best < 0) {
            best = i;
            continue;
        }
        const Scalar best_gap = std::abs(values(best) - Complex(1));
        if (gap < best_gap || (gap == best_gap && values(i).real() > values(best).real())) best = i;
    }
    if (best < 0) {
        throw std::domain_error("not asymptotically stationary-compatible: no eigenvalue near 1");
    }
    const Eigen::Matrix<Complex, Eigen::Dynamic, 1> v = es.eigenvectors().col(best);
    const Complex norm = (oom.sigma().template cast<Complex>() * v)(0, 0);
    if (std::abs(norm) <= Scalar(0)) {
        throw std::domain_error("stationary eigenvector is orthogonal to sigma");
    }
    Vector<Scalar> w = (v / norm).real();
    // One refinement step keeps sigma w = 1 to rounding after dropping the
    // imaginary residue.
    w /= oom.sigma().dot(w.transpose());
    return w;
}

/**
 * P(X matches query at its observed positions): tau_x at observed
 * positions, sum_x tau_x at missing ones.
 */
template <typename Scalar>
Scalar wildcard_prob(const Oom<Scalar> &oom, const MissObsSeq &query) {
    return external_fn(augment_to_ioom(oom), to_io_word(query));
}

inline std::vector<IoSymbol> to_io_word(const MissObsSeq &seq) {
    std::vector<IoSymbol> out;
    out.reserve(seq.size());
    for (const ObsToken &o : seq.obs()) {
        out.push_back(o.is_missing() ? IoSymbol::missing() : IoSymbol::observed(o.symbol()));
    }
    return out;
}

} // namespace oomiss

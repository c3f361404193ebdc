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

#include <Eigen/SVD>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oomiss/estimator.hpp"
#include "oomiss/oom.hpp"

namespace oomiss {

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTol = 1e-10;

template <typename Scalar = double>
struct SvdTriple {
    Matrix<Scalar> u; // m x d, orthonormal columns
    Vector<Scalar> s; // d, descending
    Matrix<Scalar> v; // n x d, orthonormal columns

    Matrix<Scalar> reconstruct() const { return u * s.asDiagonal() * v.transpose(); }
};

/// Best rank-d factors of `m`.
template <typename Scalar>
SvdTriple<Scalar> truncated_svd(const Matrix<Scalar> &m, Index d) {
    if (d < 1 || d > std::min(m.rows(), m.cols())) {
        throw std::invalid_argument("truncated SVD rank " + std::to_string(d) + " outside [1, " +
                                    std::to_string(std::min(m.rows(), m.cols())) + "]");
    }
    Eigen::BDCSVD<Matrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU().leftCols(d), svd.singularValues().head(d), svd.matrixV().leftCols(d)};
}

/// Moore-Penrose inverse with singular values below kRankTol * s_max dropped.
template <typename Scalar>
Matrix<Scalar> pseudo_inverse(const Matrix<Scalar> &m) {
    if (m.size() == 0) return Matrix<Scalar>::Zero(m.cols(), m.rows());
    Eigen::BDCSVD<Matrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    const Scalar cutoff = Scalar(kRankTol) * (s.size() ? s(0) : Scalar(0));
    Vector<Scalar> inv(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        inv(i) = (s(i) > cutoff && s(i) > Scalar(0)) ? Scalar(1) / s(i) : Scalar(0);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

template <typename Scalar>
Index numerical_rank(const Matrix<Scalar> &m) {
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<Matrix<Scalar>> svd(m);
    const auto &s = svd.singularValues();
    const Scalar cutoff = Scalar(kRankTol) * s(0);
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i) r += (s(i) > cutoff && s(i) > Scalar(0)) ? 1 : 0;
    return r;
}

template <typename Scalar = double>
struct SpectralFit {
    IoOom<Scalar> model;
    Vector<Scalar> hankel_singular_values; // full spectrum of f_cq
    Index projected_rank = 0;              // numerical rank of U_d^T f_cq
    std::vector<std::string> warnings;
};

/**
 * Spectral extraction of an IO-OOM from a Hankel set:
 *
 *     sigma'   = f_q (U_d^T f_cq)^+
 *     omega'   = U_d^T f_c^T
 *     tau'_0x  = U_d^T f_xcq (U_d^T f_cq)^+
 *
 * The remaining operators follow the augmentation pattern: tau'_{0,_} = 0,
 * tau'_{1,x} = 0, tau'_{1,_} = sum_x tau'_{0,x}. A projected Hankel of rank
 * below d is reported as a warning, not an error.
 */
template <typename Scalar>
SpectralFit<Scalar> spectral_fit(const HankelSet<Scalar> &h, Index d) {
    const Index nc = h.f_cq.rows();
    const Index nq = h.f_cq.cols();
    if (h.f_q.size() != nq || h.f_c.size() != nc || h.f_xcq.size() != h.alphabet.size()) {
        throw std::invalid_argument("malformed Hankel set");
    }
    if (d < 1 || d > std::min(nc, nq)) {
        throw std::invalid_argument("model dimension " + std::to_string(d) +
                                    " exceeds min(|C|, |Q|) = " + std::to_string(std::min(nc, nq)));
    }

    SpectralFit<Scalar> fit;
    fit.hankel_singular_values = Eigen::BDCSVD<Matrix<Scalar>>(h.f_cq).singularValues();
    const SvdTriple<Scalar> svd = truncated_svd(h.f_cq, d);
    const Matrix<Scalar> ut = svd.u.transpose();
    const Matrix<Scalar> projected = ut * h.f_cq;
    fit.projected_rank = numerical_rank(projected);
    if (fit.projected_rank < d) {
        fit.warnings.push_back("projected Hankel matrix has numerical rank " +
                               std::to_string(fit.projected_rank) + " < d = " + std::to_string(d) +
                               "; rank assumption violated");
    }
    const Matrix<Scalar> pinv = pseudo_inverse(projected);

    const RowVector<Scalar> sigma = h.f_q * pinv;
    const Vector<Scalar> omega = ut * h.f_c.transpose();

    typename IoOom<Scalar>::OperatorMap tau;
    Matrix<Scalar> sum = Matrix<Scalar>::Zero(d, d);
    const Matrix<Scalar> zero = Matrix<Scalar>::Zero(d, d);
    for (std::size_t x = 0; x < h.alphabet.size(); ++x) {
        const auto id = static_cast<SymbolId>(x);
        Matrix<Scalar> op = ut * h.f_xcq[x] * pinv;
        sum += op;
        tau.emplace(IoSymbol::observed(id), std::move(op));
        tau.emplace(IoSymbol{true, ObsToken::concrete(id)}, zero);
    }
    tau.emplace(IoSymbol{false, ObsToken::missing()}, zero);
    tau.emplace(IoSymbol::missing(), std::move(sum));
    fit.model = IoOom<Scalar>(h.alphabet, sigma, std::move(tau), omega);
    return fit;
}

template <typename Scalar>
IoOom<Scalar> spectral_learn(const HankelSet<Scalar> &h, Index d) {
    return spectral_fit(h, d).model;
}

enum class LearnMode { MissingValue, ShortTrajectory };

std::string to_string(LearnMode mode);
LearnMode parse_learn_mode(std::string_view text);

struct LearnParams {
    Index dim = 1;
    std::size_t word_length = 3;
    std::optional<std::size_t> top_k = 512; // nullopt = all of Sigma^l
    LearnMode mode = LearnMode::MissingValue;
};

/// What the pipeline saw; rendered by format_report().
struct LearnReport {
    LearnMode mode = LearnMode::MissingValue;
    std::size_t trajectories = 0;
    std::size_t total_length = 0;
    std::size_t missing_values = 0;
    std::size_t segments_kept = 0;
    std::size_t segments_dropped = 0;
    std::size_t q_words = 0;
    std::size_t c_words = 0;
    WindowStats windows;
    Vector<double> singular_values;
    Index projected_rank = 0;
    std::vector<std::string> warnings;
};

std::string format_report(const LearnReport &report);

/// Maximal runs of observed values, each as its own trajectory.
std::vector<MissObsSeq> segment_missing_free(std::span<const MissObsSeq> data);

/// select_words -> assemble_hankel -> spectral_fit -> reduce_to_oom.
Oom<double> learn_missing_value_oom(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                                    const LearnParams &params, LearnReport *report = nullptr);

/// Same pipeline on missing-free segments of length >= 2 l + 1.
Oom<double> learn_short_trajectory_oom(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                                       const LearnParams &params, LearnReport *report = nullptr);

/// Dispatches on params.mode.
Oom<double> learn_oom(std::span<const MissObsSeq> data, const Alphabet &alphabet,
                      const LearnParams &params, LearnReport *report = nullptr);

} // namespace oomiss

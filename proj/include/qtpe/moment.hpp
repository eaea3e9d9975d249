// Copyright 2026 The qtpe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QTPE_MOMENT_HPP
#define QTPE_MOMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtpe/ensemble.hpp"
#include "qtpe/linalg.hpp"
#include "qtpe/perm.hpp"

namespace qtpe {

// Matrices on (C^n)^{(x) t} are vectorised row-major, so a vectorised matrix
// is a 2t-way tensor of side n: t row modes followed by t column modes.

/// Permutation matrix sending e_{i_1} (x) ... (x) e_{i_t} to the basis vector
/// whose column pattern is (i_{sigma(1)}, ..., i_{sigma(t)}): row i has its
/// single one at column (i_{sigma(0)}, ..., i_{sigma(t-1)}).
CMatrix shuffle_operator(const Permutation &sigma, Index n);

/// shuffle_operator(sigma) * n^{-t/2}; unit Schatten-2 norm.
CMatrix alpha_sigma(const Permutation &sigma, Index n);

/// (alpha_1)_sigma (x) (alpha'_2)_sigma on C^{D^t} (x) C^{d^t}: the inner factor
/// keeps only rows whose index tuple has distinct entries. Requires t <= d.
CMatrix alpha_prime_sigma(const Permutation &sigma, Index outer_dim, Index inner_dim);

/// The span W of {alpha_sigma : sigma in S_t} on n^t x n^t matrices.
///
/// The alphas are stored by support (each has n^t equal entries n^{-t/2}), and
/// the orthonormal basis of W is kept as coefficients over the alphas:
/// ortho_j = sum_sigma coeffs(sigma, j) alpha_sigma. The coefficients are the
/// Loewdin inverse square root of the Gram matrix when it is well conditioned,
/// and the canonical (eigenvector-truncated) form once t > n makes the alphas
/// dependent.
class FixedSpaceBasis {
   public:
    FixedSpaceBasis(Index n, int t);

    Index local_dim() const noexcept { return n_; }
    int t() const noexcept { return t_; }
    Index side() const noexcept { return side_; }
    Index ambient() const noexcept { return side_ * side_; }
    Index rank() const noexcept { return rank_; }
    const std::vector<Permutation> &permutations() const noexcept { return perms_; }
    /// gram(s', s) = n^{cycles(s'^{-1} s) - t}.
    const Eigen::MatrixXd &gram() const noexcept { return gram_; }
    const Eigen::MatrixXd &coeffs() const noexcept { return coeffs_; }
    /// Largest gap between the cycle-formula Gram and direct inner products.
    double gram_check_error() const noexcept { return gram_check_error_; }

    CMatrix alpha(size_t index) const;
    CVector alpha_vec(size_t index) const;
    CVector ortho_vec(Index j) const;
    CMatrix ortho_matrix() const;

    /// <alpha_sigma, v> for every sigma.
    Eigen::VectorXcd overlaps(const CVector &v) const;
    /// v <- P_W v.
    void project(CVector &v) const;
    /// v <- v - P_W v.
    void project_out(CVector &v) const;

   private:
    Index n_;
    int t_;
    Index side_;
    double value_;
    std::vector<Permutation> perms_;
    std::vector<std::vector<std::int64_t>> supports_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd coeffs_;
    Eigen::MatrixXd projector_coeffs_;  // coeffs * coeffs^T
    Index rank_ = 0;
    double gram_check_error_ = 0.0;
};

inline FixedSpaceBasis fixed_space_basis(Index n, int t) { return FixedSpaceBasis(n, t); }

/// M -> (1/s) sum_i U_i^{(x) t} M (U_i^dagger)^{(x) t}, evaluated matrix-free as
/// 2t mode contractions per member, summed in member order.
class MomentOperator {
   public:
    MomentOperator(UnitaryEnsemble ensemble, int t);

    const UnitaryEnsemble &ensemble() const noexcept { return ensemble_; }
    int t() const noexcept { return t_; }
    Index side() const noexcept { return side_; }
    Index ambient() const noexcept { return side_ * side_; }

    CVector apply_vec(const CVector &v) const;
    CVector adjoint_vec(const CVector &v) const;
    CMatrix apply(const CMatrix &m) const;

    /// The ambient x ambient superoperator (1/s) sum_i K_i (x) conj(K_i), K_i = U_i^{(x) t}.
    CMatrix dense() const;

   private:
    CVector conjugate_sum(const CVector &v, bool adjoint) const;

    UnitaryEnsemble ensemble_;
    int t_;
    Index side_;
    std::vector<CMatrix> conj_;
    std::vector<CMatrix> adj_;
    std::vector<CMatrix> trans_;
};

/// Orthogonal projection of m onto W.
CMatrix ideal_apply(const FixedSpaceBasis &basis, const CMatrix &m);

struct SpectralReport {
    double lambda = 0.0;
    SpectralMethod method = SpectralMethod::DenseSvd;
    int iterations = 0;
    double residual = 0.0;
    bool converged = true;
    std::optional<double> bound_reference;
    std::uint64_t seed = 0;
    std::string ensemble_label;
    int t = 1;
};

nlohmann::json to_json(const SpectralReport &r);

struct LambdaOptions {
    SpectralMethod method = SpectralMethod::Auto;
    double tol = -1.0;
    int max_iters = 5000;
    /// Restrict iterates to the complement of W.
    bool deflate = true;
    std::uint64_t seed = 0;
};

constexpr int kMaxLambdaT = 4;
constexpr Index kMaxIterativeAmbient = 10'000'000;

/// lambda = ||Phi_t - P_W||_inf, the largest singular value of the moment
/// operator with the Haar projector removed.
SpectralReport lambda(const UnitaryEnsemble &e, int t, const LambdaOptions &opts = {});

/// The map Phi_t - P_W as a linear operator (self-adjoint for explicitly
/// Hermitian ensembles).
LinearMap lambda_operator(const MomentOperator &phi, const FixedSpaceBasis &basis);

/// |[(Phi^k - P_W)(E_{jj})]_{ii}| for row tuple i and column tuple j, where
/// E_{jj} has a single one at ((j_1..j_t),(j_1..j_t)). Requires k >= 1.
double design_error_monomial(const UnitaryEnsemble &e, int t, int k, const std::vector<Index> &row_indices,
                             const std::vector<Index> &col_indices);

/// ceil((t ln n + ln(1/alpha)) / ln(1/lambda)): the iteration count with the
/// O(.) constant fixed to 1. Requires 0 < lambda < 1 and 0 < alpha < 1.
int design_iterations_needed(int t, Index n, double alpha, double lambda);

struct PrincipalSines {
    double a_to_b = 0.0;
    double b_to_a = 0.0;
    double perp_a_to_b = 0.0;  ///< from complement(A) into complement(B)
    double perp_b_to_a = 0.0;
};

/// Directed principal-angle sines between span(A) and span(B) and between
/// their complements, from spanning-set Gram matrices alone: gram_ab(i, j) =
/// <a_i, b_j>. The complement values use ||P_B (1 - P_A)||, which needs no
/// explicit complement basis. Assumes the ambient space exceeds dim A + dim B.
PrincipalSines principal_sines_from_grams(const Eigen::MatrixXd &gram_aa, const Eigen::MatrixXd &gram_bb,
                                          const Eigen::MatrixXd &gram_ab, double rank_tol = 1e-8);

struct ClosenessReport {
    Index outer_dim = 0;
    Index inner_dim = 0;
    int t = 1;
    PrincipalSines full;   ///< W vs W' and their complements (claim1, claim3)
    PrincipalSines inner;  ///< W_2 vs W'_2, equal to C^{D^t x D^t} (x) W_2 vs (x) W'_2 (claim2, claim4)
    double sqrt_bound = 0.0;     ///< 2 sqrt(t(t-1)/d)
    double quartic_bound = 0.0;  ///< 2 (t(t-1)/d)^{1/4}
    bool claim1 = true;
    bool claim2 = true;
    bool claim3 = true;
    bool claim4 = true;
};

nlohmann::json to_json(const ClosenessReport &r);

/// Everywhere-closeness diagnostics for W = span{(a1)_s (x) (a2)_s} and
/// W' = span{(a1)_s (x) (a'2)_s} on (C^D)^{(x)t} (x) (C^d)^{(x)t}. Requires t <= 3 and t <= d.
ClosenessReport subspace_closeness_report(Index outer_dim, Index inner_dim, int t);

}  // namespace qtpe

#endif
